#include "moretro/config.hpp"

#include <fstream>

namespace moretro {

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* name, T& field)
{
    if (j.contains(name) && !j.at(name).is_null()) {
        j.at(name).get_to(field);
    }
}

std::string aggregation_name(ToxicityAggregation a)
{
    return a == ToxicityAggregation::Mean ? "mean" : "max";
}

ToxicityAggregation aggregation_from(const std::string& s)
{
    if (s == "max") return ToxicityAggregation::Max;
    if (s == "mean") return ToxicityAggregation::Mean;
    throw Error("toxicity_aggregation must be 'max' or 'mean', got '" + s + "'");
}

std::string source_name(CandidateSource c)
{
    return c == CandidateSource::Grid ? "grid" : "sobol";
}

CandidateSource source_from(const std::string& s)
{
    if (s == "sobol") return CandidateSource::Sobol;
    if (s == "grid") return CandidateSource::Grid;
    throw Error("bo.candidate_source must be 'sobol' or 'grid', got '" + s + "'");
}

} // namespace

void RunConfig::set_strategy(Strategy s)
{
    const SearchConfig defaults = SearchConfig::for_strategy(s);
    search.strategy = s;
    search.pool.strategy = defaults.pool.strategy;
    search.pool.n_active = defaults.pool.n_active;
    search.pool.fixed_weights = defaults.pool.fixed_weights;
    search.w_budget = defaults.w_budget;
}

RunConfig RunConfig::from_json(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw Error("config must be a JSON object");
    }
    RunConfig c;
    try {
        if (j.contains("strategy")) {
            c.set_strategy(strategy_from_string(j.at("strategy").get<std::string>()));
        }
        if (!j.contains("provider")) {
            throw Error("config needs a 'provider' block");
        }
        const auto& p = j.at("provider");
        const std::string type = p.value("type", "synthetic");
        if (type == "synthetic") {
            if (p.contains("templates")) {
                throw Error("provider: a synthetic provider cannot also name a template table");
            }
            c.provider.kind = ProviderSpec::Kind::Synthetic;
            c.provider.world = WorldSpec::from_json(p.value("world", nlohmann::json::object()));
        } else if (type == "templates") {
            if (p.contains("world")) {
                throw Error("provider: a template provider cannot also define a synthetic world");
            }
            c.provider.kind = ProviderSpec::Kind::Templates;
            read(p, "templates", c.provider.templates);
            read(p, "stock", c.provider.stock);
            read(p, "properties", c.provider.properties);
            read(p, "agents", c.provider.agents);
            read(p, "k", c.provider.k);
        } else {
            throw Error("provider.type must be 'synthetic' or 'templates', got '" + type + "'");
        }

        read(j, "target", c.target);
        auto& s = c.search;
        read(j, "seed", s.pool.seed);
        read(j, "n_active", s.pool.n_active);
        read(j, "w_budget", s.w_budget);
        read(j, "budget", s.expansion_budget);
        read(j, "time_budget", s.time_budget);
        read(j, "use_heuristics", s.use_heuristics);
        read(j, "pruning", s.pruning);
        read(j, "epsilon", s.epsilon);
        read(j, "certify", s.certify);
        read(j, "scalar_certify", s.scalar_certify);
        read(j, "complete_archive", s.complete_archive);
        read(j, "archive_hv_reference", s.archive_hv_reference);
        read(j, "fixed_weights", s.pool.fixed_weights);
        read(j, "grid_resolution", s.pool.grid_resolution);
        read(j, "sobol_count", s.pool.sobol_count);
        read(j, "sobol_extremes", s.pool.sobol_extremes);
        if (j.contains("bo")) {
            const auto& bo = j.at("bo");
            read(bo, "warmup_batches", s.pool.warmup_batches);
            read(bo, "candidates", s.pool.bo_candidates);
            read(bo, "candidate_grid_resolution", s.pool.candidate_grid_resolution);
            read(bo, "decay", s.pool.decay);
            read(bo, "max_age", s.pool.max_age);
            if (bo.contains("candidate_source")) {
                s.pool.candidate_source = source_from(bo.at("candidate_source").get<std::string>());
            }
        }
        if (j.contains("toxicity_aggregation")) {
            c.toxicity_aggregation = aggregation_from(j.at("toxicity_aggregation").get<std::string>());
        }
        read(j, "unknown_agent_score", c.unknown_agent_score);
        read(j, "mask", c.mask);
        read(j, "record_wall_time", c.record_wall_time);
        read(j, "oracle_cap", c.oracle_cap);
        read(j, "out", c.out);
        if (j.contains("bench")) {
            const auto& b = j.at("bench");
            read(b, "world_seeds", c.bench.world_seeds);
            if (b.contains("strategies")) {
                c.bench.strategies.clear();
                for (const auto& name : b.at("strategies")) {
                    c.bench.strategies.push_back(strategy_from_string(name.get<std::string>()));
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
    return from_json(j);
}

nlohmann::json RunConfig::to_json() const
{
    nlohmann::json p;
    if (provider.kind == ProviderSpec::Kind::Synthetic) {
        p = {{"type", "synthetic"}, {"world", provider.world.to_json()}};
    } else {
        p = {{"type", "templates"},
             {"templates", provider.templates},
             {"stock", provider.stock},
             {"properties", provider.properties},
             {"agents", provider.agents},
             {"k", provider.k}};
    }
    const auto& s = search;
    nlohmann::json strategies = nlohmann::json::array();
    for (Strategy st : bench.strategies) {
        strategies.push_back(to_string(st));
    }
    return {
        {"provider", p},
        {"target", target},
        {"seed", s.pool.seed},
        {"strategy", to_string(s.strategy)},
        {"n_active", s.pool.n_active},
        {"w_budget", s.w_budget},
        {"budget", s.expansion_budget},
        {"time_budget", s.time_budget},
        {"use_heuristics", s.use_heuristics},
        {"pruning", s.pruning},
        {"epsilon", s.epsilon},
        {"certify", s.certify},
        {"scalar_certify", s.scalar_certify},
        {"complete_archive", s.complete_archive},
        {"archive_hv_reference", s.archive_hv_reference},
        {"fixed_weights", s.pool.fixed_weights},
        {"grid_resolution", s.pool.grid_resolution},
        {"sobol_count", s.pool.sobol_count},
        {"sobol_extremes", s.pool.sobol_extremes},
        {"bo",
         {{"warmup_batches", s.pool.warmup_batches},
          {"candidates", s.pool.bo_candidates},
          {"candidate_source", source_name(s.pool.candidate_source)},
          {"candidate_grid_resolution", s.pool.candidate_grid_resolution},
          {"decay", s.pool.decay},
          {"max_age", s.pool.max_age}}},
        {"toxicity_aggregation", aggregation_name(toxicity_aggregation)},
        {"unknown_agent_score", unknown_agent_score},
        {"mask", mask},
        {"record_wall_time", record_wall_time},
        {"oracle_cap", oracle_cap},
        {"out", out},
        {"bench", {{"world_seeds", bench.world_seeds}, {"strategies", strategies}}},
    };
}

void RunConfig::validate() const
{
    if (provider.kind == ProviderSpec::Kind::Templates) {
        if (provider.templates.empty() || provider.stock.empty() || provider.properties.empty()) {
            throw Error("template provider needs 'templates', 'stock' and 'properties' paths");
        }
        if (target.empty()) {
            throw Error("template provider needs a 'target'");
        }
        if (provider.k == 0) {
            throw Error("provider.k must be >= 1");
        }
    } else {
        provider.world.validate();
    }
    if (!(unknown_agent_score >= 0.0 && unknown_agent_score <= 1.0)) {
        throw Error("unknown_agent_score must lie in [0,1]");
    }
    const ObjectiveSet objs = objectives();
    search.validate(objs.size());
    const auto masked = static_cast<std::size_t>(std::count(objs.mask().begin(), objs.mask().end(), true));
    if (search.archive_hv_reference.size() != masked) {
        throw Error("archive_hv_reference needs one entry per masked objective");
    }
    if (search.pool.strategy == SamplingStrategy::Fixed && search.pool.fixed_weights.empty()) {
        throw Error("fixed strategy requires a weight vector");
    }
}

MoleculeKey RunConfig::target_key() const
{
    if (!target.empty()) {
        return target;
    }
    return provider.world.target;
}

ObjectiveSet RunConfig::objectives() const
{
    ObjectiveSet objs = ObjectiveSet::standard();
    if (!mask.empty()) {
        objs.set_mask(mask);
    }
    return objs;
}

std::unique_ptr<ExpansionProvider> RunConfig::make_provider() const
{
    if (provider.kind == ProviderSpec::Kind::Synthetic) {
        auto world = std::make_unique<SyntheticWorld>(provider.world);
        world->agent_table().set_aggregation(toxicity_aggregation);
        world->agent_table().set_unknown_score(unknown_agent_score);
        return world;
    }
    auto table = std::make_unique<TemplateTable>(
        TemplateTable::load(provider.templates, provider.stock, provider.properties, provider.agents, provider.k));
    table->agent_table().set_aggregation(toxicity_aggregation);
    table->agent_table().set_unknown_score(unknown_agent_score);
    return table;
}

} // namespace moretro
