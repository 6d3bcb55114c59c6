#include "moretro/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace moretro {

namespace {

std::string num(double v)
{
    return nlohmann::json(v).dump();
}

nlohmann::json route_json(const Route& route, const Mask& mask)
{
    nlohmann::json reactions = nlohmann::json::array();
    for (const auto& r : route.reactions) {
        reactions.push_back({{"signature", r.record.signature()},
                             {"product", r.record.product},
                             {"reactants", r.record.reactants},
                             {"rule_id", r.record.rule_id},
                             {"cost", r.cost.values()}});
    }
    return {{"cost", route.cost.values()},
            {"masked_cost", project(route.cost.values(), mask)},
            {"generating_weight", route.generating_weight ? nlohmann::json(*route.generating_weight)
                                                          : nlohmann::json(nullptr)},
            {"n_reactions", route.reactions.size()},
            {"reactions", reactions}};
}

std::string world_label(const nlohmann::json& run)
{
    const auto& w = run.at("world_seed");
    return w.is_null() ? std::string("-") : w.dump();
}

std::vector<Point> masked_front(const nlohmann::json& run)
{
    std::vector<Point> out;
    for (const auto& r : run.at("archive")) {
        out.push_back(r.at("masked_cost").get<Point>());
    }
    return out;
}

} // namespace

RunOutput run_single(const RunConfig& config)
{
    config.validate();
    const auto provider = config.make_provider();
    const ObjectiveSet objectives = config.objectives();
    const MoleculeKey target = config.target_key();

    Search search(config.search, *provider, objectives, target);
    search.run();

    const auto& stats = search.stats();
    const auto& archive = search.archive();
    const Mask& mask = objectives.mask();

    nlohmann::json names = nlohmann::json::array();
    for (const auto& o : objectives.objectives()) {
        names.push_back(o.name);
    }
    nlohmann::json routes = nlohmann::json::array();
    for (const auto& r : archive.routes()) {
        routes.push_back(route_json(r, mask));
    }
    nlohmann::json stats_json = {{"iterations", stats.iterations},
                                 {"expansions", stats.expansions},
                                 {"provider_calls", stats.provider_calls},
                                 {"cycle_discards", stats.cycle_discards},
                                 {"resamples", stats.resamples},
                                 {"archive_inserts", stats.archive_inserts},
                                 {"termination", to_string(stats.termination)},
                                 {"unknown_agent_hits", provider->agent_table().unknown_hits()}};
    if (config.record_wall_time) {
        stats_json["wall_seconds"] = stats.wall_seconds;
    }
    const auto front = archive.masked_costs();
    const auto r2 = r2_indicator(front);

    RunOutput out;
    out.run = {{"config", config.to_json()},
               {"target", target},
               {"world_seed", config.provider.kind == ProviderSpec::Kind::Synthetic
                                  ? nlohmann::json(config.provider.world.seed)
                                  : nlohmann::json(nullptr)},
               {"strategy", to_string(config.search.strategy)},
               {"objectives", names},
               {"mask", mask},
               {"archive", routes},
               {"stats", stats_json},
               {"pruning", search.config().pruning ? stats.pruning.to_json() : nlohmann::json(nullptr)},
               {"metrics",
                {{"hv_raw", archive.hypervolume()},
                 {"hv_reference", archive.hv_reference()},
                 {"r2", r2 ? nlohmann::json(*r2) : nlohmann::json(nullptr)},
                 {"r2_definition", kR2Definition},
                 {"n_routes", archive.size()},
                 {"success", !archive.empty()}}}};
    out.trace_csv = trace_csv(search.trace());
    out.exit_code = archive.empty() ? kExitNoRoute : kExitOk;
    return out;
}

std::string trace_csv(const std::vector<TraceRow>& trace)
{
    std::ostringstream os;
    os << "iteration,expansions,selected_molecules,archive_size,hypervolume\n";
    for (const auto& t : trace) {
        os << t.iteration << ',' << t.expansions << ',' << t.selected_molecules << ',' << t.archive_size << ','
           << num(t.hypervolume) << '\n';
    }
    return os.str();
}

void write_run(const RunOutput& output, const std::filesystem::path& path)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream json(path);
    json << output.run.dump(2) << '\n';
    auto trace_path = path;
    trace_path.replace_extension(".trace.csv");
    std::ofstream csv(trace_path);
    csv << output.trace_csv;
    if (!json || !csv) {
        throw Error("cannot write run output to " + path.string());
    }
}

std::size_t bench_workers()
{
    const char* env = std::getenv("MORETRO_WORKERS");
    if (env == nullptr || *env == '\0') {
        return 1;
    }
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) {
        throw Error(std::string("MORETRO_WORKERS must be a positive integer, got '") + env + "'");
    }
    return static_cast<std::size_t>(n);
}

std::vector<nlohmann::json> run_benchmark(const RunConfig& base, std::size_t workers)
{
    std::vector<RunConfig> jobs;
    std::vector<std::uint64_t> seeds = base.bench.world_seeds;
    if (seeds.empty()) {
        seeds.push_back(base.provider.world.seed);
    }
    if (base.bench.strategies.empty()) {
        throw Error("bench needs at least one strategy");
    }
    for (std::uint64_t seed : seeds) {
        for (Strategy s : base.bench.strategies) {
            RunConfig c = base;
            c.provider.world.seed = seed;
            c.set_strategy(s);
            jobs.push_back(std::move(c));
        }
        if (base.provider.kind != ProviderSpec::Kind::Synthetic) {
            break;
        }
    }

    std::vector<nlohmann::json> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const RunConfig& c = jobs[i];
            try {
                results[i] = run_single(c).run;
            } catch (const std::exception& e) {
                results[i] = {{"error", e.what()},
                              {"strategy", to_string(c.search.strategy)},
                              {"target", c.target_key()},
                              {"world_seed", c.provider.kind == ProviderSpec::Kind::Synthetic
                                                 ? nlohmann::json(c.provider.world.seed)
                                                 : nlohmann::json(nullptr)}};
            }
        }
    };
    const std::size_t n = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(jobs.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < n; ++i) {
        pool.emplace_back(work);
    }
    work();
    pool.clear();
    return results;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<nlohmann::json>& runs, Strategy reference)
{
    const std::string ref_name = to_string(reference);
    // group by world and target, keeping first-appearance order
    std::vector<std::pair<std::string, std::string>> groups;
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto key = std::make_pair(world_label(runs[i]), runs[i].at("target").get<std::string>());
        if (!members.count(key)) {
            groups.push_back(key);
        }
        members[key].push_back(i);
    }

    std::vector<AggregateRow> rows(runs.size());
    for (const auto& key : groups) {
        const auto& idx = members[key];
        std::vector<Point> all;
        for (std::size_t i : idx) {
            if (!runs[i].contains("error")) {
                for (auto& p : masked_front(runs[i])) {
                    all.push_back(std::move(p));
                }
            }
        }
        std::optional<PercentileScale> scale;
        if (!all.empty()) {
            scale = fit_percentile_scale(all);
        }
        std::map<std::size_t, std::vector<Point>> normalized;
        std::optional<std::size_t> ref_run;
        for (std::size_t i : idx) {
            if (runs[i].contains("error")) {
                continue;
            }
            auto& front = normalized[i];
            for (const auto& p : masked_front(runs[i])) {
                front.push_back(scale->apply(p));
            }
            if (!ref_run && runs[i].at("strategy") == ref_name) {
                ref_run = i;
            }
        }
        for (std::size_t i : idx) {
            const auto& run = runs[i];
            AggregateRow& row = rows[i];
            row.world = key.first;
            row.target = key.second;
            row.strategy = run.at("strategy").get<std::string>();
            if (run.contains("error")) {
                row.error = run.at("error").get<std::string>();
                continue;
            }
            const auto& front = normalized[i];
            const auto mask = run.at("mask").get<Mask>();
            const std::vector<double> hv_ref(static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)),
                                             1.1);
            row.stats.hv = front.empty() ? 0.0 : hypervolume(front, hv_ref);
            row.stats.r2 = r2_indicator(front);
            row.stats.n_routes = front.size();
            row.stats.success = !front.empty();
            if (ref_run && *ref_run != i) {
                const Coverage cov = dominance_coverage(normalized[*ref_run], front);
                row.stats.baseline_dominated_pct = cov.b_dominated_by_a;
                row.stats.self_dominated_pct = cov.a_dominated_by_b;
                row.has_coverage = true;
            }
            const auto& stats = run.at("stats");
            row.expansions = stats.at("expansions").get<std::size_t>();
            row.termination = stats.at("termination").get<std::string>();
            if (!run.at("pruning").is_null()) {
                const auto& p = run.at("pruning");
                row.pruned = p.at("pruned_count").get<std::size_t>();
                row.reduction_pct = p.at("search_space_reduction_percent").get<double>();
                row.certified = p.at("certified").get<bool>();
            }
        }
    }
    return rows;
}

namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v)
{
    MeanStd out;
    if (v.empty()) {
        return out;
    }
    for (double x : v) {
        out.mean += x;
    }
    out.mean /= static_cast<double>(v.size());
    for (double x : v) {
        out.std += (x - out.mean) * (x - out.mean);
    }
    out.std = std::sqrt(out.std / static_cast<double>(v.size()));
    return out;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

} // namespace

std::string aggregate_csv(const std::vector<AggregateRow>& rows)
{
    std::ostringstream os;
    os << "world_seed,target,strategy,hv,r2,n_routes,success,baseline_dominated_pct,self_dominated_pct,"
          "expansions,termination,pruned,reduction_pct,certified,error\n";
    std::vector<std::string> order;
    for (const auto& r : rows) {
        os << r.world << ',' << csv_field(r.target) << ',' << r.strategy << ',';
        if (r.error) {
            os << ",,,,,,,,,," << csv_field(*r.error) << '\n';
        } else {
            os << num(r.stats.hv) << ',' << (r.stats.r2 ? num(*r.stats.r2) : "") << ',' << r.stats.n_routes << ','
               << (r.stats.success ? 1 : 0) << ',';
            if (r.has_coverage) {
                os << num(r.stats.baseline_dominated_pct) << ',' << num(r.stats.self_dominated_pct);
            } else {
                os << ',';
            }
            os << ',' << r.expansions << ',' << r.termination << ',' << r.pruned << ',' << num(r.reduction_pct)
               << ',' << (r.certified ? 1 : 0) << ",\n";
        }
        if (std::find(order.begin(), order.end(), r.strategy) == order.end()) {
            order.push_back(r.strategy);
        }
    }
    os << "\nstrategy,runs,failures,hv_mean,hv_std,r2_mean,r2_std,n_routes_mean,success_rate,"
          "baseline_dominated_mean,self_dominated_mean,certified_count\n";
    for (const auto& s : order) {
        std::vector<double> hv, r2, n, cov_b, cov_s;
        std::size_t runs = 0, failures = 0, successes = 0, certified = 0;
        for (const auto& r : rows) {
            if (r.strategy != s) {
                continue;
            }
            ++runs;
            if (r.error) {
                ++failures;
                continue;
            }
            hv.push_back(r.stats.hv);
            if (r.stats.r2) {
                r2.push_back(*r.stats.r2);
            }
            n.push_back(static_cast<double>(r.stats.n_routes));
            successes += r.stats.success ? 1 : 0;
            certified += r.certified ? 1 : 0;
            if (r.has_coverage) {
                cov_b.push_back(r.stats.baseline_dominated_pct);
                cov_s.push_back(r.stats.self_dominated_pct);
            }
        }
        const auto h = mean_std(hv);
        const auto q = mean_std(r2);
        const std::size_t ok = runs - failures;
        os << s << ',' << runs << ',' << failures << ',' << num(h.mean) << ',' << num(h.std) << ','
           << (r2.empty() ? "" : num(q.mean)) << ',' << (r2.empty() ? "" : num(q.std)) << ','
           << num(mean_std(n).mean) << ','
           << num(ok == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(ok)) << ','
           << (cov_b.empty() ? "" : num(mean_std(cov_b).mean)) << ','
           << (cov_s.empty() ? "" : num(mean_std(cov_s).mean)) << ',' << certified << '\n';
    }
    return os.str();
}

std::string front_plotdata(const nlohmann::json& run)
{
    const auto names = run.at("objectives").get<std::vector<std::string>>();
    const auto mask = run.at("mask").get<Mask>();
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (mask[i]) {
            os << (first ? "" : ",") << "cost_" << names[i];
            first = false;
        }
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        os << ",weight_" << names[i];
    }
    os << ",n_reactions\n";
    for (const auto& r : run.at("archive")) {
        first = true;
        for (const auto& c : r.at("masked_cost")) {
            os << (first ? "" : ",") << c.dump();
            first = false;
        }
        const auto& w = r.at("generating_weight");
        for (std::size_t i = 0; i < names.size(); ++i) {
            os << ',' << (w.is_null() ? std::string() : w.at(i).dump());
        }
        os << ',' << r.at("n_reactions").dump() << '\n';
    }
    return os.str();
}

} // namespace moretro
