#include "moretro/expansion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace moretro {

std::string ReactionRecord::signature() const
{
    std::vector<MoleculeKey> r = reactants;
    std::sort(r.begin(), r.end());
    std::vector<std::string> a = agents;
    std::sort(a.begin(), a.end());
    std::ostringstream os;
    os << product << '>';
    for (std::size_t i = 0; i < r.size(); ++i) {
        os << (i ? "." : "") << r[i];
    }
    os << '|' << rule_id << '|';
    for (std::size_t i = 0; i < a.size(); ++i) {
        os << (i ? "," : "") << a[i];
    }
    os << '|' << temperature;
    return os.str();
}

std::uint64_t hash_key(std::string_view s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b)
{
    // splitmix64 finalizer over the combined words
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double unit_draw(std::uint64_t h)
{
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

void WorldSpec::validate() const
{
    if (depth_max < 1) {
        throw Error("world: depth_max must be >= 1");
    }
    if (branching < 1) {
        throw Error("world: branching must be >= 1");
    }
    if (reactants_min < 1 || reactants_max < reactants_min) {
        throw Error("world: need 1 <= reactants_min <= reactants_max");
    }
    if (pool_size < reactants_max) {
        throw Error("world: pool_size must be >= reactants_max");
    }
    if (target.empty() || target.find('.') != std::string::npos) {
        throw Error("world: target key must be non-empty and contain no '.'");
    }
    if (!(temperature_min <= temperature_max) || !(logp_min <= logp_max)) {
        throw Error("world: temperature/logp ranges are inverted");
    }
    if (target_heavy_atoms_min < 1 || target_heavy_atoms_max < target_heavy_atoms_min) {
        throw Error("world: invalid target heavy atom range");
    }
    if (max_agents < 0 || guidance_max < 0.0 || guidance_informativeness < 0.0 ||
        guidance_informativeness > 1.0) {
        throw Error("world: invalid agent or guidance parameters");
    }
}

nlohmann::json WorldSpec::to_json() const
{
    return {
        {"seed", seed},
        {"target", target},
        {"depth_max", depth_max},
        {"branching", branching},
        {"reactants_min", reactants_min},
        {"reactants_max", reactants_max},
        {"pool_size", pool_size},
        {"stock_base", stock_base},
        {"stock_slope", stock_slope},
        {"terminal_stock", terminal_stock},
        {"target_in_stock", target_in_stock},
        {"temperature_min", temperature_min},
        {"temperature_max", temperature_max},
        {"max_agents", max_agents},
        {"logp_min", logp_min},
        {"logp_max", logp_max},
        {"target_heavy_atoms_min", target_heavy_atoms_min},
        {"target_heavy_atoms_max", target_heavy_atoms_max},
        {"guidance_max", guidance_max},
        {"guidance_informativeness", guidance_informativeness},
    };
}

WorldSpec WorldSpec::from_json(const nlohmann::json& j)
{
    WorldSpec w;
    auto get = [&j](const char* name, auto& field) {
        if (j.contains(name)) {
            j.at(name).get_to(field);
        }
    };
    get("seed", w.seed);
    get("target", w.target);
    get("depth_max", w.depth_max);
    get("branching", w.branching);
    get("reactants_min", w.reactants_min);
    get("reactants_max", w.reactants_max);
    get("pool_size", w.pool_size);
    get("stock_base", w.stock_base);
    get("stock_slope", w.stock_slope);
    get("terminal_stock", w.terminal_stock);
    get("target_in_stock", w.target_in_stock);
    get("temperature_min", w.temperature_min);
    get("temperature_max", w.temperature_max);
    get("max_agents", w.max_agents);
    get("logp_min", w.logp_min);
    get("logp_max", w.logp_max);
    get("target_heavy_atoms_min", w.target_heavy_atoms_min);
    get("target_heavy_atoms_max", w.target_heavy_atoms_max);
    get("guidance_max", w.guidance_max);
    get("guidance_informativeness", w.guidance_informativeness);
    w.validate();
    return w;
}

std::map<std::string, double> SyntheticWorld::default_agent_scores()
{
    return {{"water", 0.0},    {"ethanol", 0.1},   {"ethyl_acetate", 0.2}, {"acetone", 0.2},
            {"thf", 0.4},      {"toluene", 0.5},   {"dmf", 0.6},          {"dcm", 0.7},
            {"benzene", 0.8},  {"chloroform", 0.9}, {"pd_c", 0.3},        {"hmpa", 1.0}};
}

SyntheticWorld::SyntheticWorld(WorldSpec spec)
    : spec_(std::move(spec)), agents_(default_agent_scores())
{
    spec_.validate();
}

std::uint64_t SyntheticWorld::draw(const MoleculeKey& m, std::string_view salt, std::uint64_t index) const
{
    return mix(mix(mix(spec_.seed, hash_key(m)), hash_key(salt)), index);
}

int SyntheticWorld::depth_of(const MoleculeKey& m) const
{
    if (m.compare(0, spec_.target.size(), spec_.target) != 0) {
        throw Error("synthetic world: unknown molecule '" + m + "'");
    }
    int depth = 0;
    std::size_t pos = spec_.target.size();
    while (pos < m.size()) {
        if (m[pos] != '.') {
            throw Error("synthetic world: unknown molecule '" + m + "'");
        }
        std::size_t end = pos + 1;
        while (end < m.size() && std::isdigit(static_cast<unsigned char>(m[end]))) {
            ++end;
        }
        if (end == pos + 1 || end - pos > 6) {
            throw Error("synthetic world: unknown molecule '" + m + "'");
        }
        const int slot = std::stoi(m.substr(pos + 1, end - pos - 1));
        if (slot >= spec_.pool_size) {
            throw Error("synthetic world: unknown molecule '" + m + "'");
        }
        ++depth;
        pos = end;
    }
    if (depth > spec_.depth_max) {
        throw Error("synthetic world: molecule '" + m + "' lies beyond depth_max");
    }
    return depth;
}

bool SyntheticWorld::in_stock(const MoleculeKey& m) const
{
    const int d = depth_of(m);
    if (d == 0) {
        return spec_.target_in_stock;
    }
    if (d >= spec_.depth_max) {
        return spec_.terminal_stock;
    }
    const double fraction = std::min(1.0, spec_.stock_base + spec_.stock_slope * d);
    return unit_draw(draw(m, "stock")) < fraction;
}

MoleculeProperties SyntheticWorld::properties(const MoleculeKey& m) const
{
    const int d = depth_of(m);
    MoleculeProperties p;
    // heavy atoms shrink along the key chain from the target
    const int range = spec_.target_heavy_atoms_max - spec_.target_heavy_atoms_min + 1;
    int atoms = spec_.target_heavy_atoms_min +
                static_cast<int>(draw(spec_.target, "atoms") % static_cast<std::uint64_t>(range));
    std::size_t pos = spec_.target.size();
    for (int level = 0; level < d; ++level) {
        pos = m.find('.', pos + 1);
        const MoleculeKey prefix = m.substr(0, pos == std::string::npos ? m.size() : pos);
        const double shrink = 0.35 + 0.45 * unit_draw(draw(prefix, "atoms"));
        atoms = std::max(1, static_cast<int>(std::lround(atoms * shrink)));
    }
    p.heavy_atom_count = atoms;
    p.sa_score = 1.0 + 8.0 * unit_draw(draw(m, "sa"));
    p.toxicity_score = 0.7 * unit_draw(draw(m, "tox"));
    p.price_score = 15.0 * unit_draw(draw(m, "price"));
    p.logp = spec_.logp_min + (spec_.logp_max - spec_.logp_min) * unit_draw(draw(m, "logp"));
    return p;
}

std::vector<ReactionRecord> SyntheticWorld::expand(const MoleculeKey& m) const
{
    const int d = depth_of(m);
    std::vector<ReactionRecord> out;
    if (d >= spec_.depth_max) {
        return out;
    }
    std::vector<std::string> agent_names;
    for (const auto& [name, score] : agents_.scores()) {
        agent_names.push_back(name);
    }
    const auto pool = static_cast<std::uint64_t>(spec_.pool_size);
    for (int i = 0; i < spec_.branching; ++i) {
        const auto ci = static_cast<std::uint64_t>(i);
        ReactionRecord rec;
        rec.product = m;
        rec.rule_id = "r" + std::to_string(i);

        const auto span = static_cast<std::uint64_t>(spec_.reactants_max - spec_.reactants_min + 1);
        const int n_reactants = spec_.reactants_min + static_cast<int>(draw(m, "nr", ci) % span);
        std::vector<int> slots(static_cast<std::size_t>(pool));
        for (std::size_t s = 0; s < slots.size(); ++s) {
            slots[s] = static_cast<int>(s);
        }
        for (int s = 0; s < n_reactants; ++s) {
            const auto pick = s + draw(m, "slot", ci * 64 + static_cast<std::uint64_t>(s)) %
                                      (pool - static_cast<std::uint64_t>(s));
            std::swap(slots[static_cast<std::size_t>(s)], slots[static_cast<std::size_t>(pick)]);
        }
        std::sort(slots.begin(), slots.begin() + n_reactants);
        int stock_reactants = 0;
        for (int s = 0; s < n_reactants; ++s) {
            rec.reactants.push_back(m + "." + std::to_string(slots[static_cast<std::size_t>(s)]));
            stock_reactants += in_stock(rec.reactants.back()) ? 1 : 0;
        }

        const double t = spec_.temperature_min +
                         (spec_.temperature_max - spec_.temperature_min) * unit_draw(draw(m, "temp", ci));
        rec.temperature = std::round(t * 10.0) / 10.0;

        const auto n_agents = static_cast<std::size_t>(
            draw(m, "nagents", ci) % static_cast<std::uint64_t>(spec_.max_agents + 1));
        std::vector<std::string> names = agent_names;
        for (std::size_t a = 0; a < n_agents && a < names.size(); ++a) {
            const auto pick = a + draw(m, "agent", ci * 64 + a) % (names.size() - a);
            std::swap(names[a], names[pick]);
            rec.agents.push_back(names[a]);
        }
        std::sort(rec.agents.begin(), rec.agents.end());

        const double stock_fraction = static_cast<double>(stock_reactants) / n_reactants;
        const double g = spec_.guidance_max * unit_draw(draw(m, "guid", ci)) *
                         (1.0 - spec_.guidance_informativeness * stock_fraction);
        rec.probability = std::exp(-10.0 * g);
        out.push_back(std::move(rec));
    }
    return out;
}

// ---------------------------------------------------------------------------

TemplateTable::TemplateTable(std::vector<Row> rows, std::set<MoleculeKey> stock,
                             std::map<MoleculeKey, MoleculeProperties> properties, AgentTable agents,
                             std::size_t k)
    : stock_(std::move(stock)), properties_(std::move(properties)), agents_(std::move(agents)), k_(k)
{
    for (auto& row : rows) {
        by_product_[row.product].push_back(std::move(row));
    }
    for (auto& [product, list] : by_product_) {
        std::stable_sort(list.begin(), list.end(),
                         [](const Row& a, const Row& b) { return a.probability > b.probability; });
    }
}

std::vector<TemplateTable::Row> TemplateTable::parse_rows(std::istream& in, const std::string& source)
{
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            Row row;
            row.product = j.at("product").get<std::string>();
            row.reactants = j.at("reactants").get<std::vector<std::string>>();
            row.probability = j.at("prob").get<double>();
            const auto& rule = j.at("rule_id");
            row.rule_id = rule.is_string() ? rule.get<std::string>() : rule.dump();
            if (j.contains("conditions")) {
                for (const auto& c : j.at("conditions")) {
                    Condition cond;
                    cond.agents = c.value("agents", std::vector<std::string>{});
                    cond.temperature = c.at("temp").get<double>();
                    row.conditions.push_back(std::move(cond));
                }
            }
            if (row.product.empty() || row.reactants.empty()) {
                throw ParseError(source, line_no, "product and reactants must be non-empty");
            }
            if (!(row.probability > 0.0 && row.probability <= 1.0)) {
                throw ParseError(source, line_no, "prob must lie in (0, 1]");
            }
            rows.push_back(std::move(row));
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(source, line_no, std::string("malformed template row: ") + e.what());
        }
    }
    return rows;
}

std::set<MoleculeKey> TemplateTable::parse_stock(std::istream& in)
{
    std::set<MoleculeKey> stock;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            continue;
        }
        const auto e = line.find_last_not_of(" \t\r");
        stock.insert(line.substr(b, e - b + 1));
    }
    return stock;
}

std::map<MoleculeKey, MoleculeProperties> TemplateTable::parse_properties(const nlohmann::json& j)
{
    std::map<MoleculeKey, MoleculeProperties> out;
    for (const auto& [key, v] : j.items()) {
        MoleculeProperties p;
        p.heavy_atom_count = v.at("heavy_atoms").get<int>();
        p.sa_score = v.value("sa", 0.0);
        p.toxicity_score = v.value("tox", 0.0);
        p.price_score = v.value("price", 0.0);
        p.logp = v.value("logp", 0.0);
        if (p.heavy_atom_count < 1 || p.toxicity_score < 0.0 || p.toxicity_score > 1.0) {
            throw Error("property record for '" + key + "' violates heavy_atoms >= 1 or tox in [0,1]");
        }
        out.emplace(key, p);
    }
    return out;
}

AgentTable TemplateTable::parse_agents(const nlohmann::json& j)
{
    return AgentTable(j.get<std::map<std::string, double>>());
}

TemplateTable TemplateTable::load(const std::filesystem::path& templates, const std::filesystem::path& stock,
                                  const std::filesystem::path& properties,
                                  const std::filesystem::path& agents, std::size_t k)
{
    auto open = [](const std::filesystem::path& p) {
        std::ifstream in(p);
        if (!in) {
            throw Error("cannot open " + p.string());
        }
        return in;
    };
    auto t_in = open(templates);
    auto s_in = open(stock);
    auto p_in = open(properties);
    auto rows = parse_rows(t_in, templates.string());
    auto stock_set = parse_stock(s_in);
    auto props = parse_properties(nlohmann::json::parse(p_in));
    AgentTable agent_table;
    if (!agents.empty()) {
        auto a_in = open(agents);
        agent_table = parse_agents(nlohmann::json::parse(a_in));
    }
    return TemplateTable(std::move(rows), std::move(stock_set), std::move(props), std::move(agent_table), k);
}

std::vector<ReactionRecord> TemplateTable::expand(const MoleculeKey& m) const
{
    std::vector<ReactionRecord> out;
    auto it = by_product_.find(m);
    if (it == by_product_.end()) {
        return out;
    }
    const auto& rows = it->second;
    const std::size_t n = std::min(rows.size(), k_);
    for (std::size_t i = 0; i < n; ++i) {
        const Row& row = rows[i];
        ReactionRecord base;
        base.product = row.product;
        base.reactants = row.reactants;
        base.rule_id = row.rule_id;
        base.probability = row.probability;
        if (row.conditions.empty()) {
            out.push_back(base);
            continue;
        }
        for (std::size_t c = 0; c < row.conditions.size() && c < 2; ++c) {
            ReactionRecord rec = base;
            rec.agents = row.conditions[c].agents;
            rec.temperature = row.conditions[c].temperature;
            out.push_back(std::move(rec));
        }
    }
    return out;
}

MoleculeProperties TemplateTable::properties(const MoleculeKey& m) const
{
    auto it = properties_.find(m);
    if (it == properties_.end()) {
        throw MissingPropertyError(m);
    }
    return it->second;
}

} // namespace moretro
