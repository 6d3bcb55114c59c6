#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "moretro/objectives.hpp"
#include "moretro/reaction.hpp"

namespace moretro {

/// Single-step predictor B composed with condition predictor Q, plus stock and property access.
/// Implementations are immutable after construction; expand() is deterministic.
class ExpansionProvider : public PropertyLookup {
public:
    virtual std::vector<ReactionRecord> expand(const MoleculeKey& m) const = 0;
    virtual bool in_stock(const MoleculeKey& m) const = 0;
    virtual const AgentTable& agent_table() const = 0;
};

class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Parameters of a seeded, depth-bounded random retrosynthesis world.
struct WorldSpec {
    std::uint64_t seed = 0;
    std::string target = "t";
    int depth_max = 3;
    int branching = 3;
    int reactants_min = 1;
    int reactants_max = 2;
    /// Child molecules per product; sibling reactions draw reactants from this pool.
    int pool_size = 4;
    /// P(stock | depth d) = min(1, stock_base + stock_slope * d) for 1 <= d < depth_max.
    double stock_base = 0.15;
    double stock_slope = 0.2;
    /// Molecules at depth_max are stock; when false they are dead ends.
    bool terminal_stock = true;
    bool target_in_stock = false;
    double temperature_min = -40.0;
    double temperature_max = 160.0;
    int max_agents = 2;
    double logp_min = -2.0;
    double logp_max = 6.0;
    int target_heavy_atoms_min = 20;
    int target_heavy_atoms_max = 40;
    /// Guidance cost draws are U(0, guidance_max) before shrinking towards stock-rich reactions.
    double guidance_max = 0.6;
    /// In [0,1]: how strongly reactions with stock reactants get higher likelihood.
    double guidance_informativeness = 0.6;

    void validate() const;
    nlohmann::json to_json() const;
    static WorldSpec from_json(const nlohmann::json& j);
    bool operator==(const WorldSpec&) const = default;
};

/// Counter-based hashing helpers shared by the world generator and tests.
std::uint64_t hash_key(std::string_view s);
std::uint64_t mix(std::uint64_t a, std::uint64_t b);
double unit_draw(std::uint64_t h);

class SyntheticWorld final : public ExpansionProvider {
public:
    explicit SyntheticWorld(WorldSpec spec);

    std::vector<ReactionRecord> expand(const MoleculeKey& m) const override;
    bool in_stock(const MoleculeKey& m) const override;
    MoleculeProperties properties(const MoleculeKey& m) const override;
    const AgentTable& agent_table() const override { return agents_; }
    AgentTable& agent_table() { return agents_; }

    const WorldSpec& spec() const { return spec_; }
    /// Depth of a generated key; throws Error for keys this world never produces.
    int depth_of(const MoleculeKey& m) const;

    static std::map<std::string, double> default_agent_scores();

private:
    std::uint64_t draw(const MoleculeKey& m, std::string_view salt, std::uint64_t index = 0) const;

    WorldSpec spec_;
    AgentTable agents_;
};

/// File-backed stand-in for B and Q: JSON-lines template table, stock list, property and agent tables.
class TemplateTable final : public ExpansionProvider {
public:
    struct Condition {
        std::vector<std::string> agents;
        double temperature = 20.0;
    };
    struct Row {
        MoleculeKey product;
        std::vector<MoleculeKey> reactants;
        double probability = 1.0;
        std::string rule_id;
        std::vector<Condition> conditions;
    };

    TemplateTable(std::vector<Row> rows, std::set<MoleculeKey> stock,
                  std::map<MoleculeKey, MoleculeProperties> properties, AgentTable agents,
                  std::size_t k = 25);

    /// Parses JSON-lines rows; malformed rows raise ParseError carrying the line number.
    static std::vector<Row> parse_rows(std::istream& in, const std::string& source = "<templates>");
    static std::set<MoleculeKey> parse_stock(std::istream& in);
    static std::map<MoleculeKey, MoleculeProperties> parse_properties(const nlohmann::json& j);
    static AgentTable parse_agents(const nlohmann::json& j);

    static TemplateTable load(const std::filesystem::path& templates, const std::filesystem::path& stock,
                              const std::filesystem::path& properties,
                              const std::filesystem::path& agents, std::size_t k = 25);

    std::vector<ReactionRecord> expand(const MoleculeKey& m) const override;
    bool in_stock(const MoleculeKey& m) const override { return stock_.count(m) != 0; }
    MoleculeProperties properties(const MoleculeKey& m) const override;
    const AgentTable& agent_table() const override { return agents_; }
    AgentTable& agent_table() { return agents_; }

    std::size_t k() const { return k_; }

private:
    std::map<MoleculeKey, std::vector<Row>> by_product_;
    std::set<MoleculeKey> stock_;
    std::map<MoleculeKey, MoleculeProperties> properties_;
    AgentTable agents_;
    std::size_t k_;
};

} // namespace moretro
