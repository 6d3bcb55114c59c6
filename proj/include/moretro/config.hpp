#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "moretro/expansion.hpp"
#include "moretro/objectives.hpp"
#include "moretro/search.hpp"

namespace moretro {

struct ProviderSpec {
    enum class Kind { Synthetic, Templates };
    Kind kind = Kind::Synthetic;
    WorldSpec world;
    std::string templates;
    std::string stock;
    std::string properties;
    std::string agents;
    std::size_t k = 25;

    bool operator==(const ProviderSpec&) const = default;
};

struct BenchSuite {
    std::vector<std::uint64_t> world_seeds;
    std::vector<Strategy> strategies = {Strategy::MoretroBO, Strategy::Fixed, Strategy::RetroStar};

    bool operator==(const BenchSuite&) const = default;
};

/// One experiment manifest: provider, search settings, reporting options.
struct RunConfig {
    ProviderSpec provider;
    /// Empty: the synthetic world's target.
    std::string target;
    SearchConfig search = SearchConfig::for_strategy(Strategy::MoretroBO);
    ToxicityAggregation toxicity_aggregation = ToxicityAggregation::Max;
    double unknown_agent_score = 0.5;
    /// Empty: every dimension except guidance.
    std::vector<bool> mask;
    bool record_wall_time = false;
    std::size_t oracle_cap = 1'000'000;
    std::string out;
    BenchSuite bench;

    /// Parses a manifest; per-strategy defaults fill fields the manifest leaves out.
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
    void validate() const;

    /// Switches strategy, resetting the strategy-dependent defaults (N_S, w_budget, weights).
    void set_strategy(Strategy s);

    MoleculeKey target_key() const;
    ObjectiveSet objectives() const;
    std::unique_ptr<ExpansionProvider> make_provider() const;

    bool operator==(const RunConfig&) const = default;
};

} // namespace moretro
