#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "moretro/expansion.hpp"
#include "moretro/graph.hpp"
#include "moretro/metrics.hpp"
#include "moretro/objectives.hpp"
#include "moretro/pruning.hpp"
#include "moretro/weights.hpp"

namespace moretro {

/// w^T v over every dimension, guidance included. Throws Error on a size mismatch.
double scalarize(std::span<const double> v, std::span<const double> w);
double scalarize(const CostVector& v, const WeightVector& w);

/// Non-dominated route set on the masked dimensions with cached hypervolume.
class ParetoArchive {
public:
    enum class Outcome { Inserted, Dominated, Duplicate };

    ParetoArchive(Mask mask, std::vector<double> hv_reference);

    /// Rejects routes dominated by or equal (masked) to an archived route; otherwise evicts
    /// the routes it dominates and stores it.
    Outcome insert(Route route);

    const std::vector<Route>& routes() const { return routes_; }
    std::size_t size() const { return routes_.size(); }
    bool empty() const { return routes_.empty(); }
    double hypervolume() const { return hv_; }
    /// HV change caused by the last insert call (0 unless Inserted).
    double last_delta() const { return last_delta_; }
    const Mask& mask() const { return mask_; }
    const std::vector<double>& hv_reference() const { return reference_; }
    std::vector<Point> masked_costs() const;

private:
    double recompute_hv() const;

    Mask mask_;
    std::vector<double> reference_;
    std::vector<Route> routes_;
    std::vector<Point> masked_;
    double hv_ = 0.0;
    double last_delta_ = 0.0;
};

enum class Strategy { MoretroBO, MoretroGrid, MoretroSobol, RetroStar, Fixed };
std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

enum class Termination { None, Budget, Time, PoolExhausted, Certified, FrontierEmpty, ScalarCertified, NoSelectable };
std::string to_string(Termination t);

struct SearchConfig {
    Strategy strategy = Strategy::MoretroBO;
    PoolConfig pool;
    std::size_t w_budget = 12;
    /// N_B: maximum number of single-step expansions (one per distinct expanded molecule).
    std::size_t expansion_budget = 300;
    /// Seconds; 0 disables the time limit.
    double time_budget = 0.0;
    /// false: every molecule heuristic is the zero vector.
    bool use_heuristics = true;
    bool pruning = false;
    double epsilon = 0.0;
    /// Stop once every frontier molecule is bound-dominated (implies pruning and complete_archive).
    bool certify = false;
    /// Single-weight stop rule: best solved value <= smallest selectable V_t.
    bool scalar_certify = false;
    /// Also merge every in-graph Pareto route into the archive each iteration.
    bool complete_archive = false;
    std::vector<double> archive_hv_reference = {10.0, 10.0, 10.0};

    /// Defaults per strategy (N_S, w_budget, weights).
    static SearchConfig for_strategy(Strategy s);
    void validate(std::size_t dims) const;
    bool operator==(const SearchConfig&) const = default;
};

struct TraceRow {
    std::size_t iteration = 0;
    std::size_t expansions = 0;
    std::size_t selected_molecules = 0;
    std::size_t archive_size = 0;
    double hypervolume = 0.0;
};

struct SearchStats {
    std::size_t iterations = 0;
    std::size_t expansions = 0;
    std::size_t provider_calls = 0;
    std::size_t cycle_discards = 0;
    std::size_t resamples = 0;
    std::size_t archive_inserts = 0;
    Termination termination = Termination::None;
    double wall_seconds = 0.0;
    PruneReport pruning;
};

/// Best-first multi-weight AND-OR search. Single writer: not thread-safe.
class Search {
public:
    Search(SearchConfig config, const ExpansionProvider& provider, ObjectiveSet objectives, MoleculeKey target);

    /// Advances one iteration; returns false once terminated.
    bool step();
    /// Runs to termination.
    void run();

    bool done() const { return stats_.termination != Termination::None; }
    const SearchGraph& graph() const { return graph_; }
    const ParetoArchive& archive() const { return archive_; }
    const SearchStats& stats() const { return stats_; }
    const std::vector<TraceRow>& trace() const { return trace_; }
    const WeightPool& pool() const { return pool_; }
    const SearchConfig& config() const { return config_; }
    const ObjectiveSet& objectives() const { return objectives_; }
    /// Bounds from the most recent pruning pass (empty when pruning is off).
    const Bounds& bounds() const { return bounds_; }

    /// Best solved route under active weight j (nullopt while the target is unsolved).
    std::optional<Route> best_route(std::size_t j) const;
    /// Best solved scalarized value under active weight j (+inf while unsolved).
    double best_value(std::size_t j) const;

private:
    NewMolecule make_molecule(const MoleculeKey& key) const;
    void rebuild_states();
    void propagate();
    void record();
    void prune();
    bool scalar_certified() const;
    std::optional<MoleculeId> select(std::size_t j) const;
    void finish(Termination t);
    double elapsed() const;

    SearchConfig config_;
    const ExpansionProvider& provider_;
    ObjectiveSet objectives_;
    SearchGraph graph_;
    WeightPool pool_;
    ParetoArchive archive_;
    SearchStats stats_;
    std::vector<TraceRow> trace_;
    std::vector<double> hv_gain_;
    Bounds bounds_;
    std::size_t k_ = 0;
    std::chrono::steady_clock::time_point start_;
};

/// Expanded selection step for one weight (exposed for tests): argmin V_t over the frontier,
/// ties by insertion index, molecules with infinite V_t skipped.
std::optional<MoleculeId> select_molecule(const SearchGraph& graph, std::size_t weight_index);

/// Per-weight propagation (exposed for tests).
void initialize_weight(SearchGraph& graph, std::size_t j, const WeightVector& w);
void propagate_up(SearchGraph& graph, std::size_t j, const WeightVector& w);
void propagate_down(SearchGraph& graph, std::size_t j);

} // namespace moretro
