#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "moretro/graph.hpp"
#include "moretro/metrics.hpp"

namespace moretro {

/// Component-wise pruning numbers and their downward bounds, full N_D vectors per node.
struct Bounds {
    std::vector<std::vector<double>> mol_pn;
    std::vector<std::vector<double>> rxn_pn;
    std::vector<std::vector<double>> mol_vbound;
    std::vector<std::vector<double>> rxn_vbound;
};

/// Bottom-up pn: stock 0, unexpanded molecules zero (or their heuristic when
/// `admissible_heuristic`), expanded molecules the component-wise min over child reactions
/// (+inf without children), reactions c(R) plus the sum over reactants.
Bounds compute_pn(const SearchGraph& graph, bool admissible_heuristic = false);

/// Top-down bound from pn: root pn(t); reaction pn(R) - pn(product) + bound(product);
/// molecule component-wise min over parent reactions.
void compute_vbound(const SearchGraph& graph, Bounds& bounds);

Bounds compute_bounds(const SearchGraph& graph, bool admissible_heuristic = false);

/// True iff some archived masked cost strictly dominates the masked bound plus epsilon.
bool bound_dominated(std::span<const double> vbound, const Mask& mask, std::span<const Point> archive_masked,
                     double epsilon);

struct PruneReport {
    std::size_t pruned_count = 0;
    std::size_t newly_pruned = 0;
    std::size_t frontier_size = 0;
    bool certified = false;
    double epsilon = 0.0;
    double search_space_reduction_percent = 0.0;

    nlohmann::json to_json() const;
};

/// Re-evaluates every unexpanded, non-stock molecule and sets its pruned flag from
/// bound_dominated; certified when no unpruned frontier molecule remains.
PruneReport prune_frontier(SearchGraph& graph, const Bounds& bounds, std::span<const Point> archive_masked,
                           double epsilon);

} // namespace moretro
