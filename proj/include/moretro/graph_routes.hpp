#pragma once

#include <vector>

#include "moretro/graph.hpp"

namespace moretro {

/// Every Pareto-optimal (masked dims) fully solved route contained in the graph, one route per
/// distinct masked cost, via bottom-up label sets with Minkowski sums over reactants.
std::vector<Route> solved_pareto_routes(const SearchGraph& graph);

struct GraphRouteEnumeration {
    std::vector<Route> routes;
    bool overflow = false;
};

/// All fully solved routes in the graph (one reaction per molecule), stopping at `cap`.
GraphRouteEnumeration enumerate_graph_routes(const SearchGraph& graph, std::size_t cap);

} // namespace moretro
