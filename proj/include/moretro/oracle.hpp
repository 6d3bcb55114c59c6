#pragma once

#include <map>
#include <set>
#include <vector>

#include <json.hpp>

#include "moretro/expansion.hpp"
#include "moretro/objectives.hpp"

namespace moretro {

class OracleOverflow : public Error {
public:
    using Error::Error;
};

struct OracleReaction {
    ReactionRecord record;
    std::vector<double> cost;
};

struct OracleRoute {
    /// Indices into EnumeratedWorld::reactions, ascending.
    std::vector<std::size_t> reactions;
    std::vector<double> cost;
    std::set<MoleculeKey> molecules;
};

/// Fully expanded world reachable from a target plus every complete route through it.
struct EnumeratedWorld {
    MoleculeKey target;
    Mask mask;
    std::vector<OracleReaction> reactions;
    std::map<MoleculeKey, std::vector<std::size_t>> produced_by;
    std::set<MoleculeKey> stock;
    std::vector<OracleRoute> routes;
    bool overflow = false;
    std::size_t cap = 0;
};

/// Depth-first enumeration of every route, one reaction per molecule. Stops at `cap` routes
/// with overflow set; throws OracleOverflow instead when `strict`.
EnumeratedWorld enumerate_routes(const ExpansionProvider& provider, const ObjectiveSet& objectives,
                                 const MoleculeKey& target, std::size_t cap = 1'000'000, bool strict = false);

/// Masked costs of the Pareto-optimal routes (one per distinct cost). Refuses overflowed worlds.
std::vector<std::vector<double>> true_front(const EnumeratedWorld& world);
/// Indices of routes whose masked cost is Pareto-optimal (all duplicates kept).
std::vector<std::size_t> pareto_route_indices(const EnumeratedWorld& world);

/// min over routes of w^T C (full dimensions); +inf without routes.
double scalar_optimum(const EnumeratedWorld& world, const std::vector<double>& w);

/// {"target", "overflow", "routes": [{"cost", "reactions"}], "front_indices"}.
nlohmann::json dump(const EnumeratedWorld& world);

} // namespace moretro
