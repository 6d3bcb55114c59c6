#include "moretro/oracle.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

namespace moretro {

EnumeratedWorld enumerate_routes(const ExpansionProvider& provider, const ObjectiveSet& objectives,
                                 const MoleculeKey& target, std::size_t cap, bool strict)
{
    EnumeratedWorld world;
    world.target = target;
    world.mask = objectives.mask();
    world.cap = cap;

    // breadth-first materialization of the reachable world
    std::set<MoleculeKey> visited{target};
    std::deque<MoleculeKey> queue{target};
    while (!queue.empty()) {
        const MoleculeKey m = queue.front();
        queue.pop_front();
        if (provider.in_stock(m)) {
            world.stock.insert(m);
            continue;
        }
        auto& list = world.produced_by[m];
        for (auto& rec : provider.expand(m)) {
            OracleReaction r;
            r.cost = reaction_cost(rec, objectives, provider, provider.agent_table()).values();
            for (const auto& c : rec.reactants) {
                if (visited.insert(c).second) {
                    queue.push_back(c);
                }
            }
            r.record = std::move(rec);
            list.push_back(world.reactions.size());
            world.reactions.push_back(std::move(r));
        }
    }

    std::map<MoleculeKey, std::size_t> assignment;
    std::vector<std::size_t> chosen;
    const std::size_t dims = world.mask.size();

    // each open molecule carries its ancestor chain so cycles are rejected per branch
    struct Open {
        MoleculeKey key;
        std::vector<MoleculeKey> ancestors;
    };
    std::function<void(std::vector<Open>)> dfs = [&](std::vector<Open> open) {
        if (world.overflow) {
            return;
        }
        while (!open.empty() && (world.stock.count(open.back().key) || assignment.count(open.back().key))) {
            open.pop_back();
        }
        if (open.empty()) {
            if (world.routes.size() >= cap) {
                if (strict) {
                    throw OracleOverflow("oracle: more than " + std::to_string(cap) + " routes");
                }
                world.overflow = true;
                return;
            }
            OracleRoute route;
            route.reactions = chosen;
            std::sort(route.reactions.begin(), route.reactions.end());
            route.cost.assign(dims, 0.0);
            route.molecules.insert(world.target);
            for (std::size_t r : route.reactions) {
                for (std::size_t i = 0; i < dims; ++i) {
                    route.cost[i] += world.reactions[r].cost[i];
                }
                route.molecules.insert(world.reactions[r].record.reactants.begin(),
                                       world.reactions[r].record.reactants.end());
            }
            world.routes.push_back(std::move(route));
            return;
        }
        const Open current = open.back();
        open.pop_back();
        std::vector<MoleculeKey> chain = current.ancestors;
        chain.push_back(current.key);
        for (std::size_t r : world.produced_by[current.key]) {
            const auto& reactants = world.reactions[r].record.reactants;
            const bool cyclic = std::any_of(reactants.begin(), reactants.end(), [&](const MoleculeKey& k) {
                return std::find(chain.begin(), chain.end(), k) != chain.end();
            });
            if (cyclic) {
                continue;
            }
            assignment[current.key] = r;
            chosen.push_back(r);
            std::vector<Open> next = open;
            for (auto it = reactants.rbegin(); it != reactants.rend(); ++it) {
                next.push_back({*it, chain});
            }
            dfs(std::move(next));
            chosen.pop_back();
            assignment.erase(current.key);
        }
    };
    dfs({Open{target, {}}});
    return world;
}

std::vector<std::size_t> pareto_route_indices(const EnumeratedWorld& world)
{
    if (world.overflow) {
        throw OracleOverflow("oracle: route enumeration overflowed, front is unknown");
    }
    std::vector<std::vector<double>> masked;
    for (const auto& r : world.routes) {
        masked.push_back(project(r.cost, world.mask));
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < masked.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < masked.size() && !dominated; ++j) {
            dominated = j != i && strictly_dominates(masked[j], masked[i]);
        }
        if (!dominated) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::vector<double>> true_front(const EnumeratedWorld& world)
{
    std::vector<std::vector<double>> front;
    for (std::size_t i : pareto_route_indices(world)) {
        auto c = project(world.routes[i].cost, world.mask);
        const bool dup = std::any_of(front.begin(), front.end(), [&](const auto& f) { return approx_equal(f, c); });
        if (!dup) {
            front.push_back(std::move(c));
        }
    }
    return front;
}

double scalar_optimum(const EnumeratedWorld& world, const std::vector<double>& w)
{
    if (world.overflow) {
        throw OracleOverflow("oracle: route enumeration overflowed, optimum is unknown");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : world.routes) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            s += w[i] * r.cost[i];
        }
        best = std::min(best, s);
    }
    return best;
}

nlohmann::json dump(const EnumeratedWorld& world)
{
    nlohmann::json routes = nlohmann::json::array();
    for (const auto& r : world.routes) {
        nlohmann::json rx = nlohmann::json::array();
        for (std::size_t i : r.reactions) {
            rx.push_back(world.reactions[i].record.signature());
        }
        routes.push_back({{"cost", r.cost}, {"reactions", rx}});
    }
    nlohmann::json j = {{"target", world.target}, {"overflow", world.overflow}, {"routes", routes}};
    j["front_indices"] = world.overflow ? nlohmann::json(nullptr) : nlohmann::json(pareto_route_indices(world));
    return j;
}

} // namespace moretro
