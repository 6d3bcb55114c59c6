#include "moretro/graph_routes.hpp"

#include <algorithm>
#include <functional>

namespace moretro {

namespace {

struct Label {
    std::vector<double> cost;
    std::optional<ReactionId> reaction;
    std::vector<std::uint32_t> picks;
};

// Keeps labels not strictly dominated on the masked dims; first of equal costs wins.
std::vector<Label> nd_labels(std::vector<Label> labels, const Mask& mask)
{
    std::vector<std::vector<double>> masked;
    masked.reserve(labels.size());
    for (const auto& l : labels) {
        masked.push_back(project(l.cost, mask));
    }
    std::vector<Label> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < labels.size() && keep; ++j) {
            if (j == i) {
                continue;
            }
            if (strictly_dominates(masked[j], masked[i]) || (j < i && approx_equal(masked[j], masked[i]))) {
                keep = false;
            }
        }
        if (keep) {
            out.push_back(std::move(labels[i]));
        }
    }
    return out;
}

std::vector<bool> local_solved(const SearchGraph& graph, std::vector<bool>& rxn_solved)
{
    std::vector<bool> solved(graph.molecule_count(), false);
    rxn_solved.assign(graph.reaction_count(), false);
    const auto& order = graph.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto& node = graph.molecule(*it);
        bool s = node.is_stock;
        for (ReactionId r : node.children) {
            bool all = true;
            for (MoleculeId c : graph.reaction(r).reactants) {
                all = all && solved[index(c)];
            }
            rxn_solved[index(r)] = all;
            s = s || all;
        }
        solved[index(*it)] = s;
    }
    return solved;
}

Route route_from_reactions(const SearchGraph& graph, const std::vector<ReactionId>& reactions)
{
    Route route;
    route.target = graph.molecule(graph.target()).key;
    route.cost = CostVector::zero(graph.mask());
    std::vector<bool> produced(graph.molecule_count(), false);
    std::vector<bool> used(graph.molecule_count(), false);
    used[index(graph.target())] = true;
    std::vector<bool> seen(graph.reaction_count(), false);
    for (ReactionId r : reactions) {
        if (seen[index(r)]) {
            continue;
        }
        seen[index(r)] = true;
        const auto& rn = graph.reaction(r);
        route.reactions.push_back({rn.record, rn.cost});
        route.cost += rn.cost;
        produced[index(rn.product)] = true;
        for (MoleculeId c : rn.reactants) {
            used[index(c)] = true;
        }
    }
    std::vector<MoleculeKey> leaves;
    for (std::size_t i = 0; i < used.size(); ++i) {
        if (used[i] && !produced[i]) {
            leaves.push_back(graph.molecule(MoleculeId{static_cast<std::uint32_t>(i)}).key);
        }
    }
    std::sort(leaves.begin(), leaves.end());
    route.frontier_leaves = std::move(leaves);
    return route;
}

} // namespace

std::vector<Route> solved_pareto_routes(const SearchGraph& graph)
{
    const Mask& mask = graph.mask();
    const std::size_t d = mask.size();
    std::vector<bool> rxn_solved;
    local_solved(graph, rxn_solved);
    std::vector<std::vector<Label>> labels(graph.molecule_count());
    const auto& order = graph.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto& node = graph.molecule(*it);
        if (node.is_stock) {
            labels[index(*it)].push_back({std::vector<double>(d, 0.0), std::nullopt, {}});
            continue;
        }
        std::vector<Label> merged;
        for (ReactionId r : node.children) {
            if (!rxn_solved[index(r)]) {
                continue;
            }
            const auto& rxn = graph.reaction(r);
            std::vector<Label> partial{{rxn.cost.values(), r, {}}};
            for (MoleculeId c : rxn.reactants) {
                std::vector<Label> next;
                const auto& child = labels[index(c)];
                for (const auto& p : partial) {
                    for (std::uint32_t k = 0; k < child.size(); ++k) {
                        Label l = p;
                        for (std::size_t i = 0; i < d; ++i) {
                            l.cost[i] += child[k].cost[i];
                        }
                        l.picks.push_back(k);
                        next.push_back(std::move(l));
                    }
                }
                partial = nd_labels(std::move(next), mask);
            }
            merged.insert(merged.end(), std::make_move_iterator(partial.begin()),
                          std::make_move_iterator(partial.end()));
        }
        labels[index(*it)] = nd_labels(std::move(merged), mask);
    }

    std::vector<Route> routes;
    const auto& root = labels[index(graph.target())];
    for (const auto& top : root) {
        std::vector<ReactionId> reactions;
        std::function<void(const Label&)> collect = [&](const Label& l) {
            if (!l.reaction) {
                return;
            }
            reactions.push_back(*l.reaction);
            const auto& rxn = graph.reaction(*l.reaction);
            for (std::size_t i = 0; i < rxn.reactants.size(); ++i) {
                const MoleculeId c = rxn.reactants[i];
                collect(labels[index(c)][l.picks[i]]);
            }
        };
        collect(top);
        routes.push_back(route_from_reactions(graph, reactions));
    }
    return routes;
}

GraphRouteEnumeration enumerate_graph_routes(const SearchGraph& graph, std::size_t cap)
{
    std::vector<bool> rxn_solved;
    local_solved(graph, rxn_solved);
    GraphRouteEnumeration out;
    std::vector<std::optional<ReactionId>> assigned(graph.molecule_count());
    std::vector<ReactionId> chosen;

    std::function<void(std::vector<MoleculeId>)> dfs = [&](std::vector<MoleculeId> open) {
        if (out.overflow) {
            return;
        }
        while (!open.empty()) {
            const MoleculeId m = open.back();
            if (graph.molecule(m).is_stock || assigned[index(m)]) {
                open.pop_back();
                continue;
            }
            break;
        }
        if (open.empty()) {
            if (out.routes.size() >= cap) {
                out.overflow = true;
                return;
            }
            out.routes.push_back(route_from_reactions(graph, chosen));
            return;
        }
        const MoleculeId m = open.back();
        open.pop_back();
        for (ReactionId r : graph.molecule(m).children) {
            if (!rxn_solved[index(r)]) {
                continue;
            }
            assigned[index(m)] = r;
            chosen.push_back(r);
            std::vector<MoleculeId> next = open;
            const auto& reactants = graph.reaction(r).reactants;
            next.insert(next.end(), reactants.rbegin(), reactants.rend());
            dfs(std::move(next));
            chosen.pop_back();
            assigned[index(m)].reset();
        }
    };
    dfs({graph.target()});
    return out;
}

} // namespace moretro
