#include "moretro/pruning.hpp"

#include <algorithm>
#include <limits>

namespace moretro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

Bounds compute_pn(const SearchGraph& graph, bool admissible_heuristic)
{
    const std::size_t d = graph.mask().size();
    Bounds b;
    b.mol_pn.assign(graph.molecule_count(), std::vector<double>(d, 0.0));
    b.rxn_pn.assign(graph.reaction_count(), std::vector<double>(d, 0.0));
    const auto& order = graph.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto& node = graph.molecule(*it);
        auto& pn = b.mol_pn[index(*it)];
        if (node.is_stock) {
            continue;
        }
        if (!node.expanded) {
            if (admissible_heuristic) {
                pn = node.heuristic.values();
            }
            continue;
        }
        std::fill(pn.begin(), pn.end(), kInf);
        for (ReactionId r : node.children) {
            const auto& rxn = graph.reaction(r);
            auto& rpn = b.rxn_pn[index(r)];
            for (std::size_t i = 0; i < d; ++i) {
                double sum = rxn.cost[i];
                for (MoleculeId c : rxn.reactants) {
                    sum += b.mol_pn[index(c)][i];
                }
                rpn[i] = sum;
                pn[i] = std::min(pn[i], sum);
            }
        }
    }
    return b;
}

void compute_vbound(const SearchGraph& graph, Bounds& b)
{
    const std::size_t d = graph.mask().size();
    b.mol_vbound.assign(graph.molecule_count(), std::vector<double>(d, kInf));
    b.rxn_vbound.assign(graph.reaction_count(), std::vector<double>(d, kInf));
    const auto& order = graph.topological_order();
    b.mol_vbound[index(graph.target())] = b.mol_pn[index(graph.target())];
    for (MoleculeId m : order) {
        const auto& node = graph.molecule(m);
        auto& vb = b.mol_vbound[index(m)];
        if (m != graph.target()) {
            for (ReactionId r : node.parents) {
                const auto& rvb = b.rxn_vbound[index(r)];
                for (std::size_t i = 0; i < d; ++i) {
                    vb[i] = std::min(vb[i], rvb[i]);
                }
            }
        }
        for (ReactionId r : node.children) {
            auto& rvb = b.rxn_vbound[index(r)];
            const auto& rpn = b.rxn_pn[index(r)];
            const auto& mpn = b.mol_pn[index(m)];
            for (std::size_t i = 0; i < d; ++i) {
                // inf - inf would be NaN; an infinite reaction or parent bound stays infinite
                rvb[i] = (rpn[i] == kInf || vb[i] == kInf) ? kInf : rpn[i] - mpn[i] + vb[i];
            }
        }
    }
}

Bounds compute_bounds(const SearchGraph& graph, bool admissible_heuristic)
{
    Bounds b = compute_pn(graph, admissible_heuristic);
    compute_vbound(graph, b);
    return b;
}

bool bound_dominated(std::span<const double> vbound, const Mask& mask, std::span<const Point> archive_masked,
                     double epsilon)
{
    Point relaxed = project(vbound, mask);
    for (double& v : relaxed) {
        v += epsilon;
    }
    return std::any_of(archive_masked.begin(), archive_masked.end(),
                       [&](const Point& c) { return strictly_dominates(c, relaxed); });
}

nlohmann::json PruneReport::to_json() const
{
    return {{"pruned_count", pruned_count},
            {"frontier_size", frontier_size},
            {"certified", certified},
            {"epsilon", epsilon},
            {"search_space_reduction_percent", search_space_reduction_percent}};
}

PruneReport prune_frontier(SearchGraph& graph, const Bounds& bounds, std::span<const Point> archive_masked,
                           double epsilon)
{
    PruneReport report;
    report.epsilon = epsilon;
    for (std::size_t i = 0; i < graph.molecule_count(); ++i) {
        const auto id = MoleculeId{static_cast<std::uint32_t>(i)};
        const auto& node = graph.molecule(id);
        if (node.expanded || node.is_stock) {
            continue;
        }
        const bool was = node.pruned;
        const bool now = bound_dominated(bounds.mol_vbound[i], graph.mask(), archive_masked, epsilon);
        graph.set_pruned(id, now);
        if (now) {
            ++report.pruned_count;
            report.newly_pruned += was ? 0 : 1;
        } else {
            ++report.frontier_size;
        }
    }
    report.certified = report.frontier_size == 0;
    const std::size_t open = report.pruned_count + report.frontier_size;
    report.search_space_reduction_percent =
        open == 0 ? 0.0 : 100.0 * static_cast<double>(report.pruned_count) / static_cast<double>(open);
    return report;
}

} // namespace moretro
