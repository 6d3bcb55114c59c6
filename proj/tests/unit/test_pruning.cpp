#include <doctest.h>

#include <random>

#include "../support.hpp"
#include "moretro/pruning.hpp"

using namespace moretro;
using testkit::fresh;
using testkit::rxn;

namespace {

const Mask kMask{true, true, true, false};

} // namespace

TEST_CASE("pn: zero frontier, reaction sums and component-wise minima")
{
    SearchGraph single("T", fresh(false, {0.4, 0.4, 0.4, 0.4}));
    auto b = compute_bounds(single);
    CHECK(b.mol_pn[0] == std::vector<double>(4, 0.0));
    CHECK(b.mol_vbound[0] == std::vector<double>(4, 0.0));
    CHECK(compute_pn(single, true).mol_pn[0] == std::vector<double>(4, 0.4));

    SearchGraph g("T", fresh());
    std::vector<CostedReaction> c{rxn("T", {"A", "B"}, {0.1, 0.2, 0, 0})};
    g.add_expansion(g.target(), c, testkit::stock_factory({}));
    b = compute_bounds(g);
    CHECK(b.rxn_pn[0] == std::vector<double>{0.1, 0.2, 0, 0});
    CHECK(b.mol_pn[0] == std::vector<double>{0.1, 0.2, 0, 0});

    SearchGraph m("T", fresh());
    std::vector<CostedReaction> d{rxn("T", {"A"}, {0.3, 0.1, 0, 0}, "r1"), rxn("T", {"B"}, {0.1, 0.3, 0, 0}, "r2")};
    m.add_expansion(m.target(), d, testkit::stock_factory({}));
    CHECK(compute_pn(m).mol_pn[0] == std::vector<double>{0.1, 0.1, 0, 0});

    SearchGraph dead("T", fresh());
    dead.add_expansion(dead.target(), {}, testkit::stock_factory({}));
    CHECK(compute_pn(dead).mol_pn[0][0] == testkit::kInf);
}

TEST_CASE("V_bound along a hand chain equals the cheapest hypothetical completion")
{
    // T -(R1 [.1,.2,.3,0])-> A + S ; A -(R2 [.2,.1,.0,0])-> B ; A -(R3 [.05,.3,.1,0])-> C
    SearchGraph g("T", fresh());
    std::vector<CostedReaction> top{rxn("T", {"A", "S"}, {0.1, 0.2, 0.3, 0})};
    g.add_expansion(g.target(), top, testkit::stock_factory({"S"}));
    std::vector<CostedReaction> mid{rxn("A", {"B"}, {0.2, 0.1, 0.0, 0}, "r2"), rxn("A", {"C"}, {0.05, 0.3, 0.1, 0}, "r3")};
    g.add_expansion(*g.find("A"), mid, testkit::stock_factory({}));
    const auto b = compute_bounds(g);
    // hypothetical completions through B: [.3,.3,.3], through C: [.15,.5,.4]
    CHECK(b.mol_vbound[index(*g.find("B"))] == std::vector<double>{0.1 + 0.2, 0.2 + 0.1, 0.3 + 0.0, 0});
    CHECK(b.mol_vbound[index(*g.find("C"))][0] == doctest::Approx(0.15));
    CHECK(b.mol_vbound[index(*g.find("C"))][1] == doctest::Approx(0.5));
    CHECK(b.mol_vbound[index(*g.find("C"))][2] == doctest::Approx(0.4));
    CHECK(b.mol_vbound[0][0] == doctest::Approx(0.15));
    CHECK(b.mol_vbound[0][1] == doctest::Approx(0.3));
    CHECK(b.mol_vbound[0][2] == doctest::Approx(0.3));
}

TEST_CASE("bound dominance is strict and honours epsilon")
{
    const std::vector<Point> archive{{0.1, 0.1, 0.1}};
    CHECK(bound_dominated(std::vector<double>{0.5, 0.5, 0.5, 0.0}, kMask, archive, 0.0));
    CHECK_FALSE(bound_dominated(std::vector<double>{0.1, 0.1, 0.1, 0.9}, kMask, archive, 0.0));
    CHECK_FALSE(bound_dominated(std::vector<double>{0.15, 0.15, 0.15, 0.0}, kMask, {}, 0.1));
    CHECK(bound_dominated(std::vector<double>{0.15, 0.15, 0.15, 0.0}, kMask, archive, 0.1));
    CHECK(bound_dominated(std::vector<double>{0.05, 0.05, 0.05, 0.0}, kMask, archive, 0.1));
    CHECK_FALSE(bound_dominated(std::vector<double>{0.0, 0.0, 0.0, 0.0}, kMask, archive, 0.1));
}

TEST_CASE("prune_frontier: empty archive prunes nothing; flags follow the bound each pass")
{
    SearchGraph g("T", fresh());
    std::vector<CostedReaction> c{rxn("T", {"A"}, {0.5, 0.5, 0.5, 0}, "r1"), rxn("T", {"B"}, {0.05, 0.05, 0.05, 0}, "r2")};
    g.add_expansion(g.target(), c, testkit::stock_factory({}));
    const auto b = compute_bounds(g);
    auto report = prune_frontier(g, b, {}, 0.0);
    CHECK(report.pruned_count == 0);
    CHECK(report.frontier_size == 2);
    CHECK_FALSE(report.certified);

    const std::vector<Point> archive{{0.2, 0.2, 0.2}};
    report = prune_frontier(g, b, archive, 0.0);
    CHECK(report.pruned_count == 1);
    CHECK(g.molecule(*g.find("A")).pruned);
    CHECK_FALSE(g.molecule(*g.find("B")).pruned);
    CHECK(report.search_space_reduction_percent == doctest::Approx(50.0));

    report = prune_frontier(g, b, {}, 0.0);
    CHECK_FALSE(g.molecule(*g.find("A")).pruned);

    const std::vector<Point> strong{{0.01, 0.01, 0.01}};
    report = prune_frontier(g, b, strong, 0.0);
    CHECK(report.certified);
    const auto j = report.to_json();
    for (const char* f : {"pruned_count", "frontier_size", "certified", "epsilon", "search_space_reduction_percent"}) {
        CHECK(j.contains(f));
    }
}

TEST_CASE("property: pn never decreases as the graph grows (zero heuristics)")
{
    std::mt19937_64 rng(13);
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        SyntheticWorld world(testkit::random_world(seed));
        const auto objs = ObjectiveSet::standard();
        SearchGraph g(world.spec().target, fresh(world.in_stock(world.spec().target)));
        auto factory = [&](const MoleculeKey& k) { return fresh(world.in_stock(k)); };
        std::map<MoleculeKey, std::vector<double>> last;
        for (int step = 0; step < 30 && !g.frontier().empty(); ++step) {
            const auto pn = compute_pn(g).mol_pn;
            for (std::size_t i = 0; i < g.molecule_count(); ++i) {
                const auto& key = g.molecule(MoleculeId{static_cast<std::uint32_t>(i)}).key;
                if (auto it = last.find(key); it != last.end()) {
                    for (std::size_t d = 0; d < 4; ++d) {
                        CHECK(pn[i][d] >= it->second[d] - 1e-12);
                    }
                }
                last[key] = pn[i];
            }
            const auto frontier = g.frontier();
            const MoleculeId m = frontier[rng() % frontier.size()];
            std::vector<CostedReaction> cands;
            for (auto& rec : world.expand(g.molecule(m).key)) {
                auto cost = reaction_cost(rec, objs, world, world.agent_table());
                cands.push_back({rec, cost});
            }
            g.add_expansion(m, cands, factory);
        }
    }
}

TEST_CASE("property: V_bound is admissible and pruning is safe on small worlds")
{
    std::size_t checked = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto spec = testkit::random_world(seed, 3, 3);
        SyntheticWorld world(spec);
        const auto objs = ObjectiveSet::standard();
        const auto oracle = enumerate_routes(world, objs, spec.target, 10000);
        if (oracle.overflow) {
            continue;
        }
        std::set<MoleculeKey> on_front;
        for (std::size_t i : pareto_route_indices(oracle)) {
            on_front.insert(oracle.routes[i].molecules.begin(), oracle.routes[i].molecules.end());
        }
        Search s(testkit::certify_config(), world, objs, spec.target);
        while (true) {
            const auto b = compute_bounds(s.graph());
            for (const auto& route : oracle.routes) {
                for (const auto& key : route.molecules) {
                    auto id = s.graph().find(key);
                    if (!id) {
                        continue;
                    }
                    const auto& vb = b.mol_vbound[index(*id)];
                    for (std::size_t d = 0; d < 4; ++d) {
                        CHECK(vb[d] <= route.cost[d] + 1e-9);
                    }
                    ++checked;
                }
            }
            for (std::size_t i = 0; i < s.graph().molecule_count(); ++i) {
                const auto& node = s.graph().molecule(MoleculeId{static_cast<std::uint32_t>(i)});
                if (node.pruned) {
                    CHECK(on_front.count(node.key) == 0);
                }
            }
            if (!s.step()) {
                break;
            }
        }
        CHECK(s.stats().termination == Termination::Certified);
        CHECK(testkit::same_cost_set(s.archive().masked_costs(), true_front(oracle)));
    }
    CHECK(checked > 1000);
}
