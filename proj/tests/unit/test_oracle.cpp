#include <doctest.h>

#include "../support.hpp"

using namespace moretro;

namespace {

// Hand table over explicit rows; every mentioned molecule gets default properties.
TemplateTable hand_table(const std::vector<std::pair<std::string, std::vector<std::string>>>& edges,
                         std::set<MoleculeKey> stock)
{
    std::vector<TemplateTable::Row> rows;
    std::map<MoleculeKey, MoleculeProperties> props;
    int n = 0;
    for (const auto& [product, reactants] : edges) {
        TemplateTable::Row row;
        row.product = product;
        row.reactants = reactants;
        row.probability = 0.9 - 0.01 * n;
        row.rule_id = "r" + std::to_string(n++);
        rows.push_back(row);
        props[product] = {};
        for (const auto& r : reactants) {
            props[r] = {};
        }
    }
    for (const auto& s : stock) {
        props[s] = {};
    }
    return TemplateTable(rows, std::move(stock), props, AgentTable{}, 25);
}

// Complete binary chain: every non-leaf has two unary reactions to distinct children.
TemplateTable binary_chain(int depth)
{
    std::vector<std::pair<std::string, std::vector<std::string>>> edges;
    std::set<MoleculeKey> stock;
    std::vector<std::string> level{"T"};
    for (int d = 0; d < depth; ++d) {
        std::vector<std::string> next;
        for (const auto& m : level) {
            for (int c = 0; c < 2; ++c) {
                const auto child = m + std::to_string(c);
                edges.push_back({m, {child}});
                next.push_back(child);
            }
        }
        level = next;
    }
    stock.insert(level.begin(), level.end());
    return hand_table(edges, stock);
}

} // namespace

TEST_CASE("oracle: stock target has exactly the empty route")
{
    const auto table = hand_table({}, {"T"});
    const auto e = enumerate_routes(table, ObjectiveSet::standard(), "T");
    REQUIRE(e.routes.size() == 1);
    CHECK(e.routes[0].reactions.empty());
    CHECK(e.routes[0].cost == std::vector<double>(4, 0.0));
    CHECK(true_front(e).size() == 1);
}

TEST_CASE("oracle: hand-countable route sets")
{
    const auto chain = binary_chain(3);
    const auto e = enumerate_routes(chain, ObjectiveSet::standard(), "T");
    CHECK(e.routes.size() == 8);
    CHECK_FALSE(e.overflow);

    // T -> A + B | A + C ; A -> S1 | S2 ; B and C in stock: 2 x 2 trees
    const auto shared = hand_table({{"T", {"A", "B"}}, {"T", {"A", "C"}}, {"A", {"S1"}}, {"A", {"S2"}}},
                                   {"B", "C", "S1", "S2"});
    const auto s = enumerate_routes(shared, ObjectiveSet::standard(), "T");
    CHECK(s.routes.size() == 4);
    for (const auto& r : s.routes) {
        CHECK(r.reactions.size() == 2);
        CHECK(r.molecules.count("A") == 1);
    }

    // dead branch contributes nothing
    const auto dead = hand_table({{"T", {"X"}}, {"T", {"S"}}}, {"S"});
    CHECK(enumerate_routes(dead, ObjectiveSet::standard(), "T").routes.size() == 1);
}

TEST_CASE("oracle: overflow handling")
{
    const auto chain = binary_chain(4);
    const auto e = enumerate_routes(chain, ObjectiveSet::standard(), "T", 5);
    CHECK(e.overflow);
    CHECK(e.routes.size() == 5);
    CHECK_THROWS_AS(true_front(e), Error);
    CHECK_THROWS_AS(enumerate_routes(chain, ObjectiveSet::standard(), "T", 5, true), OracleOverflow);
    CHECK(enumerate_routes(chain, ObjectiveSet::standard(), "T", 16).routes.size() == 16);
}

TEST_CASE("oracle: scalar optimum, front and dump agree on synthetic worlds")
{
    const auto objs = ObjectiveSet::standard();
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const auto spec = testkit::random_world(seed, 3, 3);
        SyntheticWorld world(spec);
        const auto e = enumerate_routes(world, objs, spec.target, 20000);
        if (e.overflow) {
            continue;
        }
        REQUIRE_FALSE(e.routes.empty());
        const auto front = true_front(e);
        for (std::size_t d = 0; d < 3; ++d) {
            std::vector<double> basis(4, 0.0);
            basis[d] = 1.0;
            double best = testkit::kInf;
            for (const auto& r : e.routes) {
                best = std::min(best, r.cost[d]);
            }
            CHECK(scalar_optimum(e, basis) == doctest::Approx(best).epsilon(1e-12));
        }
        // any masked weight attains its optimum on the front
        const std::vector<double> w{0.2, 0.5, 0.3, 0.0};
        double front_best = testkit::kInf;
        for (const auto& f : front) {
            front_best = std::min(front_best, 0.2 * f[0] + 0.5 * f[1] + 0.3 * f[2]);
        }
        CHECK(scalar_optimum(e, w) == doctest::Approx(front_best).epsilon(1e-12));

        for (const auto& f : front) {
            for (const auto& r : e.routes) {
                CHECK_FALSE(strictly_dominates(project(r.cost, e.mask), f));
            }
        }
        const auto j = dump(e);
        CHECK(j.at("routes").size() == e.routes.size());
        CHECK(j.at("front_indices").size() == pareto_route_indices(e).size());

        for (const auto& r : e.routes) {
            std::vector<double> sum(4, 0.0);
            for (std::size_t i : r.reactions) {
                for (std::size_t k = 0; k < 4; ++k) {
                    sum[k] += e.reactions[i].cost[k];
                }
            }
            for (std::size_t k = 0; k < 4; ++k) {
                CHECK(r.cost[k] == doctest::Approx(sum[k]).epsilon(1e-12));
            }
            CHECK(r.molecules.count(spec.target) == 1);
        }
    }
    CHECK(scalar_optimum(EnumeratedWorld{}, {1, 0, 0, 0}) == testkit::kInf);
}
