#include <doctest.h>

#include <random>

#include "../support.hpp"
#include "moretro/metrics.hpp"

using namespace moretro;

namespace {

std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n, std::size_t d)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> pts(n, Point(d));
    for (auto& p : pts) {
        for (double& x : p) {
            x = std::round(u(rng) * 8.0) / 8.0; // coarse grid forces ties and duplicates
        }
    }
    return pts;
}

// Inclusion-exclusion over every non-empty subset: the union of boxes [p, ref].
double hv_inclusion_exclusion(const std::vector<Point>& pts, const std::vector<double>& ref)
{
    const std::size_t n = pts.size();
    double total = 0.0;
    for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
        Point corner(ref.size(), 0.0);
        int bits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1U << i)) {
                ++bits;
                for (std::size_t k = 0; k < ref.size(); ++k) {
                    corner[k] = std::max(corner[k], pts[i][k]);
                }
            }
        }
        double vol = 1.0;
        for (std::size_t k = 0; k < ref.size(); ++k) {
            vol *= std::max(0.0, ref[k] - corner[k]);
        }
        total += (bits % 2 == 1 ? 1.0 : -1.0) * vol;
    }
    return total;
}

Route route_of(std::vector<std::string> rules)
{
    Route r;
    r.target = "T";
    for (const auto& rule : rules) {
        r.reactions.push_back(testkit::rxn("T", {"A"}, {0, 0, 0, 0}, rule));
    }
    return r;
}

} // namespace

TEST_CASE("nd_filter: examples and brute force")
{
    const std::vector<Point> pts{{0.2, 0.5}, {0.5, 0.2}, {0.6, 0.6}, {0.2, 0.5}, {0.1, 0.9}};
    CHECK(nd_filter_indices(pts) == std::vector<std::size_t>{0, 1, 4});

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const auto p = random_points(rng, 50, 3);
        std::vector<Point> expect;
        for (std::size_t i = 0; i < p.size(); ++i) {
            bool dominated = false;
            bool duplicate = false;
            for (std::size_t j = 0; j < p.size(); ++j) {
                dominated = dominated || strictly_dominates(p[j], p[i]);
                duplicate = duplicate || (j < i && p[j] == p[i]);
            }
            if (!dominated && !duplicate) {
                expect.push_back(p[i]);
            }
        }
        CHECK(nd_filter(p) == expect);
    }
}

TEST_CASE("hypervolume: reference values and an inclusion-exclusion oracle")
{
    const std::vector<double> ref(3, 1.1);
    CHECK(hypervolume(std::vector<Point>{{0, 0, 0}}, ref) == doctest::Approx(1.331).epsilon(1e-12));
    CHECK(hypervolume(std::vector<Point>{{0.5, 0.5, 0.5}}, ref) == doctest::Approx(0.216).epsilon(1e-12));
    CHECK(hypervolume(std::vector<Point>{}, ref) == 0.0);

    std::size_t clamped = 0;
    CHECK(hypervolume(std::vector<Point>{{1.5, 0.1, 0.1}}, ref, &clamped) == 0.0);
    CHECK(clamped == 1);

    std::mt19937_64 rng(11);
    for (std::size_t d = 1; d <= 4; ++d) {
        const std::vector<double> r(d, 1.1);
        for (int trial = 0; trial < 60; ++trial) {
            const auto pts = random_points(rng, 1 + trial % 9, d);
            const double hv = hypervolume(pts, r);
            CHECK(hv == doctest::Approx(hv_inclusion_exclusion(pts, r)).epsilon(1e-10));
            CHECK(hypervolume(nd_filter(pts), r) == doctest::Approx(hv).epsilon(1e-12));
            auto more = pts;
            more.push_back(random_points(rng, 1, d)[0]);
            CHECK(hypervolume(more, r) >= hv - 1e-12);
        }
    }
    CHECK_THROWS_AS(hypervolume(std::vector<Point>{{0, 0, 0, 0, 0}}, std::vector<double>(5, 1.1)), Error);
}

TEST_CASE("R2: reference values, monotonicity and dominated points")
{
    CHECK(*r2_indicator(std::vector<Point>{{0, 0, 0}}) == doctest::Approx(0.0));
    CHECK(*r2_indicator(std::vector<Point>{{0.5, 0.5, 0.5}}) == doctest::Approx(0.5));
    CHECK_FALSE(r2_indicator(std::vector<Point>{}));

    const auto w = r2_weights(3);
    CHECK(w.size() == 66);
    for (const auto& v : w) {
        CHECK(*std::max_element(v.begin(), v.end()) == doctest::Approx(1.0));
    }

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        auto pts = random_points(rng, 6, 3);
        const double base = *r2_indicator(pts);
        auto better = pts;
        better.push_back(random_points(rng, 1, 3)[0]);
        CHECK(*r2_indicator(better) <= base + 1e-12);
        CHECK(*r2_indicator(nd_filter(pts)) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("dominance coverage")
{
    const std::vector<Point> a{{0.1, 0.1}};
    const std::vector<Point> b{{0.5, 0.5}, {0.05, 0.9}};
    auto c = dominance_coverage(a, a);
    CHECK(c.b_dominated_by_a == 0.0);
    CHECK(c.a_dominated_by_b == 0.0);
    c = dominance_coverage(a, b);
    CHECK(c.b_dominated_by_a == doctest::Approx(50.0));
    CHECK(c.a_dominated_by_b == 0.0);
    c = dominance_coverage(std::vector<Point>{{0, 0}}, std::vector<Point>{{1, 1}});
    CHECK(c.b_dominated_by_a == 100.0);

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto x = random_points(rng, 10, 3);
        const auto y = random_points(rng, 7, 3);
        std::size_t n = 0;
        for (const auto& q : y) {
            n += std::any_of(x.begin(), x.end(), [&](const Point& p) { return strictly_dominates(p, q); }) ? 1 : 0;
        }
        CHECK(dominance_coverage(x, y).b_dominated_by_a == doctest::Approx(100.0 * static_cast<double>(n) / 7.0));
    }
}

TEST_CASE("percentile normalization")
{
    CHECK(percentile({1, 2, 3, 4}, 50) == doctest::Approx(2.5));
    CHECK(percentile({1, 2, 3, 4, 5}, 5) == doctest::Approx(1.2));
    CHECK(percentile({7}, 95) == 7.0);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> pts;
    for (int i = 0; i < 1000; ++i) {
        pts.push_back({u(rng), 0.3});
    }
    const auto norm = percentile_normalize(pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double expect = std::clamp((pts[i][0] - 0.05) / 0.9, 0.0, 1.0);
        CHECK(std::abs(norm[i][0] - expect) < 0.02);
        CHECK(norm[i][1] == 0.0);
        CHECK(norm[i][0] >= 0.0);
        CHECK(norm[i][0] <= 1.0);
    }
    CHECK(percentile_normalize(std::vector<Point>{{0.4, 0.7}}) == std::vector<Point>{{0.0, 0.0}});
}

TEST_CASE("route dissimilarity")
{
    CHECK(route_dissimilarity(route_of({"r1", "r2"}), route_of({"r2", "r1"})) == 0.0);
    CHECK(route_dissimilarity(route_of({"r1"}), route_of({"r2"})) == 1.0);
    CHECK(route_dissimilarity(route_of({"r1", "r2"}), route_of({"r2", "r3"})) == doctest::Approx(2.0 / 3.0));
    CHECK(route_dissimilarity(route_of({}), route_of({})) == 0.0);
}
