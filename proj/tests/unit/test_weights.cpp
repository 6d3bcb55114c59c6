#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include "../support.hpp"
#include "moretro/weights.hpp"

using namespace moretro;

namespace {

// Brute-force count of lattice points with step 1/n on the dims-simplex.
std::size_t lattice_count(int n, std::size_t dims)
{
    std::size_t count = 0;
    std::function<void(std::size_t, int)> rec = [&](std::size_t d, int left) {
        if (d + 1 == dims) {
            ++count;
            return;
        }
        for (int k = 0; k <= left; ++k) {
            rec(d + 1, left - k);
        }
    };
    rec(0, n);
    return count;
}

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

double log_det(const Eigen::MatrixXd& m)
{
    return std::log(m.determinant());
}

} // namespace

TEST_CASE("weight vectors must lie on the simplex")
{
    CHECK_NOTHROW(WeightVector({0.25, 0.25, 0.25, 0.25}));
    CHECK_THROWS_AS(WeightVector({0.5, 0.6}), Error);
    CHECK_THROWS_AS(WeightVector({1.5, -0.5}), Error);
    CHECK_THROWS_AS(WeightVector({0.5, 0.5 + 1e-10}), Error);
}

TEST_CASE("grid pool sizes and order")
{
    CHECK(grid_pool(1.0 / 3.0, 4).size() == 20);
    CHECK(grid_pool(0.33, 4).size() == 20);
    const auto two = grid_pool(0.5, 2);
    REQUIRE(two.size() == 3);
    CHECK(two[0].values() == std::vector<double>{1, 0});
    CHECK(two[1].values() == std::vector<double>{0.5, 0.5});
    CHECK(two[2].values() == std::vector<double>{0, 1});
    CHECK_THROWS_AS(grid_pool(0.3, 4), Error);
    CHECK_THROWS_AS(grid_pool(0.0, 4), Error);

    for (int n = 1; n <= 10; ++n) {
        for (std::size_t dims = 2; dims <= 5; ++dims) {
            const auto pool = grid_pool(1.0 / n, dims);
            CHECK(pool.size() == lattice_count(n, dims));
            CHECK(static_cast<double>(pool.size()) == binomial(n + static_cast<int>(dims) - 1, static_cast<int>(dims) - 1));
            CHECK(std::set<WeightVector>(pool.begin(), pool.end()).size() == pool.size());
        }
    }
}

TEST_CASE("warm-up grid keeps guidance-heavy lattice points")
{
    const auto warm = warmup_grid(4, 3);
    CHECK(warm.size() == 10);
    std::size_t brute = 0;
    for (int a = 0; a <= 4; ++a) {
        for (int b = 0; a + b <= 4; ++b) {
            for (int c = 0; a + b + c <= 4; ++c) {
                brute += (4 - a - b - c) >= 2 ? 1 : 0;
            }
        }
    }
    CHECK(warm.size() == brute);
    for (const auto& w : warm) {
        CHECK(w[3] >= 0.5);
    }
}

TEST_CASE("sobol pool: counts, extremes, simplex closure, determinism")
{
    const auto pool = sobol_pool(32, 4, 9, true);
    REQUIRE(pool.size() == 36);
    for (std::size_t i = 0; i < 4; ++i) {
        std::vector<double> unit(4, 0.0);
        unit[i] = 1.0;
        CHECK(pool[32 + i].values() == unit);
    }
    for (const auto& w : pool) {
        double s = 0.0;
        for (double x : w.values()) {
            CHECK(x >= 0.0);
            s += x;
        }
        CHECK(std::abs(s - 1.0) <= 1e-12);
    }
    CHECK(sobol_pool(32, 4, 9, true) == pool);
    CHECK(sobol_pool(32, 4, 10, true) != pool);
    CHECK(sobol_pool(32, 4, 9, false).size() == 32);
    CHECK(std::set<WeightVector>(pool.begin(), pool.end()).size() == pool.size());

    // low discrepancy: mean of each component close to 1/4
    const auto big = sobol_pool(1024, 4, 1, false);
    for (std::size_t i = 0; i < 4; ++i) {
        double m = 0.0;
        for (const auto& w : big) {
            m += w[i];
        }
        CHECK(m / static_cast<double>(big.size()) == doctest::Approx(0.25).epsilon(0.02));
    }
}

TEST_CASE("utility decay")
{
    CHECK(decay_utility(0.2, 1, 0.5, 2) == doctest::Approx(0.1));
    CHECK(decay_utility(0.2, 3, 0.5, 2) == 0.0);
    CHECK(decay_utility(0.2, 0, 0.5, 2) == 0.2);
    CHECK(decay_utility(0.2, 2, 0.5, 2) == doctest::Approx(0.05));
}

TEST_CASE("GP surrogate: non-negative variance, interpolation, bounded lengthscale")
{
    std::mt19937_64 rng(3);
    const auto pool = sobol_pool(24, 4, 5, false);
    std::vector<WeightVector> x(pool.begin(), pool.begin() + 12);
    std::vector<double> y;
    for (const auto& w : x) {
        y.push_back(std::sin(3 * w[0]) + w[1] * w[2]);
    }
    GaussianProcess gp;
    CHECK_FALSE(gp.fitted());
    gp.fit(x, y);
    CHECK(gp.fitted());
    CHECK(gp.hyper().lengthscale >= GaussianProcess::kMinLengthscale);
    CHECK(gp.hyper().lengthscale <= GaussianProcess::kMaxLengthscale);
    const double noise_sd = std::sqrt(gp.hyper().noise_variance) * gp.target_scale();
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(std::abs(gp.predict(x[i]).mean - y[i]) <= 3 * noise_sd + 1e-9);
    }
    for (const auto& w : pool) {
        CHECK(gp.predict(w).variance >= 0.0);
    }
    for (int i = 0; i < 200; ++i) {
        CHECK(gp.predict(testkit::random_weight(rng, 4)).variance >= 0.0);
    }

    // the selected hyperparameters maximize the likelihood over the grid
    GaussianProcess other;
    other.fit(x, y, {0.3, 1e-2});
    CHECK(other.log_marginal_likelihood() <= gp.log_marginal_likelihood() + 1e-9);
}

TEST_CASE("bo_propose: diversity-only batch when utilities are flat")
{
    const auto candidates = grid_pool(0.25, 4);
    const auto warm = warmup_grid(4, 3);
    std::vector<double> zeros(warm.size(), 0.0);
    GaussianProcess gp;
    gp.fit(warm, zeros);
    CHECK(gp.degenerate());

    const auto batch = bo_propose(gp, candidates, 5);
    REQUIRE(batch.size() == 5);
    CHECK(std::set<WeightVector>(batch.begin(), batch.end()).size() == 5);
    // each greedy pick maximizes the log-det of the batch's posterior correlation
    for (std::size_t step = 1; step < batch.size(); ++step) {
        auto logdet_with = [&](const WeightVector& c) {
            std::vector<WeightVector> b(batch.begin(), batch.begin() + static_cast<std::ptrdiff_t>(step));
            b.push_back(c);
            Eigen::VectorXd mean;
            Eigen::MatrixXd cov;
            gp.posterior(b, mean, cov);
            Eigen::VectorXd d = cov.diagonal().cwiseSqrt().cwiseInverse();
            return log_det(d.asDiagonal() * cov * d.asDiagonal());
        };
        double best = -INFINITY;
        for (const auto& c : candidates) {
            if (std::find(batch.begin(), batch.begin() + static_cast<std::ptrdiff_t>(step), c) ==
                batch.begin() + static_cast<std::ptrdiff_t>(step)) {
                best = std::max(best, logdet_with(c));
            }
        }
        CHECK(logdet_with(batch[step]) >= best - 1e-8);
    }
}

TEST_CASE("bo_propose: a high-utility region attracts a batch member")
{
    const auto candidates = sobol_pool(128, 4, 77, true);
    const WeightVector peak({0.6, 0.1, 0.1, 0.2});
    std::vector<WeightVector> x = warmup_grid(4, 3);
    for (const auto& w : sobol_pool(20, 4, 4, false)) {
        x.push_back(w);
    }
    x.push_back(peak);
    std::vector<double> y;
    for (const auto& w : x) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            d2 += (w[i] - peak[i]) * (w[i] - peak[i]);
        }
        y.push_back(std::exp(-d2 / 0.02));
    }
    GaussianProcess gp;
    gp.fit(x, y);
    std::vector<double> means;
    for (const auto& c : candidates) {
        means.push_back(gp.predict(c).mean);
    }
    std::vector<double> sorted = means;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double decile = sorted[sorted.size() / 10];

    const auto batch = bo_propose(gp, candidates, 5);
    bool hit = false;
    for (const auto& b : batch) {
        const auto it = std::find(candidates.begin(), candidates.end(), b);
        REQUIRE(it != candidates.end());
        hit = hit || means[static_cast<std::size_t>(it - candidates.begin())] >= decile;
    }
    CHECK(hit);
}

TEST_CASE("bo_propose: batch of one is the acquisition argmax, duplicates and unfitted GP")
{
    const auto candidates = sobol_pool(64, 4, 3, true);
    std::vector<WeightVector> x = warmup_grid(4, 3);
    std::vector<double> y;
    for (const auto& w : x) {
        y.push_back(w[0] + 0.3 * w[1]);
    }
    GaussianProcess gp;
    gp.fit(x, y);
    const auto gain = mes_gain(gp, candidates);
    const auto best = static_cast<std::size_t>(std::max_element(gain.begin(), gain.end()) - gain.begin());
    const auto one = bo_propose(gp, candidates, 1);
    REQUIRE(one.size() == 1);
    CHECK(gain[static_cast<std::size_t>(std::find(candidates.begin(), candidates.end(), one[0]) - candidates.begin())] ==
          doctest::Approx(gain[best]));

    std::vector<WeightVector> doubled = candidates;
    doubled.insert(doubled.end(), candidates.begin(), candidates.end());
    const auto batch = bo_propose(gp, doubled, 8, one);
    CHECK(std::set<WeightVector>(batch.begin(), batch.end()).size() == batch.size());
    CHECK(std::find(batch.begin(), batch.end(), one[0]) == batch.end());

    GaussianProcess unfitted;
    CHECK_THROWS_AS(bo_propose(unfitted, candidates, 2), Error);
}

TEST_CASE("pool schedule: resample timing and grid exhaustion")
{
    CHECK(WeightPool::resample_due(12, 12));
    CHECK_FALSE(WeightPool::resample_due(13, 12));
    CHECK_FALSE(WeightPool::resample_due(0, 12));

    PoolConfig cfg;
    cfg.strategy = SamplingStrategy::Grid;
    cfg.n_active = 5;
    WeightPool pool(cfg, 4, 3);
    std::set<WeightVector> seen(pool.active().begin(), pool.active().end());
    CHECK_THROWS_AS(pool.resample(13, 12, {}), ContractViolation);
    CHECK(pool.resample(16, 16, {}));
    CHECK(pool.resample(32, 16, {}));
    CHECK(pool.resample(48, 16, {}));
    for (const auto& w : pool.active()) {
        seen.insert(w);
    }
    CHECK_FALSE(pool.exhausted());
    CHECK_FALSE(pool.resample(64, 16, {}));
    CHECK(pool.exhausted());
    CHECK(pool.resamples() == 4);

    PoolConfig sob;
    sob.strategy = SamplingStrategy::Sobol;
    WeightPool s(sob, 4, 3);
    std::set<WeightVector> all(s.active().begin(), s.active().end());
    std::size_t k = 10;
    while (s.resample(k, 10, {})) {
        for (const auto& w : s.active()) {
            CHECK(all.insert(w).second);
        }
        k += 10;
    }
    CHECK(all.size() == 36);
}

TEST_CASE("BO pool: warm-up batches, ageing and expiry of stale utilities")
{
    PoolConfig cfg;
    cfg.strategy = SamplingStrategy::BO;
    cfg.seed = 4;
    WeightPool pool(cfg, 4, 3);
    const auto warm = warmup_grid(4, 3);
    CHECK(std::vector<WeightVector>(warm.begin(), warm.begin() + 5) == pool.active());

    const WeightVector first = pool.active()[0];
    pool.resample(12, 12, std::vector<double>{0.2, 0, 0, 0, 0});
    CHECK(std::vector<WeightVector>(warm.begin() + 5, warm.end()) == pool.active());
    REQUIRE(pool.history().size() == 5);
    CHECK(pool.decayed_utilities()[0] == doctest::Approx(0.2));

    for (std::size_t r = 2; r <= 4; ++r) {
        pool.resample(12 * r, 12, std::vector<double>(5, 0.0));
        CHECK(pool.active().size() == 5);
        CHECK(std::set<WeightVector>(pool.active().begin(), pool.active().end()).size() == 5);
    }
    const auto& h = pool.history();
    const auto it = std::find_if(h.begin(), h.end(), [&](const UtilityRecord& u) { return u.weight == first; });
    REQUIRE(it != h.end());
    CHECK(it->age == 3);
    CHECK(pool.decayed_utilities()[static_cast<std::size_t>(it - h.begin())] == 0.0);
}

TEST_CASE("fixed pool never changes")
{
    PoolConfig cfg;
    cfg.strategy = SamplingStrategy::Fixed;
    WeightPool pool(cfg, 4, 3);
    REQUIRE(pool.active().size() == 1);
    CHECK(pool.active()[0].values() == std::vector<double>{0.2, 0.2, 0.2, 0.4});
    CHECK(pool.resample(12, 12, {}));
    CHECK(pool.active()[0].values() == std::vector<double>{0.2, 0.2, 0.2, 0.4});
    cfg.fixed_weights = {{0.5, 0.5}};
    CHECK_THROWS_AS(WeightPool(cfg, 4, 3), Error);
}
