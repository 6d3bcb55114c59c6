#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "moretro/cost_vector.hpp"
#include "moretro/weights.hpp"

namespace moretro {

namespace {

double normal_pdf(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

} // namespace

double GaussianProcess::kernel(const WeightVector& a, const WeightVector& b) const
{
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-0.5 * d2 / (hyper_.lengthscale * hyper_.lengthscale));
}

double GaussianProcess::fit_once(Hyper hyper)
{
    hyper_ = hyper;
    const auto n = static_cast<Eigen::Index>(x_.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            k(i, j) = k(j, i) = kernel(x_[static_cast<std::size_t>(i)], x_[static_cast<std::size_t>(j)]);
        }
        k(i, i) += hyper.noise_variance;
    }
    llt_.compute(k);
    if (llt_.info() != Eigen::Success) {
        return -std::numeric_limits<double>::infinity();
    }
    alpha_ = llt_.solve(y_std_);
    const Eigen::MatrixXd l = llt_.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        log_det += std::log(l(i, i));
    }
    return -0.5 * y_std_.dot(alpha_) - log_det - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

void GaussianProcess::fit(std::span<const WeightVector> x, std::span<const double> y, Hyper hyper)
{
    if (x.empty() || x.size() != y.size()) {
        throw Error("GP fit needs matching, non-empty inputs and targets");
    }
    x_.assign(x.begin(), x.end());
    const auto n = static_cast<Eigen::Index>(y.size());
    y_mean_ = 0.0;
    for (double v : y) {
        y_mean_ += v;
    }
    y_mean_ /= static_cast<double>(n);
    double var = 0.0;
    for (double v : y) {
        var += (v - y_mean_) * (v - y_mean_);
    }
    var /= static_cast<double>(n);
    degenerate_ = var <= 1e-24;
    y_scale_ = degenerate_ ? 1.0 : std::sqrt(var);
    y_std_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        y_std_(i) = (y[static_cast<std::size_t>(i)] - y_mean_) / y_scale_;
    }
    hyper.lengthscale = std::clamp(hyper.lengthscale, kMinLengthscale, kMaxLengthscale);
    hyper.noise_variance = std::max(hyper.noise_variance, 1e-6);
    lml_ = fit_once(hyper);
    if (!std::isfinite(lml_)) {
        throw Error("GP fit failed: kernel matrix is not positive definite");
    }
    fitted_ = true;
}

void GaussianProcess::fit(std::span<const WeightVector> x, std::span<const double> y)
{
    constexpr double kNoise[] = {1e-6, 1e-4, 1e-3, 1e-2, 1e-1};
    constexpr int kLengthscales = 16;
    Hyper best;
    double best_lml = -std::numeric_limits<double>::infinity();
    fit(x, y, best);
    for (int i = 0; i < kLengthscales; ++i) {
        const double t = static_cast<double>(i) / (kLengthscales - 1);
        const double ls = kMinLengthscale * std::pow(kMaxLengthscale / kMinLengthscale, t);
        for (double noise : kNoise) {
            const double lml = fit_once({ls, noise});
            if (lml > best_lml) {
                best_lml = lml;
                best = {ls, noise};
            }
        }
    }
    lml_ = fit_once(best);
}

void GaussianProcess::posterior(std::span<const WeightVector> q, Eigen::VectorXd& mean, Eigen::MatrixXd& cov) const
{
    if (!fitted_) {
        throw Error("GP has not been fitted");
    }
    const auto m = static_cast<Eigen::Index>(q.size());
    const auto n = static_cast<Eigen::Index>(x_.size());
    Eigen::MatrixXd kqx(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            kqx(i, j) = kernel(q[static_cast<std::size_t>(i)], x_[static_cast<std::size_t>(j)]);
        }
    }
    mean = kqx * alpha_;
    const Eigen::MatrixXd v = llt_.matrixL().solve(kqx.transpose());
    cov.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            cov(i, j) = cov(j, i) = kernel(q[static_cast<std::size_t>(i)], q[static_cast<std::size_t>(j)]);
        }
    }
    cov.noalias() -= v.transpose() * v;
}

GaussianProcess::Prediction GaussianProcess::predict(const WeightVector& w) const
{
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    const WeightVector q[] = {w};
    posterior(q, mean, cov);
    return {mean(0) * y_scale_ + y_mean_, std::max(0.0, cov(0, 0)) * y_scale_ * y_scale_};
}

std::vector<double> mes_gain(const GaussianProcess& gp, std::span<const WeightVector> candidates)
{
    constexpr int kSamples = 10;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    gp.posterior(candidates, mean, cov);
    const auto n = static_cast<std::size_t>(mean.size());
    std::vector<double> sd(n);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        sd[i] = std::sqrt(std::max(cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)), 1e-12));
        lo = std::min(lo, mean(static_cast<Eigen::Index>(i)) - 6.0 * sd[i]);
        hi = std::max(hi, mean(static_cast<Eigen::Index>(i)) + 6.0 * sd[i]);
    }

    // Gumbel fit to P(max <= y) = prod_i Phi((y - mu_i) / sd_i) through its quartiles
    auto max_cdf = [&](double y) {
        double log_p = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            log_p += std::log(std::max(normal_cdf((y - mean(static_cast<Eigen::Index>(i))) / sd[i]), 1e-300));
        }
        return std::exp(log_p);
    };
    auto quantile = [&](double q) {
        double a = lo;
        double b = hi;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (a + b);
            (max_cdf(mid) < q ? a : b) = mid;
        }
        return 0.5 * (a + b);
    };
    const double y25 = quantile(0.25);
    const double y50 = quantile(0.5);
    const double y75 = quantile(0.75);
    const double scale = std::max((y75 - y25) / (std::log(-std::log(0.25)) - std::log(-std::log(0.75))), 1e-9);
    const double loc = y50 + scale * std::log(-std::log(0.5));

    const double noise = gp.hyper().noise_variance;
    std::vector<double> gain(n, 0.0);
    for (int s = 0; s < kSamples; ++s) {
        const double q = (s + 0.5) / kSamples;
        const double y_star = loc - scale * std::log(-std::log(q));
        for (std::size_t i = 0; i < n; ++i) {
            const double var = sd[i] * sd[i];
            const double rho2 = var / (var + noise);
            const double gamma = std::max((y_star - mean(static_cast<Eigen::Index>(i))) / sd[i], -30.0);
            const double ratio = normal_pdf(gamma) / std::max(normal_cdf(gamma), 1e-300);
            const double shrink = std::max(1.0 - rho2 * ratio * (gamma + ratio), 1e-12);
            gain[i] += -0.5 * std::log(shrink) / kSamples;
        }
    }
    return gain;
}

std::vector<WeightVector> bo_propose(const GaussianProcess& gp, std::span<const WeightVector> candidates,
                                     std::size_t batch, std::span<const WeightVector> exclude)
{
    if (!gp.fitted()) {
        throw Error("bo_propose: surrogate has not been fitted");
    }
    if (candidates.empty()) {
        throw Error("bo_propose: no candidates");
    }
    std::vector<WeightVector> pool;
    for (const auto& c : candidates) {
        if (std::find(exclude.begin(), exclude.end(), c) == exclude.end() &&
            std::find(pool.begin(), pool.end(), c) == pool.end()) {
            pool.push_back(c);
        }
    }
    std::vector<double> gain = gp.degenerate() ? std::vector<double>(pool.size(), 0.0) : mes_gain(gp, pool);

    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    gp.posterior(pool, mean, cov);
    const auto n = static_cast<Eigen::Index>(pool.size());
    const double noise = gp.hyper().noise_variance;
    Eigen::MatrixXd corr(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            corr(i, j) = cov(i, j) / std::sqrt((std::max(cov(i, i), 0.0) + noise) * (std::max(cov(j, j), 0.0) + noise));
        }
        corr(i, i) = 1.0;
    }

    std::vector<Eigen::Index> chosen;
    std::vector<bool> taken(pool.size(), false);
    while (chosen.size() < batch && chosen.size() < pool.size()) {
        const auto b = static_cast<Eigen::Index>(chosen.size());
        Eigen::MatrixXd cbb(b, b);
        for (Eigen::Index r = 0; r < b; ++r) {
            for (Eigen::Index c = 0; c < b; ++c) {
                cbb(r, c) = corr(chosen[static_cast<std::size_t>(r)], chosen[static_cast<std::size_t>(c)]);
            }
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(cbb);
        Eigen::Index best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (taken[static_cast<std::size_t>(i)]) {
                continue;
            }
            // marginal change of 0.5 logdet is 0.5 log of the Schur complement
            double schur = 1.0;
            if (b > 0) {
                Eigen::VectorXd cib(b);
                for (Eigen::Index r = 0; r < b; ++r) {
                    cib(r) = corr(i, chosen[static_cast<std::size_t>(r)]);
                }
                schur -= cib.dot(ldlt.solve(cib));
            }
            const double score = 0.5 * std::log(std::max(schur, 1e-300)) + gain[static_cast<std::size_t>(i)];
            if (score > best_score) {
                best_score = score;
                best = i;
            }
        }
        if (best < 0) {
            break;
        }
        taken[static_cast<std::size_t>(best)] = true;
        chosen.push_back(best);
    }
    std::vector<WeightVector> out;
    for (Eigen::Index i : chosen) {
        out.push_back(pool[static_cast<std::size_t>(i)]);
    }
    return out;
}

} // namespace moretro
