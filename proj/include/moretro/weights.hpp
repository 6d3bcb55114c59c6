#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace moretro {

/// Point on the probability simplex.
class WeightVector {
public:
    static constexpr double kSumTolerance = 1e-12;

    WeightVector() = default;
    /// Throws Error unless components are >= 0 and sum to 1 within kSumTolerance.
    explicit WeightVector(std::vector<double> w);

    std::size_t size() const { return w_.size(); }
    double operator[](std::size_t i) const { return w_[i]; }
    const std::vector<double>& values() const { return w_; }

    bool operator==(const WeightVector&) const = default;
    auto operator<=>(const WeightVector&) const = default;

private:
    std::vector<double> w_;
};

/// Simplex lattice with step `resolution` (1/resolution must be an integer within 0.05),
/// largest first component first.
std::vector<WeightVector> grid_pool(double resolution, std::size_t dims);

/// Lattice {0, 1/(levels-1), ..., 1}^dims on the simplex with w[guidance_index] >= min_guidance.
std::vector<WeightVector> warmup_grid(std::size_t dims, std::size_t guidance_index, std::size_t levels = 5,
                                      double min_guidance = 0.5);

/// `count` digitally shifted Sobol points mapped to the simplex by sorted gaps, duplicates
/// skipped, followed by the `dims` unit vectors when `extremes` is set.
std::vector<WeightVector> sobol_pool(std::size_t count, std::size_t dims, std::uint64_t seed, bool extremes = true);

/// lambda^tau * u0, or 0 once tau exceeds tau_max.
double decay_utility(double u0, int tau, double lambda, int tau_max);

/// Zero-mean GP with RBF kernel over weight vectors, fitted on standardized targets.
class GaussianProcess {
public:
    struct Hyper {
        double lengthscale = 0.2;
        double noise_variance = 1e-6;
    };
    struct Prediction {
        double mean = 0.0;
        double variance = 0.0;
    };

    static constexpr double kMinLengthscale = 0.05;
    static constexpr double kMaxLengthscale = 0.5;

    /// Selects lengthscale and noise by log marginal likelihood over a fixed grid.
    void fit(std::span<const WeightVector> x, std::span<const double> y);
    /// Fits with fixed hyperparameters.
    void fit(std::span<const WeightVector> x, std::span<const double> y, Hyper hyper);

    bool fitted() const { return fitted_; }
    const Hyper& hyper() const { return hyper_; }
    /// Spread of the observed targets (0 when all equal).
    double target_scale() const { return y_scale_; }
    bool degenerate() const { return degenerate_; }

    /// Prediction in the original target units (variance excludes observation noise).
    Prediction predict(const WeightVector& w) const;
    /// Posterior mean and covariance of the latent function in standardized units.
    void posterior(std::span<const WeightVector> q, Eigen::VectorXd& mean, Eigen::MatrixXd& cov) const;

    double log_marginal_likelihood() const { return lml_; }
    double kernel(const WeightVector& a, const WeightVector& b) const;

private:
    double fit_once(Hyper hyper);

    std::vector<WeightVector> x_;
    Eigen::VectorXd y_std_;
    double y_mean_ = 0.0;
    double y_scale_ = 1.0;
    bool degenerate_ = false;
    Hyper hyper_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
    double lml_ = 0.0;
    bool fitted_ = false;
};

/// Greedy batch selection: 0.5 logdet of the batch's predictive correlation plus the summed
/// max-value-entropy gain of its members. Candidates already in `exclude` are skipped.
std::vector<WeightVector> bo_propose(const GaussianProcess& gp, std::span<const WeightVector> candidates,
                                     std::size_t batch, std::span<const WeightVector> exclude = {});

/// Per-point max-value-entropy gain used by bo_propose (exposed for tests).
std::vector<double> mes_gain(const GaussianProcess& gp, std::span<const WeightVector> candidates);

enum class SamplingStrategy { Grid, Sobol, BO, Fixed };
std::string to_string(SamplingStrategy s);
SamplingStrategy sampling_strategy_from_string(const std::string& s);

enum class CandidateSource { Sobol, Grid };

struct PoolConfig {
    SamplingStrategy strategy = SamplingStrategy::BO;
    std::size_t n_active = 5;
    std::uint64_t seed = 0;
    double grid_resolution = 0.33;
    std::size_t sobol_count = 32;
    bool sobol_extremes = true;
    std::size_t warmup_batches = 2;
    CandidateSource candidate_source = CandidateSource::Sobol;
    std::size_t bo_candidates = 128;
    double candidate_grid_resolution = 0.1;
    double decay = 0.5;
    int max_age = 2;
    /// Used by the Fixed strategy.
    std::vector<std::vector<double>> fixed_weights = {{0.2, 0.2, 0.2, 0.4}};

    bool operator==(const PoolConfig&) const = default;
};

struct UtilityRecord {
    WeightVector weight;
    double u0 = 0.0;
    int age = 0;
};

/// Active weight set plus the sampler state that produces its successors.
class WeightPool {
public:
    WeightPool(PoolConfig config, std::size_t dims, std::size_t guidance_index);

    const std::vector<WeightVector>& active() const { return active_; }
    bool exhausted() const { return exhausted_; }
    const PoolConfig& config() const { return config_; }
    const std::vector<UtilityRecord>& history() const { return history_; }
    std::size_t resamples() const { return resamples_; }

    static bool resample_due(std::size_t k, std::size_t w_budget) { return w_budget > 0 && k > 0 && k % w_budget == 0; }

    /// Draws the next active set. `hv_feedback[j]` is the hypervolume gained while active weight j
    /// was in use. Throws ContractViolation when !resample_due(k, w_budget).
    /// Returns false when a finite pool ran out (active set left unchanged, exhausted set).
    bool resample(std::size_t k, std::size_t w_budget, std::span<const double> hv_feedback);

    /// Decayed utilities of the history, in history order.
    std::vector<double> decayed_utilities() const;

private:
    void record_feedback(std::span<const double> hv_feedback);
    bool take_next_batch();

    PoolConfig config_;
    std::size_t dims_;
    std::size_t guidance_index_;
    std::vector<WeightVector> queue_;
    std::size_t next_ = 0;
    std::vector<WeightVector> active_;
    std::vector<UtilityRecord> history_;
    std::vector<WeightVector> candidates_;
    bool exhausted_ = false;
    std::size_t resamples_ = 0;
};

} // namespace moretro
