#include "moretro/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/random/sobol.hpp>

#include "moretro/cost_vector.hpp"
#include "moretro/expansion.hpp"

namespace moretro {

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w))
{
    if (w_.empty()) {
        throw Error("weight vector is empty");
    }
    double sum = 0.0;
    for (double x : w_) {
        if (!(x >= 0.0)) {
            throw Error("weight vector has a negative or NaN component: " + to_string(w_));
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        throw Error("weight vector does not sum to 1: " + to_string(w_));
    }
}

namespace {

void compositions(int remaining, std::size_t slot, std::vector<int>& parts, std::vector<std::vector<int>>& out)
{
    if (slot + 1 == parts.size()) {
        parts[slot] = remaining;
        out.push_back(parts);
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        parts[slot] = v;
        compositions(remaining - v, slot + 1, parts, out);
    }
}

std::vector<WeightVector> lattice(int steps, std::size_t dims)
{
    if (dims == 0) {
        throw Error("weight lattice needs at least one dimension");
    }
    std::vector<std::vector<int>> parts;
    std::vector<int> scratch(dims, 0);
    compositions(steps, 0, scratch, parts);
    std::vector<WeightVector> out;
    out.reserve(parts.size());
    for (const auto& p : parts) {
        std::vector<double> w(dims);
        // last component absorbs rounding so the sum is exact to machine precision
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < dims; ++i) {
            w[i] = static_cast<double>(p[i]) / steps;
            sum += w[i];
        }
        w[dims - 1] = p[dims - 1] == 0 ? 0.0 : std::max(0.0, 1.0 - sum);
        out.emplace_back(std::move(w));
    }
    return out;
}

} // namespace

std::vector<WeightVector> grid_pool(double resolution, std::size_t dims)
{
    if (!(resolution > 0.0 && resolution <= 1.0)) {
        throw Error("grid resolution must lie in (0, 1]");
    }
    const double inv = 1.0 / resolution;
    const double steps = std::round(inv);
    if (std::abs(inv - steps) > 0.05) {
        throw Error("grid resolution " + std::to_string(resolution) + " does not divide 1 into integer steps");
    }
    return lattice(static_cast<int>(steps), dims);
}

std::vector<WeightVector> warmup_grid(std::size_t dims, std::size_t guidance_index, std::size_t levels,
                                      double min_guidance)
{
    if (levels < 2 || guidance_index >= dims) {
        throw Error("warm-up grid needs >= 2 levels and a valid guidance index");
    }
    std::vector<WeightVector> out;
    for (auto& w : lattice(static_cast<int>(levels - 1), dims)) {
        if (w[guidance_index] >= min_guidance - 1e-12) {
            out.push_back(std::move(w));
        }
    }
    return out;
}

std::vector<WeightVector> sobol_pool(std::size_t count, std::size_t dims, std::uint64_t seed, bool extremes)
{
    if (count == 0) {
        throw Error("sobol pool needs count >= 1");
    }
    if (dims < 2) {
        throw Error("sobol pool needs at least two weight dimensions");
    }
    const std::size_t cube = dims - 1;
    boost::random::sobol engine(cube);
    std::vector<std::uint64_t> shift(cube);
    for (std::size_t d = 0; d < cube; ++d) {
        shift[d] = mix(seed, 0x5eed0000ULL + d);
    }

    std::vector<WeightVector> out;
    std::set<std::vector<double>> seen;
    std::vector<double> u(cube);
    // bounded in case the shifted sequence keeps colliding (never observed in practice)
    for (std::size_t draws = 0; out.size() < count && draws < 64 * count; ++draws) {
        for (std::size_t d = 0; d < cube; ++d) {
            const std::uint64_t bits = static_cast<std::uint64_t>(engine()) ^ shift[d];
            u[d] = static_cast<double>(bits >> 11) * 0x1.0p-53;
        }
        std::sort(u.begin(), u.end());
        std::vector<double> w(dims);
        double prev = 0.0;
        for (std::size_t d = 0; d < cube; ++d) {
            w[d] = u[d] - prev;
            prev = u[d];
        }
        w[cube] = 1.0 - prev;
        if (seen.insert(w).second) {
            out.emplace_back(std::move(w));
        }
    }
    if (extremes) {
        for (std::size_t d = 0; d < dims; ++d) {
            std::vector<double> e(dims, 0.0);
            e[d] = 1.0;
            if (seen.insert(e).second) {
                out.emplace_back(std::move(e));
            }
        }
    }
    return out;
}

double decay_utility(double u0, int tau, double lambda, int tau_max)
{
    if (tau > tau_max) {
        return 0.0;
    }
    return std::pow(lambda, tau) * u0;
}

std::string to_string(SamplingStrategy s)
{
    switch (s) {
    case SamplingStrategy::Grid: return "grid";
    case SamplingStrategy::Sobol: return "sobol";
    case SamplingStrategy::BO: return "bo";
    case SamplingStrategy::Fixed: return "fixed";
    }
    return "?";
}

SamplingStrategy sampling_strategy_from_string(const std::string& s)
{
    if (s == "grid") return SamplingStrategy::Grid;
    if (s == "sobol") return SamplingStrategy::Sobol;
    if (s == "bo") return SamplingStrategy::BO;
    if (s == "fixed") return SamplingStrategy::Fixed;
    throw Error("unknown sampling strategy '" + s + "'");
}

WeightPool::WeightPool(PoolConfig config, std::size_t dims, std::size_t guidance_index)
    : config_(std::move(config)), dims_(dims), guidance_index_(guidance_index)
{
    if (config_.n_active == 0) {
        throw Error("weight pool needs n_active >= 1");
    }
    switch (config_.strategy) {
    case SamplingStrategy::Grid: {
        queue_ = grid_pool(config_.grid_resolution, dims_);
        // seeded Fisher-Yates so early batches spread over the simplex
        for (std::size_t i = queue_.size(); i > 1; --i) {
            const std::size_t j = mix(config_.seed, i) % i;
            std::swap(queue_[i - 1], queue_[j]);
        }
        break;
    }
    case SamplingStrategy::Sobol:
        queue_ = sobol_pool(config_.sobol_count, dims_, config_.seed, config_.sobol_extremes);
        break;
    case SamplingStrategy::BO:
        queue_ = warmup_grid(dims_, guidance_index_);
        candidates_ = config_.candidate_source == CandidateSource::Sobol
                          ? sobol_pool(config_.bo_candidates, dims_, mix(config_.seed, 0xb0ULL), true)
                          : grid_pool(config_.candidate_grid_resolution, dims_);
        break;
    case SamplingStrategy::Fixed:
        if (config_.fixed_weights.empty()) {
            throw Error("fixed strategy requires at least one weight vector");
        }
        for (const auto& w : config_.fixed_weights) {
            if (w.size() != dims_) {
                throw Error("fixed weight has " + std::to_string(w.size()) + " components, expected " +
                            std::to_string(dims_));
            }
            active_.emplace_back(w);
        }
        return;
    }
    if (!take_next_batch()) {
        throw Error("weight pool is empty");
    }
}

bool WeightPool::take_next_batch()
{
    if (next_ >= queue_.size()) {
        return false;
    }
    const std::size_t end = std::min(queue_.size(), next_ + config_.n_active);
    active_.assign(queue_.begin() + static_cast<std::ptrdiff_t>(next_), queue_.begin() + static_cast<std::ptrdiff_t>(end));
    next_ = end;
    return true;
}

void WeightPool::record_feedback(std::span<const double> hv_feedback)
{
    for (auto& h : history_) {
        ++h.age;
    }
    for (std::size_t j = 0; j < active_.size(); ++j) {
        const double gain = j < hv_feedback.size() ? std::max(0.0, hv_feedback[j]) : 0.0;
        auto it = std::find_if(history_.begin(), history_.end(),
                               [&](const UtilityRecord& h) { return h.weight == active_[j]; });
        if (it == history_.end()) {
            history_.push_back({active_[j], gain, 0});
        } else if (gain > 0.0) {
            it->u0 = gain;
            it->age = 0;
        }
    }
}

std::vector<double> WeightPool::decayed_utilities() const
{
    std::vector<double> u;
    u.reserve(history_.size());
    for (const auto& h : history_) {
        u.push_back(decay_utility(h.u0, h.age, config_.decay, config_.max_age));
    }
    return u;
}

bool WeightPool::resample(std::size_t k, std::size_t w_budget, std::span<const double> hv_feedback)
{
    if (!resample_due(k, w_budget)) {
        throw ContractViolation("weight resample requested off schedule (k=" + std::to_string(k) +
                                ", w_budget=" + std::to_string(w_budget) + ")");
    }
    ++resamples_;
    switch (config_.strategy) {
    case SamplingStrategy::Fixed:
        return true;
    case SamplingStrategy::Grid:
    case SamplingStrategy::Sobol:
        if (!take_next_batch()) {
            exhausted_ = true;
            return false;
        }
        return true;
    case SamplingStrategy::BO: {
        record_feedback(hv_feedback);
        if (resamples_ < config_.warmup_batches && take_next_batch()) {
            return true;
        }
        std::vector<WeightVector> x;
        for (const auto& h : history_) {
            x.push_back(h.weight);
        }
        const std::vector<double> y = decayed_utilities();
        GaussianProcess gp;
        gp.fit(x, y);
        active_ = bo_propose(gp, candidates_, config_.n_active);
        return true;
    }
    }
    return true;
}

} // namespace moretro
