#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace moretro {

/// Absolute tolerance used by every dominance and equality test on costs.
inline constexpr double kCostTolerance = 1e-9;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Which dimensions take part in Pareto dominance and front metrics.
using Mask = std::vector<bool>;

/// N_D-dimensional non-negative cost with the run-wide Pareto participation mask.
class CostVector {
public:
    CostVector() = default;
    CostVector(std::vector<double> values, Mask mask);

    static CostVector zero(const Mask& mask);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    const std::vector<double>& values() const& { return values_; }
    std::vector<double> values() && { return std::move(values_); }
    const Mask& mask() const& { return mask_; }
    Mask mask() && { return std::move(mask_); }

    /// Components whose mask bit is set, in dimension order.
    std::vector<double> masked() const;

    CostVector& operator+=(const CostVector& other);
    friend CostVector operator+(CostVector lhs, const CostVector& rhs) { return lhs += rhs; }
    bool operator==(const CostVector& other) const = default;

private:
    std::vector<double> values_;
    Mask mask_;
};

std::vector<double> project(std::span<const double> values, const Mask& mask);

/// a_i <= b_i + tol for all i.
bool weakly_dominates(std::span<const double> a, std::span<const double> b, double tol = kCostTolerance);

/// Weak dominance plus at least one component better by more than tol.
bool strictly_dominates(std::span<const double> a, std::span<const double> b, double tol = kCostTolerance);

bool approx_equal(std::span<const double> a, std::span<const double> b, double tol = kCostTolerance);

Mask default_mask(std::size_t dims, std::size_t guidance_index);

std::string to_string(std::span<const double> values);

} // namespace moretro
