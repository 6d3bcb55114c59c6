#include "moretro/cost_vector.hpp"

#include <cmath>
#include <sstream>

namespace moretro {

CostVector::CostVector(std::vector<double> values, Mask mask)
    : values_(std::move(values)), mask_(std::move(mask))
{
    if (values_.size() != mask_.size()) {
        throw ContractViolation("CostVector: values and mask differ in size");
    }
}

CostVector CostVector::zero(const Mask& mask)
{
    return CostVector(std::vector<double>(mask.size(), 0.0), mask);
}

std::vector<double> CostVector::masked() const
{
    return project(values_, mask_);
}

CostVector& CostVector::operator+=(const CostVector& other)
{
    if (other.size() != size()) {
        throw ContractViolation("CostVector: dimension mismatch in sum");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        values_[i] += other.values_[i];
    }
    return *this;
}

std::vector<double> project(std::span<const double> values, const Mask& mask)
{
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size() && i < mask.size(); ++i) {
        if (mask[i]) {
            out.push_back(values[i]);
        }
    }
    return out;
}

bool weakly_dominates(std::span<const double> a, std::span<const double> b, double tol)
{
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i] + tol) {
            return false;
        }
    }
    return true;
}

bool strictly_dominates(std::span<const double> a, std::span<const double> b, double tol)
{
    bool better = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i] + tol) {
            return false;
        }
        if (a[i] < b[i] - tol) {
            better = true;
        }
    }
    return better;
}

bool approx_equal(std::span<const double> a, std::span<const double> b, double tol)
{
    if (a.size() != b.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > tol) {
            return false;
        }
    }
    return true;
}

Mask default_mask(std::size_t dims, std::size_t guidance_index)
{
    Mask mask(dims, true);
    if (guidance_index < dims) {
        mask[guidance_index] = false;
    }
    return mask;
}

std::string to_string(std::span<const double> values)
{
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            os << ", ";
        }
        os << values[i];
    }
    os << ']';
    return os.str();
}

} // namespace moretro
