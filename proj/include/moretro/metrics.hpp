#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moretro/cost_vector.hpp"
#include "moretro/graph.hpp"

namespace moretro {

using Point = std::vector<double>;

/// Indices of the non-dominated points, first representative of each duplicate kept,
/// in input order.
std::vector<std::size_t> nd_filter_indices(std::span<const Point> points, double tol = kCostTolerance);
std::vector<Point> nd_filter(std::span<const Point> points, double tol = kCostTolerance);
/// Same on the masked dimensions of cost vectors; returns the kept vectors.
std::vector<CostVector> nd_filter(std::span<const CostVector> points, double tol = kCostTolerance);

/// Exact dominated volume up to `reference` (1 to 4 dims). Coordinates beyond the reference
/// are clamped to it and counted in `clamped` when given. Empty front gives 0.
double hypervolume(std::span<const Point> front, std::span<const double> reference, std::size_t* clamped = nullptr);

/// Simplex lattice over `dims` with step 1/divisions, each rescaled to unit max-norm.
std::vector<Point> r2_weights(std::size_t dims, int divisions = 10);

/// Mean over weights of min over the front of max_i w_i (v_i - utopia_i); nullopt for an empty front.
std::optional<double> r2_indicator(std::span<const Point> front, std::span<const Point> weights,
                                   std::span<const double> utopia);
std::optional<double> r2_indicator(std::span<const Point> front);

struct Coverage {
    /// Percent of b strictly dominated by some point of a.
    double b_dominated_by_a = 0.0;
    /// Percent of a strictly dominated by some point of b.
    double a_dominated_by_b = 0.0;
};
Coverage dominance_coverage(std::span<const Point> a, std::span<const Point> b, double tol = kCostTolerance);

/// numpy-style linear-interpolated percentile, p in [0, 100].
double percentile(std::vector<double> values, double p);

struct PercentileScale {
    std::vector<double> lo;
    std::vector<double> hi;

    Point apply(std::span<const double> v) const;
};
/// Per-dimension [P_lo, P_hi] -> [0,1] map fitted on `all_costs`, clamped; degenerate dims map to 0.
PercentileScale fit_percentile_scale(std::span<const Point> all_costs, double p_lo = 5.0, double p_hi = 95.0);
std::vector<Point> percentile_normalize(std::span<const Point> all_costs, double p_lo = 5.0, double p_hi = 95.0);

/// product>sorted reactants|rule_id
std::string reaction_key(const ReactionRecord& r);
/// 1 - Jaccard similarity of the two routes' reaction-key sets; two empty routes give 0.
double route_dissimilarity(const Route& a, const Route& b);

struct FrontStats {
    double hv = 0.0;
    std::optional<double> r2;
    std::size_t n_routes = 0;
    double baseline_dominated_pct = 0.0;
    double self_dominated_pct = 0.0;
    bool success = false;
};

} // namespace moretro
