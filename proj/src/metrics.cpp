#include "moretro/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace moretro {

std::vector<std::size_t> nd_filter_indices(std::span<const Point> points, double tol)
{
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool drop = false;
        for (std::size_t j = 0; j < points.size() && !drop; ++j) {
            if (i == j) {
                continue;
            }
            if (strictly_dominates(points[j], points[i], tol)) {
                drop = true;
            } else if (j < i && approx_equal(points[j], points[i], tol)) {
                drop = true;
            }
        }
        if (!drop) {
            keep.push_back(i);
        }
    }
    return keep;
}

std::vector<Point> nd_filter(std::span<const Point> points, double tol)
{
    std::vector<Point> out;
    for (std::size_t i : nd_filter_indices(points, tol)) {
        out.push_back(points[i]);
    }
    return out;
}

std::vector<CostVector> nd_filter(std::span<const CostVector> points, double tol)
{
    std::vector<Point> masked;
    masked.reserve(points.size());
    for (const auto& p : points) {
        masked.push_back(p.masked());
    }
    std::vector<CostVector> out;
    for (std::size_t i : nd_filter_indices(masked, tol)) {
        out.push_back(points[i]);
    }
    return out;
}

namespace {

// Slices along the last coordinate; each slab's cross-section is the (d-1)-dim volume of the
// points at or below it.
double hv_recursive(std::vector<Point> pts, std::span<const double> ref, std::size_t d)
{
    if (pts.empty()) {
        return 0.0;
    }
    if (d == 1) {
        double best = ref[0];
        for (const auto& p : pts) {
            best = std::min(best, p[0]);
        }
        return ref[0] - best;
    }
    const std::size_t last = d - 1;
    std::sort(pts.begin(), pts.end(), [last](const Point& a, const Point& b) { return a[last] < b[last]; });
    double volume = 0.0;
    std::vector<Point> active;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        active.push_back(pts[i]);
        const double z_next = i + 1 < pts.size() ? pts[i + 1][last] : ref[last];
        const double height = z_next - pts[i][last];
        if (height <= 0.0) {
            continue;
        }
        active = nd_filter(std::span<const Point>(active), 0.0);
        std::vector<Point> lower;
        lower.reserve(active.size());
        for (const auto& p : active) {
            lower.emplace_back(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(last));
        }
        volume += height * hv_recursive(std::move(lower), ref.first(last), last);
    }
    return volume;
}

} // namespace

double hypervolume(std::span<const Point> front, std::span<const double> reference, std::size_t* clamped)
{
    const std::size_t d = reference.size();
    if (d == 0 || d > 4) {
        throw Error("hypervolume: exact computation supports 1 to 4 dimensions, got " + std::to_string(d));
    }
    std::vector<Point> pts;
    std::size_t n_clamped = 0;
    for (const auto& p : front) {
        if (p.size() != d) {
            throw Error("hypervolume: point dimension does not match the reference");
        }
        Point q(p);
        bool c = false;
        for (std::size_t i = 0; i < d; ++i) {
            if (q[i] > reference[i]) {
                q[i] = reference[i];
                c = true;
            }
        }
        n_clamped += c ? 1 : 0;
        pts.push_back(std::move(q));
    }
    if (clamped) {
        *clamped = n_clamped;
    }
    return hv_recursive(nd_filter(std::span<const Point>(pts), 0.0), reference, d);
}

std::vector<Point> r2_weights(std::size_t dims, int divisions)
{
    std::vector<Point> out;
    std::vector<int> parts(dims, 0);
    // odometer over compositions of `divisions` into `dims` parts
    auto rec = [&](auto&& self, int remaining, std::size_t slot) -> void {
        if (slot + 1 == dims) {
            parts[slot] = remaining;
            Point w(dims);
            int top = *std::max_element(parts.begin(), parts.end());
            for (std::size_t i = 0; i < dims; ++i) {
                w[i] = static_cast<double>(parts[i]) / top;
            }
            out.push_back(std::move(w));
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            parts[slot] = v;
            self(self, remaining - v, slot + 1);
        }
    };
    rec(rec, divisions, 0);
    return out;
}

std::optional<double> r2_indicator(std::span<const Point> front, std::span<const Point> weights,
                                   std::span<const double> utopia)
{
    if (front.empty()) {
        return std::nullopt;
    }
    if (weights.empty()) {
        throw Error("r2_indicator: empty weight set");
    }
    double total = 0.0;
    for (const auto& w : weights) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : front) {
            double u = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < w.size(); ++i) {
                u = std::max(u, w[i] * (p[i] - utopia[i]));
            }
            best = std::min(best, u);
        }
        total += best;
    }
    return total / static_cast<double>(weights.size());
}

std::optional<double> r2_indicator(std::span<const Point> front)
{
    if (front.empty()) {
        return std::nullopt;
    }
    const std::size_t d = front.front().size();
    const std::vector<double> utopia(d, 0.0);
    return r2_indicator(front, r2_weights(d), utopia);
}

Coverage dominance_coverage(std::span<const Point> a, std::span<const Point> b, double tol)
{
    auto pct = [tol](std::span<const Point> by, std::span<const Point> of) {
        if (of.empty()) {
            return 0.0;
        }
        std::size_t n = 0;
        for (const auto& q : of) {
            for (const auto& p : by) {
                if (strictly_dominates(p, q, tol)) {
                    ++n;
                    break;
                }
            }
        }
        return 100.0 * static_cast<double>(n) / static_cast<double>(of.size());
    };
    return {pct(a, b), pct(b, a)};
}

double percentile(std::vector<double> values, double p)
{
    if (values.empty()) {
        throw Error("percentile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

Point PercentileScale::apply(std::span<const double> v) const
{
    Point out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double span = hi[i] - lo[i];
        out[i] = span > 0.0 ? std::clamp((v[i] - lo[i]) / span, 0.0, 1.0) : 0.0;
    }
    return out;
}

PercentileScale fit_percentile_scale(std::span<const Point> all_costs, double p_lo, double p_hi)
{
    if (all_costs.empty()) {
        throw Error("percentile normalization needs at least one route");
    }
    const std::size_t d = all_costs.front().size();
    PercentileScale s;
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> column;
        column.reserve(all_costs.size());
        for (const auto& c : all_costs) {
            column.push_back(c[i]);
        }
        s.lo.push_back(percentile(column, p_lo));
        s.hi.push_back(percentile(column, p_hi));
    }
    return s;
}

std::vector<Point> percentile_normalize(std::span<const Point> all_costs, double p_lo, double p_hi)
{
    const PercentileScale s = fit_percentile_scale(all_costs, p_lo, p_hi);
    std::vector<Point> out;
    out.reserve(all_costs.size());
    for (const auto& c : all_costs) {
        out.push_back(s.apply(c));
    }
    return out;
}

std::string reaction_key(const ReactionRecord& r)
{
    std::vector<MoleculeKey> reactants = r.reactants;
    std::sort(reactants.begin(), reactants.end());
    std::string key = r.product + ">";
    for (std::size_t i = 0; i < reactants.size(); ++i) {
        key += (i ? "." : "") + reactants[i];
    }
    return key + "|" + r.rule_id;
}

double route_dissimilarity(const Route& a, const Route& b)
{
    std::set<std::string> sa;
    std::set<std::string> sb;
    for (const auto& r : a.reactions) {
        sa.insert(reaction_key(r.record));
    }
    for (const auto& r : b.reactions) {
        sb.insert(reaction_key(r.record));
    }
    if (sa.empty() && sb.empty()) {
        return 0.0;
    }
    std::size_t common = 0;
    for (const auto& k : sa) {
        common += sb.count(k);
    }
    const std::size_t uni = sa.size() + sb.size() - common;
    return 1.0 - static_cast<double>(common) / static_cast<double>(uni);
}

} // namespace moretro
