#pragma once

// Decision-boundary analysis: for symmetric accuracy p00 = p11 = p, locate
// the unique positive drift delta* at which the first-order MSEs of the two
// estimators coincide, and build the plottable data series for the slope,
// MSE-difference, and boundary curves.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "driftcorrect/errors.hpp"
#include "driftcorrect/model.hpp"
#include "driftcorrect/moments.hpp"

namespace driftcorrect {

// Sign of the MSE difference D over the scanned interval when no root exists.
enum class IntervalSign { all_positive, all_negative, all_zero };

struct BoundaryPoint {
    double p;      // p00 = p11 = p
    double alpha;
    long long n;
    std::optional<double> delta_star;          // present iff a unique root was found
    std::optional<IntervalSign> interval_sign; // present iff no root was found
};

enum class CurveKind { slope_curve, mse_diff_curve, boundary_curve };

// One plottable series of (x, y) points with the fixed parameters recorded.
struct CurveSeries {
    CurveKind kind;
    std::string label;
    std::optional<double> alpha;
    std::optional<long long> n;
    std::optional<double> p00;
    std::optional<double> p11;
    std::vector<std::pair<double, double>> points;  // x strictly increasing
};

struct RootTolerances {
    double d_tol = 1e-12;      // target |D(delta*)|
    double delta_tol = 1e-9;   // guaranteed bracket width on delta
};

namespace detail {

inline std::string format_g(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", x);
    return std::string(buf);
}

inline void require_ascending(const std::vector<double>& grid, const char* what) {
    if (grid.empty()) throw BadGrid(std::string(what) + " grid must be non-empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw BadGrid(std::string(what) + " grid must be strictly ascending");
}

}  // namespace detail

// Scans D(delta) = mse_difference over delta in [0, 1-alpha) on `scan_points`
// equispaced points, brackets a single sign change, and bisects it down to
// |D| <= d_tol (the delta bracket shrinks far below delta_tol on the way).
// With no sign change, reports the interval's sign instead. More than one
// sign change is surfaced as MultipleRoots, never silently resolved.
inline BoundaryPoint find_delta_star(const ErrorModel& model, double alpha, long long n,
                                     RootTolerances tol = {}, int scan_points = 1000) {
    if (model.p00 != model.p11)
        throw ValidationError("find_delta_star requires a symmetric model (p00 == p11)");
    const double p = model.p11;
    if (p == 0.5)
        throw SingularModel("p = 0.5 makes the confusion matrix singular (d = 0)");
    if (!(p > 0.5 && p <= 1.0))
        throw ValidationError("p must lie in (0.5, 1], got " + std::to_string(p));
    if (!(alpha > 0.0 && alpha < 1.0))
        throw AlphaOutOfRange("alpha must lie in (0, 1), got " + std::to_string(alpha));
    if (n < 2) throw NonPositiveN("n must be >= 2 for the MSE comparison");
    if (scan_points < 2) throw ValidationError("scan_points must be >= 2");

    const double hi = 1.0 - alpha;
    auto d_at = [&](double delta) { return mse_difference(model, Scenario(alpha, delta, n)); };

    // classify each scan point: +1 / -1 / 0 (within d_tol of zero)
    std::vector<double> xs(static_cast<std::size_t>(scan_points));
    std::vector<int> sign(static_cast<std::size_t>(scan_points));
    bool any_nonzero = false;
    for (int i = 0; i < scan_points; ++i) {
        const double delta = hi * static_cast<double>(i) / static_cast<double>(scan_points);
        const double v = d_at(delta);
        xs[static_cast<std::size_t>(i)] = delta;
        sign[static_cast<std::size_t>(i)] = (v > tol.d_tol) ? 1 : (v < -tol.d_tol ? -1 : 0);
        if (sign[static_cast<std::size_t>(i)] != 0) any_nonzero = true;
    }

    BoundaryPoint out{p, alpha, n, std::nullopt, std::nullopt};
    if (!any_nonzero) {
        out.interval_sign = IntervalSign::all_zero;
        return out;
    }

    // count sign changes between consecutive nonzero classifications
    int changes = 0;
    int prev = 0;
    std::size_t prev_idx = 0;
    std::size_t bracket_lo = 0, bracket_hi = 0;
    for (std::size_t i = 0; i < sign.size(); ++i) {
        if (sign[i] == 0) continue;
        if (prev != 0 && sign[i] != prev) {
            ++changes;
            bracket_lo = prev_idx;
            bracket_hi = i;
        }
        prev = sign[i];
        prev_idx = i;
    }

    if (changes == 0) {
        out.interval_sign = prev > 0 ? IntervalSign::all_positive : IntervalSign::all_negative;
        return out;
    }
    if (changes > 1)
        throw MultipleRoots("D(delta) changes sign " + std::to_string(changes) +
                            " times on the " + std::to_string(scan_points) +
                            "-point scan for p = " + std::to_string(p) +
                            ", alpha = " + std::to_string(alpha) + ", n = " + std::to_string(n));

    double lo = xs[bracket_lo], hi_b = xs[bracket_hi];
    double flo = d_at(lo);
    double mid = 0.5 * (lo + hi_b);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi_b);
        const double fm = d_at(mid);
        if (std::abs(fm) <= tol.d_tol) break;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi_b = mid;
        }
        if (hi_b - lo < 1e-15) break;  // fp floor; |D| is far below d_tol by here
    }
    out.delta_star = mid;
    return out;
}

// One slope series h(p, p, alpha) per alpha, plus the 4p(1-p) lower bound.
inline std::vector<CurveSeries> slope_curve(const std::vector<double>& alphas,
                                            const std::vector<double>& p_grid) {
    detail::require_ascending(p_grid, "p");
    if (alphas.empty()) throw BadGrid("alpha list must be non-empty");
    for (double p : p_grid)
        if (!(p >= 0.5 && p <= 1.0))
            throw BadGrid("slope curve p grid must lie within [0.5, 1]");

    std::vector<CurveSeries> out;
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0))
            throw AlphaOutOfRange("alpha must lie in (0, 1), got " + std::to_string(a));
        CurveSeries s{};
        s.kind = CurveKind::slope_curve;
        s.label = "slope_alpha_" + detail::format_g(a);
        s.alpha = a;
        for (double p : p_grid)
            s.points.emplace_back(p, slope_abs_bias(ErrorModel(p, p), a));
        out.push_back(std::move(s));
    }
    CurveSeries lb{};
    lb.kind = CurveKind::slope_curve;
    lb.label = "lower_bound";
    for (double p : p_grid) lb.points.emplace_back(p, 4.0 * p * (1.0 - p));
    out.push_back(std::move(lb));
    return out;
}

// D(delta) over an ascending delta grid inside (-alpha, 1-alpha).
inline CurveSeries mse_diff_curve(double alpha, long long n, double p00, double p11,
                                  const std::vector<double>& delta_grid) {
    detail::require_ascending(delta_grid, "delta");
    const ErrorModel model(p00, p11);
    CurveSeries s{};
    s.kind = CurveKind::mse_diff_curve;
    s.label = "D";
    s.alpha = alpha;
    s.n = n;
    s.p00 = p00;
    s.p11 = p11;
    for (double delta : delta_grid) {
        const Scenario sc(alpha, delta, n);  // rejects grid points outside (-alpha, 1-alpha)
        s.points.emplace_back(delta, mse_difference(model, sc));
    }
    return s;
}

// delta*(p) over an ascending p grid inside (0.5, 1). Points without a root
// are omitted from the series but kept, with their interval sign, in
// `points_detail`.
struct BoundaryCurve {
    CurveSeries series;
    std::vector<BoundaryPoint> points_detail;  // one entry per grid point
};

inline BoundaryCurve boundary_curve(double alpha, long long n, const std::vector<double>& p_grid,
                                    RootTolerances tol = {}, int scan_points = 1000) {
    detail::require_ascending(p_grid, "p");
    for (double p : p_grid)
        if (!(p > 0.5 && p < 1.0))
            throw BadGrid("boundary curve p grid must lie strictly inside (0.5, 1)");
    BoundaryCurve out{};
    out.series.kind = CurveKind::boundary_curve;
    out.series.label = "delta_star";
    out.series.alpha = alpha;
    out.series.n = n;
    for (double p : p_grid) {
        BoundaryPoint bp = find_delta_star(ErrorModel(p, p), alpha, n, tol, scan_points);
        if (bp.delta_star) out.series.points.emplace_back(p, *bp.delta_star);
        out.points_detail.push_back(bp);
    }
    return out;
}

}  // namespace driftcorrect
