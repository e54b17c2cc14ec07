#pragma once

// Closed-form sampling moments (to first order in 1/n) of the two
// drift-corrected estimators, plus the MSE comparison and the slope
// analysis of the calibration estimator's bias.
//
// All biases are taken with respect to the shifted rate alpha' = alpha + delta,
// i.e. they answer "how far off is the estimator for the population it is
// actually applied to".

#include <cmath>
#include <string>

#include "driftcorrect/errors.hpp"
#include "driftcorrect/model.hpp"

namespace driftcorrect {

enum class EstimatorKind { misclassification, calibration };

// Which expansion (or data source) a MomentSet carries. Analytic sets are
// first-order in 1/n unless the second-order rate factors were requested;
// Monte Carlo output is tagged empirical, exhaustive enumeration exact.
enum class MomentOrder { first_order, second_order, empirical, exact };

struct MomentSet {
    double bias;
    double variance;
    double mse;  // always bias^2 + variance, exactly
    MomentOrder order;
};

namespace detail {

// S := p11(1-p11)/alpha + p00(1-p00)/(1-alpha)
inline double s_term(const ErrorModel& m, double alpha) {
    return m.p11 * (1.0 - m.p11) / alpha + m.p00 * (1.0 - m.p00) / (1.0 - alpha);
}

inline void require_invertible(const ErrorModel& m, double tol) {
    if (!m.invertible(tol))
        throw SingularModel("error model is singular: |p00 + p11 - 1| = " +
                            std::to_string(std::abs(m.determinant())) + " <= " +
                            std::to_string(tol));
}

inline void require_beta_interior(double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw SingularModel("predicted-positive probability beta = " + std::to_string(beta) +
                            " is degenerate (must lie strictly inside (0, 1))");
}

}  // namespace detail

// Bias of the matrix-inversion estimator:
//   (p00 - p11)/(n d) + delta * S / (n d^2).
inline double bias_misclassification(const ErrorModel& m, const Scenario& sc,
                                     double tol = kDefaultSingularityTol) {
    detail::require_invertible(m, tol);
    const double d = m.determinant();
    const double n = static_cast<double>(sc.n);
    return (m.p00 - m.p11) / (n * d) + sc.delta * detail::s_term(m, sc.alpha) / (n * d * d);
}

// Variance of the matrix-inversion estimator:
//   [T + 2 delta (p00 - p11) d + delta^2 S] / (n d^2).
// With include_second_order_rate_factor, the exact rate variances
//   V(p11_hat) = p11(1-p11)/(n alpha)  * [1 + (1-alpha)/(n alpha)]
//   V(p00_hat) = p00(1-p00)/(n(1-alpha)) * [1 + alpha/(n(1-alpha))]
// are combined as [(1-alpha')^2 V(p00_hat) + alpha'^2 V(p11_hat)] / d^2
// instead of collapsing the bracketed factors to 1.
inline double variance_misclassification(const ErrorModel& m, const Scenario& sc,
                                         bool include_second_order_rate_factor = false,
                                         double tol = kDefaultSingularityTol) {
    detail::require_invertible(m, tol);
    const double d = m.determinant();
    const double n = static_cast<double>(sc.n);
    if (include_second_order_rate_factor) {
        const double na = n * sc.alpha;
        const double nb = n * (1.0 - sc.alpha);
        const double v11 = m.p11 * (1.0 - m.p11) / na * (1.0 + (1.0 - sc.alpha) / na);
        const double v00 = m.p00 * (1.0 - m.p00) / nb * (1.0 + sc.alpha / nb);
        const double ap = sc.alpha_shifted();
        return ((1.0 - ap) * (1.0 - ap) * v00 + ap * ap * v11) / (d * d);
    }
    const DerivedScalars ds = derive_scalars(m, sc);
    const double s = detail::s_term(m, sc.alpha);
    return (ds.t_term + 2.0 * sc.delta * (m.p00 - m.p11) * d + sc.delta * sc.delta * s) /
           (n * d * d);
}

// Bias of the calibration estimator: -delta * T / (beta (1 - beta)).
// Always opposite in sign to the drift.
inline double bias_calibration(const ErrorModel& m, const Scenario& sc) {
    const DerivedScalars ds = derive_scalars(m, sc);
    if (ds.t_term == 0.0 && sc.delta == 0.0) return 0.0;
    detail::require_beta_interior(ds.beta);
    return -sc.delta * ds.t_term / (ds.beta * (1.0 - ds.beta));
}

// Variance of the calibration estimator:
//   alpha(1-alpha)/n * [ h + 2 delta d G + delta^2 d^2 H ]
// with h = T/(beta(1-beta)),
//      G = p11(1-p00)/beta^2 - p00(1-p11)/(1-beta)^2,
//      H = p11(1-p00)/beta^3 + p00(1-p11)/(1-beta)^3.
// The expression is first-order; mildly negative values (>= -1e-12) are
// clamped to zero, anything lower is reported as an error.
inline double variance_calibration(const ErrorModel& m, const Scenario& sc) {
    const DerivedScalars ds = derive_scalars(m, sc);
    const double num11 = m.p11 * (1.0 - m.p00);  // p11 (1-p00)
    const double num00 = m.p00 * (1.0 - m.p11);  // p00 (1-p11)
    if (num11 == 0.0 && num00 == 0.0 && ds.t_term == 0.0) return 0.0;  // error-free classifier
    detail::require_beta_interior(ds.beta);
    const double b = ds.beta, ob = 1.0 - ds.beta;
    const double h = ds.t_term / (b * ob);
    const double g = num11 / (b * b) - num00 / (ob * ob);
    const double hh = num11 / (b * b * b) + num00 / (ob * ob * ob);
    const double d = ds.d;
    const double bracket = h + 2.0 * sc.delta * d * g + sc.delta * sc.delta * d * d * hh;
    double v = sc.alpha * (1.0 - sc.alpha) / static_cast<double>(sc.n) * bracket;
    if (v < 0.0) {
        if (v < -1e-12)
            throw NegativeVariance("first-order calibration variance = " + std::to_string(v) +
                                   " is negative beyond tolerance; scenario outside the "
                                   "expansion's regime");
        v = 0.0;
    }
    return v;
}

// Bias, variance and MSE of the chosen estimator as one record.
inline MomentSet analytic_moments(const ErrorModel& m, const Scenario& sc, EstimatorKind kind,
                                  bool include_second_order_rate_factor = false,
                                  double tol = kDefaultSingularityTol) {
    MomentSet out{};
    if (kind == EstimatorKind::misclassification) {
        out.bias = bias_misclassification(m, sc, tol);
        out.variance = variance_misclassification(m, sc, include_second_order_rate_factor, tol);
    } else {
        out.bias = bias_calibration(m, sc);
        out.variance = variance_calibration(m, sc);
    }
    out.mse = out.bias * out.bias + out.variance;
    out.order = include_second_order_rate_factor ? MomentOrder::second_order
                                                 : MomentOrder::first_order;
    return out;
}

// First-order MSE(misclassification) - MSE(calibration). Positive means the
// calibration estimator is preferred at this scenario.
inline double mse_difference(const ErrorModel& m, const Scenario& sc,
                             double tol = kDefaultSingularityTol) {
    const MomentSet p = analytic_moments(m, sc, EstimatorKind::misclassification, false, tol);
    const MomentSet c = analytic_moments(m, sc, EstimatorKind::calibration, false, tol);
    return p.mse - c.mse;
}

// Magnitude of d|bias_calibration|/d|delta|: h(p00, p11, alpha) = T/(beta(1-beta)).
inline double slope_abs_bias(const ErrorModel& m, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw AlphaOutOfRange("alpha must lie in (0, 1), got " + std::to_string(alpha));
    const double beta = (1.0 - alpha) * (1.0 - m.p00) + alpha * m.p11;
    const double t = (1.0 - alpha) * m.p00 * (1.0 - m.p00) + alpha * m.p11 * (1.0 - m.p11);
    if (t == 0.0 && (beta == 0.0 || beta == 1.0)) return 0.0;  // deterministic classifier
    detail::require_beta_interior(beta);
    return t / (beta * (1.0 - beta));
}

// Envelope for the calibration bias magnitude at accuracy cap p:
//   4 p (1-p) |delta|  <=  |bias|  <=  |delta|.
struct AbsBiasBounds {
    double lower;
    double upper;
};

inline AbsBiasBounds abs_bias_bounds(double p_cap, double delta) {
    if (!(p_cap >= 0.5 && p_cap <= 1.0))
        throw PCapOutOfRange("p_cap must lie in [0.5, 1], got " + std::to_string(p_cap));
    const double ad = std::abs(delta);
    return AbsBiasBounds{4.0 * p_cap * (1.0 - p_cap) * ad, ad};
}

// Partial derivatives of the slope h(x, y, alpha) with x = p00, y = p11:
//   h_x(x, y, alpha) = alpha / (beta^2 (1-beta)^2) * [((1-y) beta)^2 - (y (1-beta))^2]
//   h_y(x, y, alpha) = h_x(y, x, 1-alpha)          (symmetry of h)
struct SlopePartials {
    double h_x;  // d h / d p00
    double h_y;  // d h / d p11
};

namespace detail {

inline double slope_partial_x(double x, double y, double alpha) {
    const double beta = (1.0 - alpha) * (1.0 - x) + alpha * y;
    require_beta_interior(beta);
    const double a = (1.0 - y) * beta;
    const double b = y * (1.0 - beta);
    return alpha / (beta * beta * (1.0 - beta) * (1.0 - beta)) * (a * a - b * b);
}

}  // namespace detail

inline SlopePartials slope_partials(const ErrorModel& m, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw AlphaOutOfRange("alpha must lie in (0, 1), got " + std::to_string(alpha));
    SlopePartials out{};
    out.h_x = detail::slope_partial_x(m.p00, m.p11, alpha);
    out.h_y = detail::slope_partial_x(m.p11, m.p00, 1.0 - alpha);
    return out;
}

}  // namespace driftcorrect
