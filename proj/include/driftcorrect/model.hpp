#pragma once

// Core domain types: the binary classifier's error model, the evaluation
// scenario (base rate, drift, test-set size), and the scalars derived from
// them that every downstream formula consumes.
//
// Conventions used throughout the library:
//   alpha   base rate of the positive class when the test set was drawn
//   delta   drift of the base rate between that period and the scored one,
//           so the scored population has rate alpha' = alpha + delta
//   p11     P(predicted positive | truly positive)  (sensitivity)
//   p00     P(predicted negative | truly negative)  (specificity)
//   d       p00 + p11 - 1, determinant of the 2x2 confusion matrix
//   beta    P(predicted positive) in the estimation period
//   beta'   P(predicted positive) in the scored period
//   T       (1-alpha)*p00*(1-p00) + alpha*p11*(1-p11)

#include <cmath>
#include <string>

#include "driftcorrect/errors.hpp"

namespace driftcorrect {

// Default tolerance below which |p00 + p11 - 1| is treated as singular.
inline constexpr double kDefaultSingularityTol = 1e-9;

// Conditional correct-classification rates of the classifier.
struct ErrorModel {
    double p00;  // P(predict 0 | true 0)
    double p11;  // P(predict 1 | true 1)

    ErrorModel(double p00_, double p11_) : p00(p00_), p11(p11_) {
        if (!(p00 >= 0.0 && p00 <= 1.0))
            throw RateOutOfRange("p00 must lie in [0, 1], got " + std::to_string(p00));
        if (!(p11 >= 0.0 && p11 <= 1.0))
            throw RateOutOfRange("p11 must lie in [0, 1], got " + std::to_string(p11));
    }

    double p01() const { return 1.0 - p00; }  // false-positive rate
    double p10() const { return 1.0 - p11; }  // false-negative rate

    // Determinant of the confusion matrix [[p00, 1-p11], [1-p00, p11]].
    double determinant() const { return p00 + p11 - 1.0; }

    bool invertible(double tol = kDefaultSingularityTol) const {
        return std::abs(determinant()) > tol;
    }
};

// Base rate, drift, and test-set size for one evaluation setting.
struct Scenario {
    double alpha;   // base rate in the estimation period, in (0, 1)
    double delta;   // drift, in (-alpha, 1-alpha)
    long long n;    // test-set size, >= 1

    Scenario(double alpha_, double delta_, long long n_)
        : alpha(alpha_), delta(delta_), n(n_) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw AlphaOutOfRange("alpha must lie in (0, 1), got " + std::to_string(alpha));
        if (!(delta > -alpha && delta < 1.0 - alpha))
            throw DeltaOutOfRange("delta must lie in (-alpha, 1-alpha) = (" +
                                  std::to_string(-alpha) + ", " + std::to_string(1.0 - alpha) +
                                  "), got " + std::to_string(delta));
        if (n < 1)
            throw NonPositiveN("n must be a positive integer, got " + std::to_string(n));
    }

    // Base rate of the scored (drifted) population.
    double alpha_shifted() const { return alpha + delta; }
};

// Convenience validator mirroring the Scenario constructor.
inline Scenario validate_scenario(double alpha, double delta, long long n) {
    return Scenario(alpha, delta, n);
}

// Scalars shared by the analytic formulas.
struct DerivedScalars {
    double beta;        // P(predicted positive), estimation period
    double beta_prime;  // P(predicted positive), scored period; equals E[naive estimate]
    double d;           // confusion-matrix determinant
    double t_term;      // (1-alpha)*p00*(1-p00) + alpha*p11*(1-p11)
};

// Computes the derived scalars. Identity satisfied up to rounding:
//   beta*(1-beta) - alpha*(1-alpha)*d^2 == t_term.
inline DerivedScalars derive_scalars(const ErrorModel& model, const Scenario& sc) {
    DerivedScalars out{};
    out.d = model.determinant();
    out.beta = (1.0 - sc.alpha) * (1.0 - model.p00) + sc.alpha * model.p11;
    out.beta_prime = out.beta + sc.delta * out.d;
    out.t_term = (1.0 - sc.alpha) * model.p00 * (1.0 - model.p00) +
                 sc.alpha * model.p11 * (1.0 - model.p11);
    return out;
}

}  // namespace driftcorrect
