#pragma once

// Point estimators of the positive-class rate in a scored population whose
// base rate may have drifted since the labeled test set was collected.
//
// Count convention: n_ab = number of test items with true class a and
// predicted class b, e.g. n10 = truly positive but predicted negative.

#include <cmath>
#include <string>

#include "driftcorrect/errors.hpp"
#include "driftcorrect/model.hpp"

namespace driftcorrect {

struct ConfusionCounts {
    long long n11;  // true 1, predicted 1
    long long n10;  // true 1, predicted 0
    long long n01;  // true 0, predicted 1
    long long n00;  // true 0, predicted 0

    ConfusionCounts(long long n11_, long long n10_, long long n01_, long long n00_)
        : n11(n11_), n10(n10_), n01(n01_), n00(n00_) {
        if (n11 < 0 || n10 < 0 || n01 < 0 || n00 < 0)
            throw ValidationError("confusion counts must be nonnegative");
    }

    long long row1() const { return n11 + n10; }  // truly positive
    long long row0() const { return n01 + n00; }  // truly negative
    long long col1() const { return n11 + n01; }  // predicted positive
    long long col0() const { return n10 + n00; }  // predicted negative
    long long total() const { return n11 + n10 + n01 + n00; }
};

// Row-conditional rates (classifier accuracy per true class) and
// column-conditional rates (true-class composition per predicted class).
struct EstimatedRates {
    double p11_hat;  // n11 / row1
    double p00_hat;  // n00 / row0
    double c11_hat;  // n11 / col1
    double c10_hat;  // n10 / col0

    double determinant() const { return p00_hat + p11_hat - 1.0; }
};

// Fraction of predicted positives in the scored population.
inline double naive_estimate(long long predicted_positive, long long population_size) {
    if (population_size < 1)
        throw ValidationError("population_size must be positive");
    if (predicted_positive < 0 || predicted_positive > population_size)
        throw ValidationError("predicted_positive must lie in [0, population_size]");
    return static_cast<double>(predicted_positive) / static_cast<double>(population_size);
}

// Plug-in rate estimates from a labeled confusion table.
// Throws DegenerateMargin naming the first empty margin encountered.
inline EstimatedRates estimate_rates(const ConfusionCounts& c) {
    if (c.row1() == 0)
        throw DegenerateMargin(Margin::row1, "no truly positive test items (n11 + n10 = 0)");
    if (c.row0() == 0)
        throw DegenerateMargin(Margin::row0, "no truly negative test items (n01 + n00 = 0)");
    if (c.col1() == 0)
        throw DegenerateMargin(Margin::col1, "no predicted-positive test items (n11 + n01 = 0)");
    if (c.col0() == 0)
        throw DegenerateMargin(Margin::col0, "no predicted-negative test items (n10 + n00 = 0)");
    EstimatedRates r{};
    r.p11_hat = static_cast<double>(c.n11) / static_cast<double>(c.row1());
    r.p00_hat = static_cast<double>(c.n00) / static_cast<double>(c.row0());
    r.c11_hat = static_cast<double>(c.n11) / static_cast<double>(c.col1());
    r.c10_hat = static_cast<double>(c.n10) / static_cast<double>(c.col0());
    return r;
}

// Matrix-inversion estimate. Deliberately NOT clipped to [0, 1]: the raw
// value is returned and out_of_range flags excursions, so callers can study
// the estimator's true sampling distribution.
struct MisclassificationEstimate {
    double value;
    bool out_of_range;  // true iff value < 0 or value > 1
};

inline MisclassificationEstimate misclassification_estimate(
        double alpha_star, const EstimatedRates& rates,
        double tol = kDefaultSingularityTol) {
    if (!(alpha_star >= 0.0 && alpha_star <= 1.0))
        throw ValidationError("alpha_star must lie in [0, 1], got " + std::to_string(alpha_star));
    const double d_hat = rates.determinant();
    if (std::abs(d_hat) <= tol)
        throw SingularMatrix("estimated confusion matrix is singular: |p00_hat + p11_hat - 1| = " +
                             std::to_string(std::abs(d_hat)) + " <= " + std::to_string(tol));
    MisclassificationEstimate e{};
    e.value = (alpha_star + rates.p00_hat - 1.0) / d_hat;
    e.out_of_range = (e.value < 0.0) || (e.value > 1.0);
    return e;
}

// Calibration (predicted-class composition) estimate. Always in [0, 1]
// because it is a convex combination of c11_hat and c10_hat.
inline double calibration_estimate(double alpha_star, const EstimatedRates& rates) {
    if (!(alpha_star >= 0.0 && alpha_star <= 1.0))
        throw ValidationError("alpha_star must lie in [0, 1], got " + std::to_string(alpha_star));
    return alpha_star * rates.c11_hat + (1.0 - alpha_star) * rates.c10_hat;
}

}  // namespace driftcorrect
