#pragma once

// Exception taxonomy for the driftcorrect library.
//
// All errors derive from driftcorrect::Error (itself a std::runtime_error).
// ValidationError covers bad user inputs (parameters outside their domain);
// ComputationError covers conditions detected while computing (singular
// estimated matrices, negative first-order variances, root-finding trouble).

#include <stdexcept>
#include <string>

namespace driftcorrect {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- input validation -------------------------------------------------

struct ValidationError : Error {
    using Error::Error;
};

// alpha outside (0, 1)
struct AlphaOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};

// delta outside (-alpha, 1-alpha)
struct DeltaOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};

// test-set size n < 1
struct NonPositiveN : ValidationError {
    using ValidationError::ValidationError;
};

// error-model rates outside [0, 1]
struct RateOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};

// p_cap outside [0.5, 1]
struct PCapOutOfRange : ValidationError {
    using ValidationError::ValidationError;
};

// population_size < 10 * n, or replications < 1
struct BadSimConfig : ValidationError {
    using ValidationError::ValidationError;
};

// requested n exceeds the enumeration guard
struct NTooLarge : ValidationError {
    using ValidationError::ValidationError;
};

// malformed grid (empty, unsorted, or outside the admissible interval)
struct BadGrid : ValidationError {
    using ValidationError::ValidationError;
};

// ---- computation errors ----------------------------------------------

struct ComputationError : Error {
    using Error::Error;
};

// |p00 + p11 - 1| <= tolerance for the *true* error model
struct SingularModel : ComputationError {
    using ComputationError::ComputationError;
};

// |p^00 + p^11 - 1| <= tolerance for *estimated* rates
struct SingularMatrix : ComputationError {
    using ComputationError::ComputationError;
};

// a confusion-count margin needed for a rate estimate is zero
enum class Margin { row1, row0, col1, col0 };

struct DegenerateMargin : ComputationError {
    Margin which;
    DegenerateMargin(Margin m, const std::string& msg)
        : ComputationError(msg), which(m) {}
};

// first-order variance expression fell below -1e-12
struct NegativeVariance : ComputationError {
    using ComputationError::ComputationError;
};

// sign-change scan found more than one root of the MSE difference
struct MultipleRoots : ComputationError {
    using ComputationError::ComputationError;
};

// a degenerate replication under the abort policy
struct DegenerateReplication : ComputationError {
    long long replication;
    DegenerateReplication(long long r, const std::string& msg)
        : ComputationError(msg), replication(r) {}
};

// every replication was degenerate; no moments can be formed
struct AllDegenerate : ComputationError {
    using ComputationError::ComputationError;
};

}  // namespace driftcorrect
