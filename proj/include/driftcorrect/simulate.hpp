#pragma once

// Monte Carlo oracle for the two estimators, plus an exhaustive small-n
// enumeration oracle.
//
// One replication mimics the full double-sampling design: draw a labeled
// test set of size n from the estimation-period population, draw the
// predicted-positive count of a size-N' scored population whose base rate
// has drifted by delta, then apply both estimators. The drifted population's
// truly-positive count is fixed at round(alpha' N') rather than redrawn:
// alpha' is a population constant, and the remaining O(1/N') prediction
// noise is made negligible by requiring N' >= 10 n.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "driftcorrect/binomial.hpp"
#include "driftcorrect/errors.hpp"
#include "driftcorrect/estimators.hpp"
#include "driftcorrect/model.hpp"
#include "driftcorrect/moments.hpp"
#include "driftcorrect/rng.hpp"

namespace driftcorrect {

enum class DegeneracyPolicy { exclude, abort };

struct SimConfig {
    ErrorModel model;
    Scenario scenario;
    long long population_size;  // N'
    long long replications;
    std::uint64_t seed;
    DegeneracyPolicy policy;
    double singularity_tol;

    SimConfig(const ErrorModel& model_, const Scenario& scenario_, long long population_size_,
              long long replications_, std::uint64_t seed_,
              DegeneracyPolicy policy_ = DegeneracyPolicy::exclude,
              double singularity_tol_ = kDefaultSingularityTol)
        : model(model_), scenario(scenario_), population_size(population_size_),
          replications(replications_), seed(seed_), policy(policy_),
          singularity_tol(singularity_tol_) {
        if (population_size < 10 * scenario.n)
            throw BadSimConfig("population_size must be at least 10*n to keep test-set noise "
                               "dominant; got N' = " + std::to_string(population_size) +
                               " for n = " + std::to_string(scenario.n));
        if (replications < 1)
            throw BadSimConfig("replications must be >= 1");
    }
};

// Monte Carlo standard errors of the reported bias and variance.
struct StandardErrors {
    double bias_p;
    double variance_p;
    double bias_c;
    double variance_c;
};

struct SimResult {
    MomentSet moments_p;  // misclassification estimator, empirical
    MomentSet moments_c;  // calibration estimator, empirical
    StandardErrors standard_errors;
    long long degenerate_count;
    long long effective_replications;
};

// Outcome of a single replication.
struct ReplicationOutcome {
    double alpha_p;   // matrix-inversion estimate (unclipped)
    double alpha_c;   // calibration estimate
    bool degenerate;  // margins empty or estimated matrix singular
};

// Runs one replication on the given generator. Draw order is fixed:
// n1+, n11, n00, then the two population prediction counts.
inline ReplicationOutcome simulate_once(const SimConfig& cfg, Xoshiro256pp& rng) {
    const long long n = cfg.scenario.n;
    const double alpha = cfg.scenario.alpha;
    const double p00 = cfg.model.p00, p11 = cfg.model.p11;

    const long long n1p = binomial_draw(rng, n, alpha);
    const long long n0p = n - n1p;
    const long long n11 = binomial_draw(rng, n1p, p11);
    const long long n10 = n1p - n11;
    const long long n00 = binomial_draw(rng, n0p, p00);
    const long long n01 = n0p - n00;

    const long long np = cfg.population_size;
    const long long np1 = std::llround(cfg.scenario.alpha_shifted() * static_cast<double>(np));
    const long long np0 = np - np1;
    const long long k = binomial_draw(rng, np1, p11) + binomial_draw(rng, np0, 1.0 - p00);
    const double alpha_star = static_cast<double>(k) / static_cast<double>(np);

    ReplicationOutcome out{0.0, 0.0, false};
    const long long col1 = n11 + n01, col0 = n10 + n00;
    if (n1p == 0 || n0p == 0 || col1 == 0 || col0 == 0) {
        out.degenerate = true;
        return out;
    }
    const double p11_hat = static_cast<double>(n11) / static_cast<double>(n1p);
    const double p00_hat = static_cast<double>(n00) / static_cast<double>(n0p);
    const double d_hat = p00_hat + p11_hat - 1.0;
    if (std::abs(d_hat) <= cfg.singularity_tol) {
        out.degenerate = true;
        return out;
    }
    const double c11_hat = static_cast<double>(n11) / static_cast<double>(col1);
    const double c10_hat = static_cast<double>(n10) / static_cast<double>(col0);
    out.alpha_p = (alpha_star + p00_hat - 1.0) / d_hat;
    out.alpha_c = alpha_star * c11_hat + (1.0 - alpha_star) * c10_hat;
    return out;
}

namespace detail {

// Mean and central 2nd/4th moments in fixed (replication-index) order.
struct MomentAccumulation {
    double mean, m2, m4;  // m2, m4 are sums of centered powers
    long long count;
};

inline MomentAccumulation accumulate_moments(const std::vector<double>& values,
                                             const std::vector<unsigned char>& degenerate) {
    MomentAccumulation acc{0.0, 0.0, 0.0, 0};
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (degenerate[i]) continue;
        sum += values[i];
        ++acc.count;
    }
    acc.mean = sum / static_cast<double>(acc.count);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (degenerate[i]) continue;
        const double c = values[i] - acc.mean;
        const double c2 = c * c;
        acc.m2 += c2;
        acc.m4 += c2 * c2;
    }
    return acc;
}

}  // namespace detail

// Runs all replications and reports empirical moments of both estimators.
//
// Normalization conventions (documented as part of the output contract):
// empirical variance is the sample variance with divisor R_eff - 1;
// empirical mse is bias^2 + variance, exactly, matching the MomentSet
// identity; SE(bias) = sqrt(variance / R_eff); SE(variance) =
// sqrt((m4_hat - sigma_hat^4) / R_eff) with population-normalized central
// moments.
//
// `workers` only partitions the work (0 = hardware concurrency): replication
// i always uses RNG substream (seed, i) and results are merged in
// replication-index order, so output is bit-identical for every worker count.
inline SimResult simulate_moments(const SimConfig& cfg, int workers = 1) {
    const long long r = cfg.replications;
    std::vector<double> ap(static_cast<std::size_t>(r));
    std::vector<double> ac(static_cast<std::size_t>(r));
    std::vector<unsigned char> degen(static_cast<std::size_t>(r));

    long long nworkers = workers;
    if (nworkers <= 0) nworkers = static_cast<long long>(std::thread::hardware_concurrency());
    nworkers = std::clamp<long long>(nworkers, 1, r);

    std::atomic<long long> first_degenerate{-1};
    auto run_range = [&](long long lo, long long hi) {
        for (long long i = lo; i < hi; ++i) {
            Xoshiro256pp rng(cfg.seed, static_cast<std::uint64_t>(i));
            const ReplicationOutcome o = simulate_once(cfg, rng);
            const auto idx = static_cast<std::size_t>(i);
            ap[idx] = o.alpha_p;
            ac[idx] = o.alpha_c;
            degen[idx] = o.degenerate ? 1 : 0;
            if (o.degenerate) {
                long long seen = first_degenerate.load(std::memory_order_relaxed);
                while ((seen == -1 || i < seen) &&
                       !first_degenerate.compare_exchange_weak(seen, i,
                                                               std::memory_order_relaxed)) {
                }
            }
        }
    };

    if (nworkers == 1) {
        run_range(0, r);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nworkers));
        const long long chunk = (r + nworkers - 1) / nworkers;
        for (long long w = 0; w < nworkers; ++w) {
            const long long lo = w * chunk;
            const long long hi = std::min(r, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    const long long degenerate_count =
        static_cast<long long>(std::count(degen.begin(), degen.end(), 1));
    if (cfg.policy == DegeneracyPolicy::abort && degenerate_count > 0) {
        const long long first = first_degenerate.load();
        throw DegenerateReplication(first, "replication " + std::to_string(first) +
                                               " was degenerate (abort policy)");
    }
    if (degenerate_count == r)
        throw AllDegenerate("all " + std::to_string(r) + " replications were degenerate");

    const double target = cfg.scenario.alpha_shifted();
    const auto accp = detail::accumulate_moments(ap, degen);
    const auto accc = detail::accumulate_moments(ac, degen);
    const double reff = static_cast<double>(accp.count);

    auto fill = [&](const detail::MomentAccumulation& acc, MomentSet& ms, double& bias_se,
                    double& var_se) {
        ms.bias = acc.mean - target;
        ms.variance = acc.count > 1 ? acc.m2 / static_cast<double>(acc.count - 1) : 0.0;
        ms.mse = ms.bias * ms.bias + ms.variance;
        ms.order = MomentOrder::empirical;
        const double m2_pop = acc.m2 / reff;
        const double m4_pop = acc.m4 / reff;
        bias_se = std::sqrt(ms.variance / reff);
        var_se = std::sqrt(std::max(0.0, m4_pop - m2_pop * m2_pop) / reff);
    };

    SimResult res{};
    fill(accp, res.moments_p, res.standard_errors.bias_p, res.standard_errors.variance_p);
    fill(accc, res.moments_c, res.standard_errors.bias_c, res.standard_errors.variance_c);
    res.degenerate_count = degenerate_count;
    res.effective_replications = accp.count;
    return res;
}

// Exact conditional moments of both estimators for small n, by exhaustive
// enumeration of (n1+, n11, n00) with exact binomial probabilities. The
// naive input is fixed at its expectation beta' (the n << N' limit).
struct ExactMoments {
    MomentSet moments_p;
    MomentSet moments_c;
    double degenerate_probability;
};

namespace detail {

// log C(m, k)
inline double log_choose(long long m, long long k) {
    return std::lgamma(static_cast<double>(m) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(m - k) + 1.0);
}

// pmf of Binomial(m, p) at k, exact at the p in {0,1} edges
inline double binom_pmf(long long k, long long m, double p) {
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == m ? 1.0 : 0.0;
    return std::exp(log_choose(m, k) + static_cast<double>(k) * std::log(p) +
                    static_cast<double>(m - k) * std::log1p(-p));
}

}  // namespace detail

inline ExactMoments enumerate_small_exact(const ErrorModel& model, const Scenario& sc,
                                          long long max_n = 64,
                                          double tol = kDefaultSingularityTol) {
    if (sc.n > max_n)
        throw NTooLarge("n = " + std::to_string(sc.n) + " exceeds the enumeration guard max_n = " +
                        std::to_string(max_n));
    const long long n = sc.n;
    const double alpha = sc.alpha;
    const double p00 = model.p00, p11 = model.p11;
    const double alpha_star = derive_scalars(model, sc).beta_prime;
    const double target = sc.alpha_shifted();

    long double degen = 0.0L;
    long double wsum = 0.0L;
    long double sp = 0.0L, sp2 = 0.0L;  // weighted sums for the inversion estimator
    long double sc1 = 0.0L, sc2 = 0.0L; // weighted sums for the calibration estimator

    for (long long n1p = 0; n1p <= n; ++n1p) {
        const double w1 = detail::binom_pmf(n1p, n, alpha);
        if (w1 == 0.0) continue;
        const long long n0p = n - n1p;
        if (n1p == 0 || n0p == 0) {
            degen += w1;
            continue;
        }
        for (long long n11 = 0; n11 <= n1p; ++n11) {
            const double w2 = detail::binom_pmf(n11, n1p, p11);
            if (w2 == 0.0) continue;
            const long long n10 = n1p - n11;
            for (long long n00 = 0; n00 <= n0p; ++n00) {
                const double w3 = detail::binom_pmf(n00, n0p, p00);
                if (w3 == 0.0) continue;
                const long long n01 = n0p - n00;
                const double w = w1 * w2 * w3;
                const long long col1 = n11 + n01, col0 = n10 + n00;
                const double p11_hat = static_cast<double>(n11) / static_cast<double>(n1p);
                const double p00_hat = static_cast<double>(n00) / static_cast<double>(n0p);
                const double d_hat = p00_hat + p11_hat - 1.0;
                if (col1 == 0 || col0 == 0 || std::abs(d_hat) <= tol) {
                    degen += w;
                    continue;
                }
                const double vp = (alpha_star + p00_hat - 1.0) / d_hat;
                const double vc = alpha_star * (static_cast<double>(n11) / static_cast<double>(col1)) +
                                  (1.0 - alpha_star) *
                                      (static_cast<double>(n10) / static_cast<double>(col0));
                wsum += w;
                sp += w * vp;
                sp2 += static_cast<long double>(w) * vp * vp;
                sc1 += w * vc;
                sc2 += static_cast<long double>(w) * vc * vc;
            }
        }
    }

    if (wsum <= 0.0L)
        throw AllDegenerate("every enumerated outcome is degenerate for this scenario");

    auto finish = [&](long double s1, long double s2) {
        MomentSet ms{};
        const long double mean = s1 / wsum;
        ms.bias = static_cast<double>(mean - static_cast<long double>(target));
        ms.variance = static_cast<double>(s2 / wsum - mean * mean);
        if (ms.variance < 0.0) ms.variance = 0.0;  // rounding guard near variance 0
        ms.mse = ms.bias * ms.bias + ms.variance;
        ms.order = MomentOrder::exact;
        return ms;
    };

    ExactMoments out{finish(sp, sp2), finish(sc1, sc2), static_cast<double>(degen)};
    return out;
}

}  // namespace driftcorrect
