#pragma once

// Exact Binomial(n, p) sampling.
//
// Two classic exact methods, chosen by the expected count:
//   - inversion (BINV) when n * min(p, 1-p) < 30: walks the CDF starting
//     from P(X=0) = q^n, which cannot underflow in this regime;
//   - BTPE (Binomial Triangle-Parallelogram-Exponential) otherwise: the
//     Kachitvichyanukul & Schmeiser rejection sampler whose acceptance test
//     uses the exact pmf, so the returned distribution is exact.
// Both consume uniforms from the caller's generator only, keeping draws
// fully deterministic given the generator state.

#include <cmath>
#include <cstdint>

#include "driftcorrect/errors.hpp"
#include "driftcorrect/rng.hpp"

namespace driftcorrect {

namespace detail {

inline long long binomial_inversion(Xoshiro256pp& rng, long long n, double p) {
    const double q = 1.0 - p;
    const double qn = std::exp(static_cast<double>(n) * std::log(q));
    const double np = static_cast<double>(n) * p;
    const double bound = std::min(static_cast<double>(n), np + 10.0 * std::sqrt(np * q + 1.0));

    double u = rng.uniform01();
    double px = qn;
    double x = 0.0;
    while (u > px) {
        x += 1.0;
        if (x > bound) {  // fp tail guard: restart the search
            x = 0.0;
            px = qn;
            u = rng.uniform01();
            continue;
        }
        u -= px;
        px = ((static_cast<double>(n) - x + 1.0) * p * px) / (x * q);
    }
    return static_cast<long long>(x);
}

inline long long binomial_btpe(Xoshiro256pp& rng, long long n, double p) {
    // setup; r = success probability folded into [0, 0.5]
    const double r = std::min(p, 1.0 - p);
    const double q = 1.0 - r;
    const double nd = static_cast<double>(n);
    const double fm = nd * r + r;
    const long long m = static_cast<long long>(fm);
    const double md = static_cast<double>(m);
    const double nrq = nd * r * q;
    const double p1 = std::floor(2.195 * std::sqrt(nrq) - 4.6 * q) + 0.5;
    const double xm = md + 0.5;
    const double xl = xm - p1;
    const double xr = xm + p1;
    const double c = 0.134 + 20.5 / (15.3 + md);
    double a = (fm - xl) / (fm - xl * r);
    const double laml = a * (1.0 + a / 2.0);
    a = (xr - fm) / (xr * q);
    const double lamr = a * (1.0 + a / 2.0);
    const double p2 = p1 * (1.0 + 2.0 * c);
    const double p3 = p2 + c / laml;
    const double p4 = p3 + c / lamr;

    double y = 0.0;
    for (;;) {
        // region selection
        const double u = rng.uniform01() * p4;
        double v = rng.uniform01();
        if (u <= p1) {  // triangular center: immediate accept
            y = std::floor(xm - p1 * v + u);
            break;
        }
        if (u <= p2) {  // parallelogram
            const double x = xl + (u - p1) / c;
            v = v * c + 1.0 - std::abs(md - x + 0.5) / p1;
            if (v > 1.0) continue;
            y = std::floor(x);
        } else if (u <= p3) {  // left exponential tail
            y = std::floor(xl + std::log(v) / laml);
            if (y < 0.0) continue;
            v = v * (u - p2) * laml;
        } else {  // right exponential tail
            y = std::floor(xr - std::log(v) / lamr);
            if (y > nd) continue;
            v = v * (u - p3) * lamr;
        }

        // acceptance test against the exact pmf ratio f(y)/f(m)
        const double k = std::abs(y - md);
        if (k <= 20.0 || k >= nrq / 2.0 - 1.0) {
            // explicit product of pmf ratios
            const double s = r / q;
            const double aa = s * (nd + 1.0);
            double f = 1.0;
            if (md < y) {
                for (double i = md + 1.0; i <= y; i += 1.0) f *= (aa / i - s);
            } else if (md > y) {
                for (double i = y + 1.0; i <= md; i += 1.0) f /= (aa / i - s);
            }
            if (v <= f) break;
            continue;
        }
        // squeeze around the log pmf ratio, then exact Stirling-corrected test
        const double rho =
            (k / nrq) * ((k * (k / 3.0 + 0.625) + 0.16666666666666666) / nrq + 0.5);
        const double t = -k * k / (2.0 * nrq);
        const double alog = std::log(v);
        if (alog < t - rho) break;
        if (alog > t + rho) continue;

        const double x1 = y + 1.0;
        const double f1 = md + 1.0;
        const double z = nd + 1.0 - md;
        const double w = nd - y + 1.0;
        const double x2 = x1 * x1;
        const double f2 = f1 * f1;
        const double z2 = z * z;
        const double w2 = w * w;
        const double bound =
            xm * std::log(f1 / x1) + (nd - md + 0.5) * std::log(z / w) +
            (y - md) * std::log(w * r / (x1 * q)) +
            (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / f2) / f2) / f2) / f2) / f1 / 166320.0 +
            (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / z2) / z2) / z2) / z2) / z / 166320.0 +
            (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / x2) / x2) / x2) / x2) / x1 / 166320.0 +
            (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / w2) / w2) / w2) / w2) / w / 166320.0;
        if (alog <= bound) break;
    }

    long long iy = static_cast<long long>(y);
    if (p > 0.5) iy = n - iy;
    return iy;
}

}  // namespace detail

// Draws one Binomial(n, p) variate using the caller's generator.
inline long long binomial_draw(Xoshiro256pp& rng, long long n, double p) {
    if (n < 0) throw ValidationError("binomial_draw: n must be nonnegative");
    if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("binomial_draw: p must lie in [0, 1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    const double folded = std::min(p, 1.0 - p);
    if (static_cast<double>(n) * folded < 30.0) {
        if (p <= 0.5) return detail::binomial_inversion(rng, n, p);
        return n - detail::binomial_inversion(rng, n, 1.0 - p);
    }
    return detail::binomial_btpe(rng, n, p);
}

}  // namespace driftcorrect
