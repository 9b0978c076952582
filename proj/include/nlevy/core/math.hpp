// Scalar special functions used across the project: normal pdf/cdf and its
// inverse, scaled complementary error function, stable exp(q)*Phi(z)
// products, regularized incomplete gamma, chi-square and Kolmogorov survival
// functions, log-sum-exp.
//
// Functions that appear inside likelihood formulas are templated on the
// scalar so they accept Dual<N> (see dual.hpp).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "nlevy/core/dual.hpp"
#include "nlevy/core/errors.hpp"

namespace nlevy {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kSqrt2Pi = 2.50662827463100050242;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kInvSqrtPi = 0.56418958354775628695;

// ---------------------------------------------------------------------------
// erfcx(x) = exp(x^2) erfc(x), for x >= 0.
// ---------------------------------------------------------------------------

inline double erfcx_pos(double x) {
    if (x < 15.0) return std::exp(x * x) * std::erfc(x);
    // Laplace continued fraction, evaluated bottom-up.
    double cf = 0.0;
    for (int k = 40; k >= 1; --k) cf = (0.5 * k) / (x + cf);
    return kInvSqrtPi / (x + cf);
}

template <int N>
Dual<N> erfcx_pos(const Dual<N>& x) {
    constexpr double two_over_sqrt_pi = 1.1283791670955126;
    const double e = erfcx_pos(x.v);
    return {e, ((2.0 * x.v * e - two_over_sqrt_pi) * x.d).eval()};
}

// ---------------------------------------------------------------------------
// Standard normal density / distribution.
// ---------------------------------------------------------------------------

template <typename S>
S norm_pdf(const S& x) {
    return kInvSqrt2Pi * exp(-0.5 * x * x);
}

template <typename S>
S norm_cdf(const S& x) {
    return 0.5 * erfc(-x * (1.0 / kSqrt2));
}

// exp(q) * Phi(z), evaluated without overflow. All call sites satisfy
// q - z^2/2 <= 0 up to rounding (the product is a bounded probability-like
// quantity); the erfcx route keeps every intermediate in range.
template <typename S>
S exp_mul_norm_cdf(const S& q, const S& z) {
    if (value_of(z) < 0.0) {
        return 0.5 * exp(q - 0.5 * z * z) * erfcx_pos(-z * (1.0 / kSqrt2));
    }
    return exp(q) - 0.5 * exp(q - 0.5 * z * z) * erfcx_pos(z * (1.0 / kSqrt2));
}

// log(Phi(z)) for doubles, accurate in the deep left tail.
inline double log_norm_cdf(double z) {
    if (z > -8.0) return std::log(norm_cdf(z));
    return -0.5 * z * z + std::log(0.5 * erfcx_pos(-z / kSqrt2));
}

// Inverse standard normal cdf (Acklam's rational approximation polished with
// one Halley step; good to ~1e-15 over (0,1)).
inline double norm_cdf_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("norm_cdf_inv: p must lie in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement.
    const double e = norm_cdf(x) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

// ---------------------------------------------------------------------------
// Regularized incomplete gamma (upper), chi-square and Kolmogorov tails.
// ---------------------------------------------------------------------------

// Q(a, x) = Gamma(a, x) / Gamma(a). Series for x < a + 1, Lentz continued
// fraction otherwise.
inline double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw DomainError("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi2_sf(double x, int df) {
    if (df < 1) throw DomainError("chi2_sf: df must be >= 1");
    if (x <= 0.0) return 1.0;
    if (df == 1) return std::erfc(std::sqrt(0.5 * x));
    if (df == 2) return std::exp(-0.5 * x);
    return gamma_q(0.5 * df, 0.5 * x);
}

// Asymptotic Kolmogorov distribution tail Q(t) = 2 sum (-1)^{k-1} exp(-2k^2t^2).
inline double kolmogorov_sf(double t) {
    if (t <= 0.0) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
        s += term;
        if (std::fabs(term) < 1e-16) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Small helpers.
// ---------------------------------------------------------------------------

template <typename S>
S log_sum_exp(const std::vector<S>& terms) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) m = std::max(m, value_of(t));
    if (!std::isfinite(m)) return S(m);
    S s(0.0);
    for (const auto& t : terms) s += exp(t - m);
    return m + log(s);
}

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

inline double binom_coeff(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

template <typename S>
S softplus(const S& x) {
    if (value_of(x) > 30.0) return x;
    if (value_of(x) < -30.0) return exp(x);
    return log1p(exp(x));
}

template <typename S>
S logistic(const S& x) {
    if (value_of(x) >= 0.0) return 1.0 / (1.0 + exp(-x));
    const S e = exp(x);
    return e / (1.0 + e);
}

}  // namespace nlevy
