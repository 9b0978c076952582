// Forward-mode scalar carrying N partial derivatives alongside the value.
//
// The density kernels are templated on their scalar type; instantiating them
// with Dual<N> propagates exact derivatives of the distribution parameters
// through every formula and quadrature (the quadrature nodes/weights are
// constants, so differentiation under the integral sign is automatic).

#pragma once

#include <Eigen/Core>
#include <cmath>

namespace nlevy {

template <int N>
struct Dual {
    using Grad = Eigen::Matrix<double, N, 1>;

    double v{0.0};
    Grad d{Grad::Zero()};

    Dual() = default;
    Dual(double value) : v(value), d(Grad::Zero()) {}  // NOLINT: implicit by design
    Dual(double value, const Grad& grad) : v(value), d(grad) {}

    // Seed variable `i` with derivative 1.
    static Dual variable(double value, int i) {
        Dual x(value);
        x.d[i] = 1.0;
        return x;
    }

    Dual operator-() const { return {-v, (-d).eval()}; }

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = d * o.v + o.d * v; v *= o.v; return *this; }
    Dual& operator/=(const Dual& o) {
        d = (d * o.v - o.d * v) / (o.v * o.v);
        v /= o.v;
        return *this;
    }
};

template <int N> Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N> Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N> Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <int N> Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }

template <int N> Dual<N> operator+(Dual<N> a, double b) { a.v += b; return a; }
template <int N> Dual<N> operator+(double a, Dual<N> b) { b.v += a; return b; }
template <int N> Dual<N> operator-(Dual<N> a, double b) { a.v -= b; return a; }
template <int N> Dual<N> operator-(double a, const Dual<N>& b) { return {a - b.v, (-b.d).eval()}; }
template <int N> Dual<N> operator*(Dual<N> a, double b) { a.v *= b; a.d *= b; return a; }
template <int N> Dual<N> operator*(double a, Dual<N> b) { b.v *= a; b.d *= a; return b; }
template <int N> Dual<N> operator/(Dual<N> a, double b) { a.v /= b; a.d /= b; return a; }
template <int N> Dual<N> operator/(double a, const Dual<N>& b) {
    return {a / b.v, (-(a / (b.v * b.v)) * b.d).eval()};
}

template <int N> bool operator<(const Dual<N>& a, const Dual<N>& b) { return a.v < b.v; }
template <int N> bool operator>(const Dual<N>& a, const Dual<N>& b) { return a.v > b.v; }
template <int N> bool operator<=(const Dual<N>& a, const Dual<N>& b) { return a.v <= b.v; }
template <int N> bool operator>=(const Dual<N>& a, const Dual<N>& b) { return a.v >= b.v; }
template <int N> bool operator<(const Dual<N>& a, double b) { return a.v < b; }
template <int N> bool operator>(const Dual<N>& a, double b) { return a.v > b; }
template <int N> bool operator<=(const Dual<N>& a, double b) { return a.v <= b; }
template <int N> bool operator>=(const Dual<N>& a, double b) { return a.v >= b; }
template <int N> bool operator<(double a, const Dual<N>& b) { return a < b.v; }
template <int N> bool operator>(double a, const Dual<N>& b) { return a > b.v; }

template <int N> Dual<N> exp(const Dual<N>& x) {
    const double e = std::exp(x.v);
    return {e, (e * x.d).eval()};
}

template <int N> Dual<N> log(const Dual<N>& x) {
    return {std::log(x.v), (x.d / x.v).eval()};
}

template <int N> Dual<N> log1p(const Dual<N>& x) {
    return {std::log1p(x.v), (x.d / (1.0 + x.v)).eval()};
}

template <int N> Dual<N> sqrt(const Dual<N>& x) {
    const double s = std::sqrt(x.v);
    return {s, (x.d / (2.0 * s)).eval()};
}

template <int N> Dual<N> fabs(const Dual<N>& x) { return x.v < 0.0 ? -x : x; }

template <int N> Dual<N> pow_int(Dual<N> x, int n) {
    Dual<N> r(1.0);
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

// erfc and the scaled complement erfcx(x) = exp(x^2) erfc(x);
// d/dx erfcx = 2 x erfcx(x) - 2/sqrt(pi).
template <int N> Dual<N> erfc(const Dual<N>& x) {
    constexpr double two_over_sqrt_pi = 1.1283791670955126;
    const double e = std::erfc(x.v);
    return {e, (-two_over_sqrt_pi * std::exp(-x.v * x.v) * x.d).eval()};
}

inline double value_of(double x) { return x; }
template <int N> double value_of(const Dual<N>& x) { return x.v; }

template <int N> Dual<N> min(const Dual<N>& a, const Dual<N>& b) { return a.v <= b.v ? a : b; }
template <int N> Dual<N> max(const Dual<N>& a, const Dual<N>& b) { return a.v >= b.v ? a : b; }

using std::erfc;
using std::exp;
using std::fabs;
using std::log;
using std::log1p;
using std::sqrt;

}  // namespace nlevy
