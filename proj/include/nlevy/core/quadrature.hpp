// Quadrature rules. Gauss nodes/weights come from the Golub-Welsch
// eigenproblem of the Jacobi matrix (Eigen's SelfAdjointEigenSolver);
// adaptive Simpson handles generic finite-interval integrands.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "nlevy/core/errors.hpp"

namespace nlevy {

struct QuadRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

namespace detail {

inline QuadRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                             double mu0) {
    const int n = static_cast<int>(diag.size());
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    jacobi.diagonal() = diag;
    for (int i = 0; i + 1 < n; ++i) {
        jacobi(i, i + 1) = offdiag[i];
        jacobi(i + 1, i) = offdiag[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    QuadRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

}  // namespace detail

// Gauss-Legendre on [-1, 1].
inline const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(n - 1);
    for (int i = 1; i < n; ++i) off[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
    return cache.emplace(n, detail::golub_welsch(diag, off, 2.0)).first->second;
}

// Generalized Gauss-Laguerre for weight t^alpha e^{-t} on [0, inf),
// normalized so the weights sum to Gamma(alpha + 1).
inline const QuadRule& gauss_laguerre(int n, int alpha) {
    static std::map<std::pair<int, int>, QuadRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    const auto key = std::make_pair(n, alpha);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Eigen::VectorXd diag(n), off(n - 1);
    for (int i = 0; i < n; ++i) diag[i] = 2.0 * i + alpha + 1.0;
    for (int i = 1; i < n; ++i) off[i - 1] = std::sqrt(i * (i + static_cast<double>(alpha)));
    return cache.emplace(key, detail::golub_welsch(diag, off, std::tgamma(alpha + 1.0)))
        .first->second;
}

// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
template <typename F>
auto gauss_legendre_integrate(const F& f, double a, double b, int n)
    -> decltype(f(0.0)) {
    const QuadRule& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    decltype(f(0.0)) acc = f(mid + half * rule.nodes[0]) * (half * rule.weights[0]);
    for (int i = 1; i < rule.nodes.size(); ++i) {
        acc += f(mid + half * rule.nodes[i]) * (half * rule.weights[i]);
    }
    return acc;
}

// Adaptive Simpson with an absolute tolerance. Throws NumericError if the
// recursion limit is hit before the tolerance is met.
namespace detail {

inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) throw NumericError("adaptive Simpson: tolerance not reached");
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int max_depth = 48) {
    if (!(b > a)) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace nlevy
