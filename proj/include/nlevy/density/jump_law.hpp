// Jump size laws: two-component Gaussian mixture and asymmetric double
// exponential (up/down exponential scales). Moments and the mgf are closed
// form; everything is templated on the scalar so Dual parameters propagate
// derivatives.

#pragma once

#include <string>

#include "nlevy/core/errors.hpp"
#include "nlevy/core/math.hpp"
#include "nlevy/core/rng.hpp"

namespace nlevy {

enum class JumpFamily { kGaussianMixture, kDoubleExponential };

inline const char* to_string(JumpFamily f) {
    return f == JumpFamily::kGaussianMixture ? "gaussian_mixture" : "double_exponential";
}

inline JumpFamily jump_family_from_string(const std::string& s) {
    if (s == "gaussian_mixture") return JumpFamily::kGaussianMixture;
    if (s == "double_exponential") return JumpFamily::kDoubleExponential;
    throw ConfigError("unknown jump family: " + s);
}

template <typename S>
struct JumpLawT {
    JumpFamily family = JumpFamily::kGaussianMixture;

    // Gaussian mixture: p N(mu1, tau1^2) + (1-p) N(mu2, tau2^2).
    S p{0.5}, mu1{0.0}, mu2{0.0}, tau1{0.01}, tau2{0.01};

    // Double exponential: up w.p. eta with Exp(beta_up) size, down w.p.
    // 1-eta with -Exp(beta_down) size.
    S eta{0.5}, beta_up{0.01}, beta_down{0.01};

    static JumpLawT gaussian_mixture(S p, S mu1, S mu2, S tau1, S tau2) {
        JumpLawT law;
        law.family = JumpFamily::kGaussianMixture;
        law.p = p;
        law.mu1 = mu1;
        law.mu2 = mu2;
        law.tau1 = tau1;
        law.tau2 = tau2;
        return law;
    }

    static JumpLawT double_exponential(S eta, S beta_up, S beta_down) {
        JumpLawT law;
        law.family = JumpFamily::kDoubleExponential;
        law.eta = eta;
        law.beta_up = beta_up;
        law.beta_down = beta_down;
        return law;
    }
};

using JumpLaw = JumpLawT<double>;

inline void validate(const JumpLaw& law) {
    if (law.family == JumpFamily::kGaussianMixture) {
        if (!(law.p >= 0.0 && law.p <= 1.0)) throw DomainError("jump law: p must lie in [0,1]");
        if (!(law.tau1 > 0.0 && law.tau2 > 0.0)) throw DomainError("jump law: tau must be > 0");
        if (!std::isfinite(law.mu1) || !std::isfinite(law.mu2))
            throw DomainError("jump law: non-finite mixture mean");
    } else {
        if (!(law.eta >= 0.0 && law.eta <= 1.0)) throw DomainError("jump law: eta must lie in [0,1]");
        if (!(law.beta_up > 0.0 && law.beta_down > 0.0))
            throw DomainError("jump law: beta scales must be > 0");
    }
}

template <typename S>
S jump_mean(const JumpLawT<S>& law) {
    if (law.family == JumpFamily::kGaussianMixture)
        return law.p * law.mu1 + (1.0 - law.p) * law.mu2;
    return law.eta * law.beta_up - (1.0 - law.eta) * law.beta_down;
}

// E[Z^2].
template <typename S>
S jump_second_moment(const JumpLawT<S>& law) {
    if (law.family == JumpFamily::kGaussianMixture) {
        return law.p * (law.mu1 * law.mu1 + law.tau1 * law.tau1) +
               (1.0 - law.p) * (law.mu2 * law.mu2 + law.tau2 * law.tau2);
    }
    return 2.0 * (law.eta * law.beta_up * law.beta_up +
                  (1.0 - law.eta) * law.beta_down * law.beta_down);
}

// E[|Z| 1{Z<0}]; for N(mu, tau^2) this is tau*phi(mu/tau) - mu*Phi(-mu/tau).
template <typename S>
S jump_neg_abs_mean(const JumpLawT<S>& law) {
    if (law.family == JumpFamily::kGaussianMixture) {
        const S r1 = law.mu1 / law.tau1, r2 = law.mu2 / law.tau2;
        const S part1 = law.tau1 * norm_pdf(r1) - law.mu1 * norm_cdf(-r1);
        const S part2 = law.tau2 * norm_pdf(r2) - law.mu2 * norm_cdf(-r2);
        return law.p * part1 + (1.0 - law.p) * part2;
    }
    return (1.0 - law.eta) * law.beta_down;
}

// Convergence strip (lo, hi) of the jump-size mgf; the Gaussian mixture
// converges everywhere.
inline std::pair<double, double> jump_mgf_strip(const JumpLaw& law) {
    if (law.family == JumpFamily::kGaussianMixture) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return {-inf, inf};
    }
    return {-1.0 / law.beta_down, 1.0 / law.beta_up};
}

// M_Z(u) = E[e^{uZ}]. Throws DomainError (naming the violated bound) when u
// is outside the open convergence strip of a double-exponential law.
template <typename S>
S jump_mgf(const JumpLawT<S>& law, const S& u) {
    if (law.family == JumpFamily::kGaussianMixture) {
        return law.p * exp(law.mu1 * u + 0.5 * law.tau1 * law.tau1 * u * u) +
               (1.0 - law.p) * exp(law.mu2 * u + 0.5 * law.tau2 * law.tau2 * u * u);
    }
    const double uv = value_of(u);
    const double hi = 1.0 / value_of(law.beta_up), lo = -1.0 / value_of(law.beta_down);
    if (!(uv < hi))
        throw DomainError("jump mgf diverges: u >= 1/beta_up = " + std::to_string(hi));
    if (!(uv > lo))
        throw DomainError("jump mgf diverges: u <= -1/beta_down = " + std::to_string(lo));
    return law.eta / (1.0 - law.beta_up * u) + (1.0 - law.eta) / (1.0 + law.beta_down * u);
}

inline double sample_jump(const JumpLaw& law, Rng& rng) {
    if (law.family == JumpFamily::kGaussianMixture) {
        const bool first = rng.bernoulli(law.p);
        const double z = rng.normal();
        return first ? law.mu1 + law.tau1 * z : law.mu2 + law.tau2 * z;
    }
    return rng.bernoulli(law.eta) ? rng.exponential(law.beta_up)
                                  : -rng.exponential(law.beta_down);
}

}  // namespace nlevy
