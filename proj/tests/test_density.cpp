// Density module tests: fixtures from hand computation, Monte-Carlo oracles
// via simlab, dense-grid CRPS oracles, and dual-number derivative checks
// against central finite differences.

#include <cmath>
#include <vector>

#include "doctest.h"
#include "nlevy/density/compound.hpp"
#include "nlevy/simlab/simlab.hpp"

using namespace nlevy;

namespace {

HorizonParams mixture_params(double mu, double sigma, double lambda, double p, double mu1,
                             double mu2, double tau1, double tau2) {
    HorizonParams params;
    params.mu = mu;
    params.sigma = sigma;
    params.lambda = lambda;
    params.jump = JumpLaw::gaussian_mixture(p, mu1, mu2, tau1, tau2);
    return params;
}

HorizonParams de_params(double mu, double sigma, double lambda, double eta, double bu,
                        double bd) {
    HorizonParams params;
    params.mu = mu;
    params.sigma = sigma;
    params.lambda = lambda;
    params.jump = JumpLaw::double_exponential(eta, bu, bd);
    return params;
}

// Independent Gaussian-mixture expansion of the truncated law, used by the
// closed-form CRPS oracle below (Gneiting-Raftery / Grimit et al. formula).
struct MixComp {
    double w, m, s2;
};

std::vector<MixComp> expand_components(const HorizonParams& p, int k_max) {
    std::vector<MixComp> comps;
    double mass = 0.0;
    double wk = std::exp(-p.lambda);
    for (int k = 0; k <= k_max; ++k) {
        if (k > 0) wk *= p.lambda / k;
        mass += wk;
        for (int j = 0; j <= k; ++j) {
            const double coef =
                wk * binom_coeff(k, j) * std::pow(p.jump.p, j) * std::pow(1.0 - p.jump.p, k - j);
            if (coef <= 0.0) continue;
            comps.push_back({coef, p.mu + j * p.jump.mu1 + (k - j) * p.jump.mu2,
                             p.sigma * p.sigma + j * p.jump.tau1 * p.jump.tau1 +
                                 (k - j) * p.jump.tau2 * p.jump.tau2});
        }
    }
    for (auto& c : comps) c.w /= mass;
    return comps;
}

double crps_mixture_closed_form(const HorizonParams& p, int k_max, double y) {
    const auto comps = expand_components(p, k_max);
    const auto A = [](double m, double s2) {
        const double s = std::sqrt(s2);
        const double z = m / s;
        return m * (2.0 * norm_cdf(z) - 1.0) + 2.0 * s * norm_pdf(z);
    };
    double first = 0.0, second = 0.0;
    for (const auto& a : comps) {
        first += a.w * A(y - a.m, a.s2);
        for (const auto& b : comps) second += a.w * b.w * A(a.m - b.m, a.s2 + b.s2);
    }
    return first - 0.5 * second;
}

}  // namespace

TEST_CASE("pdf: pure Gaussian fixture and symmetry") {
    DensityConfig cfg;
    const auto pure = mixture_params(0.0, 0.01, 0.0, 0.5, 0.0, 0.0, 0.01, 0.01);
    CHECK(pdf(pure, cfg, 0.0) == doctest::Approx(39.8942280401).epsilon(1e-9));

    const auto sym = mixture_params(0.0, 0.013, 0.25, 0.5, 0.02, -0.02, 0.015, 0.015);
    for (double y = 0.0; y <= 0.12; y += 0.004) {
        CHECK(pdf(sym, cfg, y) == doctest::Approx(pdf(sym, cfg, -y)).epsilon(1e-12));
    }
}

TEST_CASE("pdf integrates to the truncated mass, and to one after renormalization") {
    DensityConfig cfg;
    const std::vector<HorizonParams> laws = {
        mixture_params(0.001, 0.012, 0.35, 0.3, 0.03, -0.02, 0.01, 0.02),
        de_params(-0.002, 0.015, 0.4, 0.45, 0.02, 0.03),
    };
    for (const auto& params : laws) {
        const auto mom = moments(params);
        const double s = std::sqrt(mom.variance);
        double lo = mom.mean - 12.0 * s, hi = mom.mean + 12.0 * s;
        while (cdf(params, cfg, lo) > 1e-13) lo -= 6.0 * s;
        while (cdf(params, cfg, hi) < 1.0 - 1e-13) hi += 6.0 * s;
        const double renorm_mass = adaptive_simpson(
            [&](double y) { return pdf(params, cfg, y, true); }, lo, hi, 1e-11);
        CHECK(renorm_mass == doctest::Approx(1.0).epsilon(1e-8));
        const double raw_mass = adaptive_simpson(
            [&](double y) { return pdf(params, cfg, y, false); }, lo, hi, 1e-11);
        const double expected = std::exp(log_truncation_mass(params.lambda, cfg.k_max));
        CHECK(raw_mass == doctest::Approx(expected).epsilon(1e-8));
        CHECK(expected <= 1.0 + 1e-15);
    }
}

TEST_CASE("cdf vs 1e6-sample Monte-Carlo oracle (mixture and double exponential)") {
    DensityConfig cfg;
    const std::vector<std::pair<HorizonParams, std::uint64_t>> laws = {
        {mixture_params(0.0, 0.01, 0.1, 1.0, 0.0, 0.0, 0.05, 0.05), 101},
        {de_params(0.0, 0.012, 0.3, 0.6, 0.025, 0.035), 17},
    };
    for (const auto& [params, seed] : laws) {
        const auto oracle = mc_density_oracle(params, 1000000, seed);
        const auto mom = moments(params);
        const double s = std::sqrt(mom.variance);
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double y = mom.mean - 5.0 * s + 10.0 * s * i / 199.0;
            worst = std::max(worst, std::fabs(cdf(params, cfg, y) - oracle.cdf(y)));
        }
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("mc oracle sanity: symmetric median, compound variance, DKW across seeds") {
    auto pure = mixture_params(0.0, 1.0, 0.0, 0.5, 0.0, 0.0, 0.01, 0.01);
    const auto dist = mc_density_oracle(pure, 1000000, 7);
    CHECK(dist.cdf(0.0) > 0.495);
    CHECK(dist.cdf(0.0) < 0.505);

    const auto jumpy = mixture_params(0.0, 0.01, 0.2, 0.5, 0.0, 0.0, 0.1, 0.1);
    const auto dist2 = mc_density_oracle(jumpy, 1000000, 8);
    const double expected_var = 0.01 * 0.01 + 0.2 * 0.1 * 0.1;
    CHECK(dist2.variance() == doctest::Approx(expected_var).epsilon(0.01));

    const auto a = mc_density_oracle(jumpy, 200000, 11);
    const auto b = mc_density_oracle(jumpy, 200000, 12);
    const double band = a.dkw_epsilon(0.99) + b.dkw_epsilon(0.99);
    double worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double y = -0.2 + 0.4 * i / 100.0;
        worst = std::max(worst, std::fabs(a.cdf(y) - b.cdf(y)));
    }
    CHECK(worst < band);
}

TEST_CASE("cdf monotone and quantile fixtures") {
    DensityConfig cfg;
    const auto gauss = mixture_params(0.003, 1.0, 0.0, 0.5, 0.0, 0.0, 0.01, 0.01);
    CHECK(quantile(gauss, cfg, 0.5) == doctest::Approx(0.003).epsilon(1e-9));

    const auto std_gauss = mixture_params(0.0, 1.0, 0.0, 0.5, 0.0, 0.0, 0.01, 0.01);
    CHECK(std::fabs(quantile(std_gauss, cfg, 0.05) - (-1.6448536270)) < 1e-4);

    Rng rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const auto params =
            mixture_params(0.01 * rng.normal(), 0.005 + 0.02 * rng.uniform(),
                           0.5 * rng.uniform(), rng.uniform(), 0.03 * rng.normal(),
                           0.03 * rng.normal(), 0.005 + 0.02 * rng.uniform(),
                           0.005 + 0.02 * rng.uniform());
        double prev = -1.0;
        const auto mom = moments(params);
        const double s = std::sqrt(mom.variance);
        for (int i = 0; i <= 60; ++i) {
            const double y = mom.mean - 6.0 * s + 12.0 * s * i / 60.0;
            const double F = cdf(params, cfg, y);
            CHECK(F >= prev - 1e-14);
            prev = F;
        }
        const double u = 0.02 + 0.96 * rng.uniform();
        CHECK(cdf(params, cfg, quantile(params, cfg, u)) == doctest::Approx(u).epsilon(1e-7));
    }
}

TEST_CASE("moments fixtures and Monte-Carlo cross-check") {
    const auto sym = mixture_params(0.001, 0.02, 0.3, 0.5, 0.02, -0.02, 0.01, 0.01);
    const auto mom = moments(sym);
    CHECK(jump_mean(sym.jump) == doctest::Approx(0.0));
    CHECK(mom.e_z2 == doctest::Approx(0.0005).epsilon(1e-12));
    CHECK(mom.mean == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(mom.variance == doctest::Approx(0.02 * 0.02 + 0.3 * 0.0005).epsilon(1e-12));

    // E[|Z| 1{Z<0}] equals E[|Z|]/2 for the symmetric law; MC within 1%.
    Rng rng(5150);
    double acc = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const double z = sample_jump(sym.jump, rng);
        if (z < 0.0) acc += -z;
    }
    CHECK(mom.e_neg_abs_z == doctest::Approx(acc / n).epsilon(0.01));

    const auto nolam = mixture_params(0.004, 0.015, 0.0, 0.3, 0.05, -0.01, 0.02, 0.03);
    const auto m0 = moments(nolam);
    CHECK(m0.mean == doctest::Approx(0.004));
    CHECK(m0.variance == doctest::Approx(0.015 * 0.015));
}

TEST_CASE("jump mgf fixtures and convergence strip") {
    const auto gj = JumpLaw::gaussian_mixture(1.0, 0.0, 0.0, 0.1, 0.1);
    CHECK(jump_mgf(gj, 1.0) == doctest::Approx(std::exp(0.005)).epsilon(1e-12));
    CHECK(jump_mgf(gj, 0.0) == doctest::Approx(1.0));

    const auto de = JumpLaw::double_exponential(0.5, 0.02, 0.05);
    CHECK(jump_mgf(de, 0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(jump_mgf(de, 50.0), DomainError);   // u = 1/beta_up
    CHECK_THROWS_AS(jump_mgf(de, 60.0), DomainError);
    CHECK_THROWS_AS(jump_mgf(de, -20.0), DomainError);  // u = -1/beta_down
    CHECK(std::isfinite(jump_mgf(de, 49.0)));
}

TEST_CASE("quasi_loglik: Gaussian case, consistency with pdf, truncation sweep") {
    DensityConfig cfg;
    const auto gauss = mixture_params(0.002, 0.013, 0.0, 0.5, 0.0, 0.0, 0.01, 0.01);
    const double y = 0.004;
    const double expected = -0.5 * std::log(2.0 * kPi * 0.013 * 0.013) -
                            0.5 * (y - 0.002) * (y - 0.002) / (0.013 * 0.013);
    CHECK(quasi_loglik(gauss, cfg, y) == doctest::Approx(expected).epsilon(1e-12));

    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const auto params = mixture_params(0.002 * rng.normal(), 0.008 + 0.01 * rng.uniform(),
                                           0.4 * rng.uniform(), rng.uniform(), 0.02 * rng.normal(),
                                           0.02 * rng.normal(), 0.01, 0.015);
        const double yy = 0.05 * rng.normal();
        CHECK(quasi_loglik(params, cfg, yy, false) ==
              doctest::Approx(std::log(pdf(params, cfg, yy, false))).epsilon(1e-12));
    }

    // Truncation sweep. With concentrated jumps the renormalized K=3 and
    // K=10 log-likelihoods agree to 1e-6; with dispersed jumps the gap is
    // governed by the Poisson tail mass beyond K (2.66e-4 at lambda = 0.3)
    // amplified by the density ratio of the dropped components, which grows
    // toward the range edges. Both regimes are pinned here.
    DensityConfig k3 = cfg, k10 = cfg;
    k3.k_max = 3;
    k10.k_max = 10;
    const auto small = mixture_params(0.0, 0.012, 0.3, 0.4, 0.0, 0.0, 1e-6, 1e-6);
    const auto mom_small = moments(small);
    const double s_small = std::sqrt(mom_small.variance);
    for (int i = 0; i <= 40; ++i) {
        const double yy = mom_small.mean - 6.0 * s_small + 12.0 * s_small * i / 40.0;
        CHECK(std::fabs(quasi_loglik(small, k3, yy, true) - quasi_loglik(small, k10, yy, true)) <
              1e-6);
    }
    const auto mid = mixture_params(0.0, 0.012, 0.3, 0.4, 0.01, -0.012, 0.008, 0.01);
    const auto mom_mid = moments(mid);
    const double s_mid = std::sqrt(mom_mid.variance);
    const double tail_mass = 1.0 - std::exp(log_truncation_mass(0.3, 3));
    CHECK(std::fabs(quasi_loglik(mid, k3, mom_mid.mean, true) -
                    quasi_loglik(mid, k10, mom_mid.mean, true)) < 5.0 * tail_mass);
    for (int i = 0; i <= 40; ++i) {
        const double yy = mom_mid.mean - 6.0 * s_mid + 12.0 * s_mid * i / 40.0;
        CHECK(std::fabs(quasi_loglik(mid, k3, yy, true) - quasi_loglik(mid, k10, yy, true)) < 0.2);
    }
    CHECK(std::isfinite(quasi_loglik(mid, cfg, 5.0)));
    CHECK(std::isfinite(quasi_loglik(de_params(0.0, 0.01, 0.2, 0.5, 0.02, 0.02), cfg, -3.0)));
}

TEST_CASE("crps: closed form vs numeric, point-mass limit, mixture oracle") {
    DensityConfig cfg;
    const auto gauss = mixture_params(0.1, 1.0, 0.0, 0.5, 0.0, 0.0, 0.01, 0.01);
    const double closed = crps(gauss, cfg, 0.1);
    CHECK(closed == doctest::Approx(1.0 * 0.2336949850).epsilon(1e-7));
    CHECK(std::fabs(crps_numeric(gauss, cfg, 0.1) - closed) < 1e-6);
    CHECK(std::fabs(crps_numeric(gauss, cfg, 0.93) - crps(gauss, cfg, 0.93)) < 1e-6);

    const auto point = mixture_params(0.002, 1e-8, 0.0, 0.5, 0.0, 0.0, 0.01, 0.01);
    CHECK(std::fabs(crps(point, cfg, 0.0141) - std::fabs(0.0141 - 0.002)) < 1e-6);

    const auto mix = mixture_params(0.001, 0.011, 0.35, 0.4, 0.025, -0.02, 0.012, 0.018);
    for (double y : {-0.03, 0.0, 0.012, 0.06}) {
        const double numeric = crps(mix, cfg, y);
        const double oracle = crps_mixture_closed_form(mix, cfg.k_max, y);
        CHECK(std::fabs(numeric - oracle) / oracle < 1e-4);
    }

    // Dense-grid trapezoid oracle on one case (slow path, coarse bound).
    {
        const double y = 0.012;
        const auto mom = moments(mix);
        const double s = std::sqrt(mom.variance);
        const double lo = mom.mean - 14.0 * s, hi = mom.mean + 14.0 * s;
        const int n = 100000;
        double acc = 0.0;
        double prev_val = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double z = lo + (hi - lo) * i / n;
            const double F = cdf(mix, cfg, z);
            const double ind = (y <= z) ? 1.0 : 0.0;
            const double val = (F - ind) * (F - ind);
            if (i > 0) acc += 0.5 * (val + prev_val) * (hi - lo) / n;
            prev_val = val;
        }
        CHECK(std::fabs(crps(mix, cfg, y) - acc) / acc < 1e-4);
    }
}

TEST_CASE("sampling: determinism, KS against Gaussian, moment match") {
    DensityConfig cfg;
    const auto gauss = mixture_params(0.0, 1.0, 0.0, 0.5, 0.0, 0.0, 0.01, 0.01);
    const auto draws = sample(gauss, 100000, 31337);
    const auto draws2 = sample(gauss, 100000, 31337);
    CHECK(draws == draws2);

    auto sorted = draws;
    std::sort(sorted.begin(), sorted.end());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double F = norm_cdf(sorted[i]);
        d = std::max(d, std::fabs(F - (i + 1.0) / sorted.size()));
        d = std::max(d, std::fabs(F - static_cast<double>(i) / sorted.size()));
    }
    CHECK(kolmogorov_sf(std::sqrt(static_cast<double>(sorted.size())) * d) > 0.01);

    const auto mix = mixture_params(0.002, 0.015, 0.4, 0.3, 0.03, -0.015, 0.01, 0.02);
    const auto mom = moments(mix);
    const int n = 200000;
    const auto xs = sample(mix, n, 777);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (n - 1);
    // E[(X-m)^4] needed for the variance of the sample variance; bound it
    // loosely by 3 var^2 * kurtosis margin.
    const double se_mean = std::sqrt(mom.variance / n);
    CHECK(std::fabs(mean - mom.mean) < 3.0 * se_mean);
    const double se_var = mom.variance * std::sqrt(2.0 / n) * 3.0;  // kurtosis slack
    CHECK(std::fabs(var - mom.variance) < 3.0 * se_var);
}

TEST_CASE("sampling vs pdf: chi-square goodness of fit at 1%, 50 bins") {
    DensityConfig cfg;
    Rng rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        HorizonParams params;
        if (trial % 2 == 0) {
            params = mixture_params(0.01 * rng.normal(), 0.01 + 0.01 * rng.uniform(),
                                    0.5 * rng.uniform(), 0.2 + 0.6 * rng.uniform(),
                                    0.02 * rng.normal(), 0.02 * rng.normal(),
                                    0.008 + 0.01 * rng.uniform(), 0.008 + 0.01 * rng.uniform());
        } else {
            params = de_params(0.01 * rng.normal(), 0.01 + 0.01 * rng.uniform(),
                               0.5 * rng.uniform(), 0.2 + 0.6 * rng.uniform(),
                               0.01 + 0.02 * rng.uniform(), 0.01 + 0.02 * rng.uniform());
        }
        // Bin by model quantiles so expected counts are uniform; the exact
        // sampler is untruncated, so compare against the raw truncated mass
        // per bin: use high k_max to make truncation negligible.
        DensityConfig fine = cfg;
        fine.k_max = 15;
        const int bins = 50, n = 100000;
        std::vector<double> edges(bins + 1);
        edges[0] = -std::numeric_limits<double>::infinity();
        edges[bins] = std::numeric_limits<double>::infinity();
        for (int b = 1; b < bins; ++b)
            edges[b] = quantile(params, fine, static_cast<double>(b) / bins);
        const auto xs = sample(params, n, 4000 + trial);
        std::vector<int> counts(bins, 0);
        for (double x : xs) {
            int b = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), x) -
                                     edges.begin()) - 1;
            counts[std::clamp(b, 0, bins - 1)]++;
        }
        double stat = 0.0;
        const double expect = static_cast<double>(n) / bins;
        for (int b = 0; b < bins; ++b)
            stat += (counts[b] - expect) * (counts[b] - expect) / expect;
        CHECK(chi2_sf(stat, bins - 1) > 0.01);
    }
}

TEST_CASE("dual-number parameter derivatives match central finite differences") {
    DensityConfig cfg;
    const double h = 1e-6;
    Rng rng(808);
    for (int trial = 0; trial < 12; ++trial) {
        const bool mixture = trial % 2 == 0;
        const double y = 0.03 * rng.normal();
        std::vector<double> base;
        if (mixture) {
            base = {0.002 * rng.normal(), 0.008 + 0.012 * rng.uniform(), 0.05 + 0.4 * rng.uniform(),
                    0.2 + 0.6 * rng.uniform(), 0.02 * rng.normal(), 0.02 * rng.normal(),
                    0.006 + 0.015 * rng.uniform(), 0.006 + 0.015 * rng.uniform()};
        } else {
            base = {0.002 * rng.normal(), 0.008 + 0.012 * rng.uniform(), 0.05 + 0.4 * rng.uniform(),
                    0.2 + 0.6 * rng.uniform(), 0.01 + 0.02 * rng.uniform(),
                    0.01 + 0.02 * rng.uniform()};
        }
        const auto eval = [&](const std::vector<double>& v) {
            HorizonParams p;
            p.mu = v[0];
            p.sigma = v[1];
            p.lambda = v[2];
            p.jump = mixture ? JumpLaw::gaussian_mixture(v[3], v[4], v[5], v[6], v[7])
                             : JumpLaw::double_exponential(v[3], v[4], v[5]);
            return quasi_loglik(p, cfg, y, false);
        };
        using D8 = Dual<8>;
        HorizonParamsT<D8> dp;
        dp.mu = D8::variable(base[0], 0);
        dp.sigma = D8::variable(base[1], 1);
        dp.lambda = D8::variable(base[2], 2);
        if (mixture) {
            dp.jump = JumpLawT<D8>::gaussian_mixture(
                D8::variable(base[3], 3), D8::variable(base[4], 4), D8::variable(base[5], 5),
                D8::variable(base[6], 6), D8::variable(base[7], 7));
        } else {
            dp.jump = JumpLawT<D8>::double_exponential(
                D8::variable(base[3], 3), D8::variable(base[4], 4), D8::variable(base[5], 5));
        }
        const D8 ll = quasi_loglik(dp, cfg, y, false);
        CHECK(ll.v == doctest::Approx(eval(base)).epsilon(1e-12));
        for (std::size_t i = 0; i < base.size(); ++i) {
            auto up = base, dn = base;
            up[i] += h;
            dn[i] -= h;
            const double fd = (eval(up) - eval(dn)) / (2.0 * h);
            CHECK(ll.d[i] == doctest::Approx(fd).epsilon(5e-5).scale(1.0 + std::fabs(fd)));
        }
    }
}
