#include "nlevy/simlab/simlab.hpp"

#include <algorithm>
#include <cmath>

#include "nlevy/core/errors.hpp"
#include "nlevy/core/rng.hpp"

namespace nlevy {

void validate(const SimConfig& cfg) {
    if (cfg.n_days < 2) throw ConfigError("sim config: n_days must be >= 2");
    if (cfg.intraday_steps < 2) throw ConfigError("sim config: intraday_steps must be >= 2");
    if (!(cfg.dt > 0.0)) throw ConfigError("sim config: dt must be > 0");
    if (!cfg.truth.drift_map || !cfg.truth.vol_map || !cfg.truth.intensity_map)
        throw ConfigError("sim config: drift/vol/intensity maps must all be set");
    if (!(std::fabs(cfg.truth.state_persistence) < 1.0))
        throw ConfigError("sim config: state persistence must lie in (-1,1)");
    validate(cfg.truth.jump_law);
}

SimPath simulate_path(const SimConfig& cfg) {
    validate(cfg);
    Rng rng(cfg.seed);

    const int n = cfg.n_days, steps = cfg.intraday_steps;
    SimPath path;
    path.log_prices.resize(n + 1);
    path.daily_returns.resize(n);
    path.intraday_returns.resize(n, steps);
    path.state_series.resize(n);
    path.daily_jump_sum.assign(n, 0.0);

    const double dt_step = cfg.dt / steps;
    const double sqrt_dt_step = std::sqrt(dt_step);

    double y = std::log(100.0);
    double state = cfg.truth.state_mean;
    path.log_prices[0] = y;

    for (int day = 0; day < n; ++day) {
        // State moves first, then the day's parameters are read from it.
        state = cfg.truth.state_mean +
                cfg.truth.state_persistence * (state - cfg.truth.state_mean) +
                cfg.truth.state_noise * rng.normal();
        path.state_series[day] = state;

        const double mu = cfg.truth.drift_map(state);
        const double sigma = cfg.truth.vol_map(state);
        const double lambda = cfg.truth.intensity_map(state);
        if (!(sigma > 0.0) && sigma != 0.0)
            throw ConfigError("sim config: vol_map produced a negative value");
        if (lambda < 0.0) throw ConfigError("sim config: intensity_map produced a negative value");

        const double p_jump = std::min(1.0, lambda * cfg.dt / steps);
        double day_ret = 0.0;
        for (int s = 0; s < steps; ++s) {
            double r = mu * dt_step + sigma * sqrt_dt_step * rng.normal();
            if (rng.bernoulli(p_jump)) {
                const double z = sample_jump(cfg.truth.jump_law, rng);
                r += z;
                path.jump_times.push_back(static_cast<std::int64_t>(day) * steps + s);
                path.jump_sizes.push_back(z);
                path.daily_jump_sum[day] += z;
            }
            path.intraday_returns(day, s) = r;
            day_ret += r;
        }
        path.daily_returns[day] = day_ret;
        y += day_ret;
        path.log_prices[day + 1] = y;
    }
    return path;
}

double EmpiricalDistribution::cdf(double x) const {
    const auto it = std::upper_bound(sorted_samples.begin(), sorted_samples.end(), x);
    return static_cast<double>(it - sorted_samples.begin()) / sorted_samples.size();
}

double EmpiricalDistribution::dkw_epsilon(double confidence) const {
    return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * sorted_samples.size()));
}

double EmpiricalDistribution::mean() const {
    double s = 0.0;
    for (double x : sorted_samples) s += x;
    return s / sorted_samples.size();
}

double EmpiricalDistribution::variance() const {
    const double m = mean();
    double s = 0.0;
    for (double x : sorted_samples) s += (x - m) * (x - m);
    return s / (sorted_samples.size() - 1);
}

EmpiricalDistribution mc_density_oracle(const HorizonParams& law, int n_samples,
                                        std::uint64_t seed) {
    if (n_samples < 100000) throw ConfigError("mc_density_oracle: need at least 1e5 samples");
    validate(law);
    Rng rng(seed);
    EmpiricalDistribution dist;
    dist.sorted_samples.resize(n_samples);
    for (auto& x : dist.sorted_samples) {
        x = law.mu + law.sigma * rng.normal();
        const int k = rng.poisson(law.lambda);
        for (int i = 0; i < k; ++i) {
            // Independent re-implementation of the jump draw (test oracle).
            if (law.jump.family == JumpFamily::kGaussianMixture) {
                const bool first = rng.uniform() < law.jump.p;
                x += (first ? law.jump.mu1 : law.jump.mu2) +
                     (first ? law.jump.tau1 : law.jump.tau2) * rng.normal();
            } else {
                if (rng.uniform() < law.jump.eta)
                    x += -law.jump.beta_up * std::log(rng.uniform());
                else
                    x -= -law.jump.beta_down * std::log(rng.uniform());
            }
        }
    }
    std::sort(dist.sorted_samples.begin(), dist.sorted_samples.end());
    return dist;
}

}  // namespace nlevy
