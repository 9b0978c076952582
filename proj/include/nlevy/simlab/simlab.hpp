// Synthetic price paths from a known state-dependent jump-diffusion. The
// driving state is a single AR(1) scalar so that ground truth stays
// recoverable; drift/vol/intensity maps are read once per day after the
// state updates, and jumps are thinned to at most one per intraday step.
// Also hosts the Monte-Carlo density oracle used by tests in other modules.

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "nlevy/density/compound.hpp"

namespace nlevy {

struct GroundTruthMaps {
    std::function<double(double)> drift_map;      // per-year drift mu(s)
    std::function<double(double)> vol_map;        // per-year volatility sigma(s) > 0
    std::function<double(double)> intensity_map;  // jumps per year lambda(s) >= 0
    JumpLaw jump_law;
    // AR(1) driving state: s' = mean + persistence (s - mean) + noise * xi.
    double state_mean = 0.0;
    double state_persistence = 0.95;
    double state_noise = 0.25;
};

struct SimConfig {
    int n_days = 2000;
    int intraday_steps = 78;  // five-minute analogue of a 6.5 h session
    std::uint64_t seed = 1;
    double dt = 1.0 / 252.0;  // year fraction per day
    GroundTruthMaps truth;
};

void validate(const SimConfig& cfg);

struct SimPath {
    std::vector<double> log_prices;     // n_days + 1, origin included
    std::vector<double> daily_returns;  // n_days
    Eigen::MatrixXd intraday_returns;   // n_days x intraday_steps
    std::vector<std::int64_t> jump_times;  // global step index day*steps + step
    std::vector<double> jump_sizes;
    std::vector<double> state_series;    // n_days
    std::vector<double> daily_jump_sum;  // n_days
};

SimPath simulate_path(const SimConfig& cfg);

struct EmpiricalDistribution {
    std::vector<double> sorted_samples;

    double cdf(double x) const;
    // Half-width of the Dvoretzky-Kiefer-Wolfowitz band at the given
    // confidence level.
    double dkw_epsilon(double confidence) const;
    double mean() const;
    double variance() const;
};

// Draws n_samples from the exact (untruncated) compound law with its own
// sampling code so density evaluations are checked against an independent
// path. Requires n_samples >= 1e5.
EmpiricalDistribution mc_density_oracle(const HorizonParams& law, int n_samples,
                                        std::uint64_t seed);

}  // namespace nlevy
