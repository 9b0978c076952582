// Deterministic random number generation. xoshiro256++ seeded through
// splitmix64; normal draws via the inverse cdf so every stream is a pure
// function of the seed (no hidden distribution state). Stage seeds are
// derived from the global seed by FNV-1a hashing of the stage name.

#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "nlevy/core/math.hpp"

namespace nlevy {

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 1469598103934665603ull) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view stage) {
    char buf[8];
    std::memcpy(buf, &global_seed, 8);
    return fnv1a64(stage, fnv1a64(std::string_view(buf, 8)));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 expansion of the seed into the xoshiro state.
        std::uint64_t x = seed;
        for (auto& s : state_) {
            x += 0x9e3779b97f4a7c15ull;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            s = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1).
    double uniform() {
        const std::uint64_t u = next_u64() >> 11;  // 53 bits
        return (static_cast<double>(u) + 0.5) * 0x1.0p-53;
    }

    double normal() { return norm_cdf_inv(uniform()); }

    double exponential(double scale) { return -scale * std::log(uniform()); }

    // Knuth's method; intensities in this project are bounded well below 30.
    int poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        const double limit = std::exp(-lambda);
        double prod = 1.0;
        int k = -1;
        do {
            prod *= uniform();
            ++k;
        } while (prod > limit);
        return k;
    }

    bool bernoulli(double p) { return uniform() < p; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

}  // namespace nlevy
