#pragma once

// Self-contained random stream so that seeded runs replay identically on
// every platform: xoshiro256** for the integer stream, Box-Muller for
// normal variates. std::normal_distribution is deliberately avoided (its
// algorithm is implementation-defined).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

namespace curvetrak {

/// Identity recorded in every RunSummary. Bump when the stream changes.
inline const std::string kRngId = "xoshiro256ss/box-muller-v1";

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = detail::splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal draw. Box-Muller (trigonometric form); consumes
    /// exactly two u64 draws per variate, no cached second value.
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t s_[4]{};
};

/// Per-run seed for sweep combination k: base_seed XOR splitmix64(k).
/// Adding sweep values never perturbs the seeds of earlier combinations.
inline std::uint64_t derive_sweep_seed(std::uint64_t base_seed, std::uint64_t combination_index) {
    std::uint64_t sm = combination_index;
    return base_seed ^ detail::splitmix64(sm);
}

}  // namespace curvetrak
