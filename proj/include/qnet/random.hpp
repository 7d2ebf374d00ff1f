#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qnet {

// Identifier of the generator algorithm and draw transforms, recorded in
// every simulation metadata header. Bump the suffix whenever the stream
// algorithm or the consumption pattern of any draw changes.
inline constexpr const char* kGeneratorId = "xoshiro256++/u53/bm2-1";

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

}  // namespace detail

// Deterministic random stream: xoshiro256++ with splitmix64 seed expansion.
// The same 64-bit seed yields the same sequence on every platform. Streams
// are single-owner; give each worker its own (see derive_seed).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& s : state_) s = detail::splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    // Uniform on [0,1) from the top 53 bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via the Box-Muller cosine branch. Consumes exactly two
    // uniforms per draw, so stream alignment does not depend on the values
    // drawn (no rejection loop, no cached second variate).
    double normal() {
        const double u1 = 1.0 - uniform();  // (0,1], keeps the log finite
        const double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    // One uniform; 1 with probability p.
    int bernoulli(double p) {
        return uniform() < p ? 1 : 0;
    }

private:
    std::array<std::uint64_t, 4> state_{};
};

// Splitting rule for parallel workers: worker k is seeded with master + k.
// The splitmix64 expansion inside RandomStream decorrelates adjacent seeds.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t worker) {
    return master + worker;
}

}  // namespace qnet
