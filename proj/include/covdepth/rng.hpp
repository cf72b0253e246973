#pragma once

#include <cstdint>

#include "covdepth/special.hpp"

namespace covdepth {

// Counter-style 64-bit generator (SplitMix64). An instance is an independent
// stream addressed by (seed, stream), so trials may run in any order or on
// any thread and still draw identical numbers. Outputs are identical across
// platforms: no stdlib distribution objects are involved.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    SplitMix64(std::uint64_t seed, std::uint64_t stream)
        : state_(mix(seed + kGolden * (stream + 1))) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix(state_);
    }

    // Uniform in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1).
    double next_double_open() {
        double u;
        do {
            u = next_double();
        } while (u <= 0.0);
        return u;
    }

    // Uniform integer in [0, n). Multiply-shift; bias is O(n / 2^64).
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal draw via the inverse CDF.
    double next_normal() { return norm_quantile(next_double_open()); }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
    std::uint64_t state_;
};

}  // namespace covdepth
