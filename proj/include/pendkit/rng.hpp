#pragma once

#include <cstdint>

namespace pendkit {

/// SplitMix64 pseudo-random generator (Steele, Lea & Flood / Vigna).
///
/// The algorithm is pinned so noise sequences reproduce bit-for-bit across
/// implementations and languages:
///
///     state += 0x9E3779B97F4A7C15
///     z = state
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     output = z ^ (z >> 31)
///
/// Doubles in [0, 1) take the top 53 bits of the output scaled by 2^-53.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit mantissa scaling.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi); degenerates to lo when lo == hi.
    double next_uniform(double lo, double hi) {
        return lo + next_double() * (hi - lo);
    }

private:
    std::uint64_t state_;
};

} // namespace pendkit
