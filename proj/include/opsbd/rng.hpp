#pragma once

/// @file rng.hpp
/// @brief Platform-independent seeded random source.
///
/// The standard distributions (`uniform_int_distribution`, `normal_distribution`, ...)
/// are implementation-defined, so runs would not reproduce across standard
/// libraries. Everything here is derived from the raw 64-bit output of
/// `std::mt19937_64`, whose sequence is fixed by the standard.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace opsbd {

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t index(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Box-Muller; one draw per call (the second variate is discarded so the
    /// stream position depends only on the number of calls).
    double normal(double mean, double sd) {
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return mean + sd * z;
    }

    // UniformRandomBitGenerator surface, for std::shuffle-free helpers only.
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return UINT64_MAX; }
    result_type operator()() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace opsbd
