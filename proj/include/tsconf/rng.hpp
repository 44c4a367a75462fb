#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>
#include <random>

namespace tsconf {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * Counter-based random stream: stream i of a master seed is seeded with
 * splitmix64(splitmix64(master) ^ splitmix64(i)). Trial i always sees the
 * same stream regardless of how trials are distributed across workers.
 */
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : engine_(splitmix64(splitmix64(master_seed) ^ splitmix64(stream_index))) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in {0, ..., bound-1} via multiply-shift.
    std::uint64_t uniform_int(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    /// Standard Gaussian via Box-Muller; values are produced in pairs.
    double gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = radius * std::sin(angle);
        has_cached_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace tsconf
