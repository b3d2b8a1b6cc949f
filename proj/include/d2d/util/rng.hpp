#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace d2d {

// 64-bit mix used to derive independent substreams from a master seed.
// splitmix64 finalizer; stable across platforms.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master ^ mix64(stream + 0x51ed27f4a13f2693ULL));
}

// Tag-based derivation so independent roles (dataset, init, shuffle, ...)
// never collide even for adjacent integer streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view role,
                                 std::uint64_t stream = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : role) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return derive_seed(master ^ mix64(h), stream);
}

// Seedable RNG with explicitly specified value mappings. std::mt19937_64 is
// fully pinned by the standard; the distribution transforms below are ours,
// so a (seed, call sequence) pair reproduces bit-identical values anywhere
// with the same libm.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Marsaglia-free Box-Muller; caches the second variate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double std) { return mean + std * normal(); }

    // Fisher-Yates index for shuffling: uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace d2d
