#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tracecf {

/// Seeded random stream with pinned sampling algorithms, so that a given
/// seed reproduces the same draw sequence independent of the standard
/// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform in {0, ..., n-1}; n must be > 0. Debiased via rejection.
    std::size_t index(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    bool chance(double p) { return uniform01() < p; }

private:
    std::mt19937_64 gen_;
};

/// FNV-1a 64-bit. Used to derive independent per-cell seeds in the
/// benchmark harness: adding grid cells never perturbs existing cells.
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    std::uint64_t h = fnv1a64(tag);
    return h ^ (base * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull);
}

}  // namespace tracecf
