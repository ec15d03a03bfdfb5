#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace comapipe {

// SplitMix64. Chosen as the project-wide generator because it is a
// counter-based 64-bit mixer: the k-th output is a pure function of
// (seed, k), so banks and synthetic cohorts reproduce bit-identically
// on any platform. All randomized components in this library draw from
// this generator only; std::random distributions are never used since
// their outputs are implementation-defined.
class SplitMix64 {
public:
    static constexpr std::string_view name = "splitmix64";

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer in [0, n). Rejection sampling keeps the mapping
    // exact so the draw sequence is reproducible.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

    // Standard normal via Box-Muller. Always consumes exactly two draws.
    double normal() {
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // k distinct indices from [0, n), returned sorted ascending.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

    // In-place Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// FNV-1a, used to derive named sub-seeds from a master seed.
std::uint64_t hash64(std::string_view text);

// Deterministic sub-seed for a named component ("bank", "forest", ...).
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

// Deterministic sub-seed for an indexed unit of work (tree i, patient i).
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index);

} // namespace comapipe
