#include "comapipe/rng.hpp"

#include <algorithm>

namespace comapipe {

std::vector<std::size_t> SplitMix64::sample_indices(std::size_t n, std::size_t k) {
    // Partial Fisher-Yates over an index array; cheap for the sizes used here.
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(below(n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::uint64_t hash64(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
    SplitMix64 mix(master ^ hash64(tag));
    return mix.next();
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
    SplitMix64 mix((master ^ hash64(tag)) + 0x9E3779B97F4A7C15ULL * (index + 1));
    return mix.next();
}

} // namespace comapipe
