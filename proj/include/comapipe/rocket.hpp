#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace comapipe::rocket {

/// One random dilated convolution kernel over a channel subset.
struct RocketKernel {
    int length = 9;                            // in {7, 9, 11}
    std::vector<std::vector<double>> weights;  // [n_selected x length], rows mean-centered
    double bias = 0.0;                         // in [-1, 1]
    int dilation = 1;
    int padding = 0;                           // 0 or ((length-1)*dilation)/2
    std::vector<std::size_t> channel_indices;  // sorted, unique

    int receptive_field() const { return (length - 1) * dilation + 1; }
};

struct BankConfig {
    std::size_t n_kernels = 10000;
    int features_per_kernel = 2; // 2 = {ppv, max}; 4 adds {mpv, lspv}
    int dilation_cap = 32;
};

struct KernelBank {
    std::vector<RocketKernel> kernels;
    std::uint64_t seed = 0;
    std::size_t n_input_channels = 0;
    std::size_t series_len = 0;
    BankConfig config;

    std::size_t feature_dim() const { return kernels.size() * std::size_t(config.features_per_kernel); }
};

// Draw a kernel bank. Per kernel the draw order is fixed: length, channel
// count (floor(2^u), u uniform on [0, log2(n_channels+1))), channel indices
// (without replacement, sorted), weights (row-major, then mean-centered per
// row), bias (uniform [-1,1]), dilation (floor(2^x), x uniform on
// [0, log2((series_len-1)/(length-1))], capped), padding coin. Reproducible
// from (seed, n_channels, series_len, config) alone.
KernelBank generate_bank(std::uint64_t seed, std::size_t n_channels, std::size_t series_len,
                         const BankConfig& config = {});

/// Pooled outputs of one kernel over one series.
struct KernelFeatures {
    double ppv = 0.0;  // fraction of outputs strictly > 0
    double max = 0.0;  // maximum output
    double mpv = 0.0;  // mean of positive outputs, 0 if none
    double lspv = 0.0; // longest positive run / n_outputs
    bool too_short = false; // no valid positions; everything above is 0
};

// Dilated convolution summed over the kernel's channel subset, bias added,
// evaluated at every valid position (zero-padded outside when padding > 0).
KernelFeatures apply_kernel(const std::vector<std::vector<double>>& series, const RocketKernel& k);

// Concatenated per-kernel features in kernel order: for each kernel
// [ppv, max] or [ppv, max, mpv, lspv]. Throws ContractError when the series
// channel count differs from the bank's.
std::vector<double> transform(const std::vector<std::vector<double>>& series, const KernelBank& bank);

std::vector<std::string> feature_names(const KernelBank& bank); // k<i>_ppv, ...

// Versioned binary blob. Seed + config alone regenerate the bank;
// with_weights additionally embeds every kernel for cross-checking, and
// loading then verifies the regenerated bank matches (FormatError if not).
std::string serialize_bank(const KernelBank& bank, bool with_weights = false);
KernelBank deserialize_bank(const std::string& blob);

void save_bank(const std::string& path, const KernelBank& bank, bool with_weights = false);
KernelBank load_bank(const std::string& path);

} // namespace comapipe::rocket
