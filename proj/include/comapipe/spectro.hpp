#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace comapipe::spectro {

/// STFT + mel aggregation parameters. Defaults assume 128 Hz input: 2 s
/// frames resolve the delta band, 64 mel bands span the filtered range.
struct StftParams {
    std::size_t frame = 256;
    std::size_t hop = 64;
    std::size_t n_mel = 64;
    double fmin = 0.5;
    double fmax = 30.0;
    double floor_db = -80.0;
};

/// Power spectrogram in dB relative to the peak bin: the maximum value is
/// exactly 0 dB whenever any energy exists, everything is clipped at
/// floor_db.
struct Spectrogram {
    std::vector<std::vector<double>> values; // [n_bands x n_frames]
    std::vector<double> band_centers;        // Hz
    std::vector<double> frame_times;         // seconds, frame centers
    std::string channel;
    int hour = 0;
    bool zero_energy = false;                // all-zero input; values all at floor
    double floor_db = -80.0;

    std::size_t n_bands() const { return values.size(); }
    std::size_t n_frames() const { return values.empty() ? 0 : values.front().size(); }
};

// Hann STFT -> power -> mel bands -> dB re peak. Throws ArgumentError when
// the signal is shorter than one frame.
Spectrogram spectrogram(const std::vector<double>& signal, double fs, const StftParams& params);

/// Deterministic stand-in for a pretrained image network: grid summary
/// features followed by a fixed seeded random projection. Same seed, same
/// behavior, everywhere.
struct EmbeddingProviderSpec {
    enum class Kind { ReferenceGrid };
    Kind kind = Kind::ReferenceGrid;
    std::uint64_t seed = 0;
    std::size_t output_dim = 64;
    bool fuse_clinical = false;
};

inline constexpr std::size_t kGridSplits = 8; // 8x8 (time x band) cells

// Per-cell mean and population SD over an 8x8 partition of the dB values,
// time-major: cell (t, b) contributes values [2*(t*8+b)] = mean and
// [2*(t*8+b)+1] = SD. Length is always 128.
std::vector<double> grid_features(const Spectrogram& spec);

// grid_features, then optionally the clinical vector appended (iff
// provider.fuse_clinical), then a seeded N(0,1)/sqrt(input_dim) linear map
// down to output_dim. Throws ContractError when the clinical argument does
// not match the fuse_clinical flag.
std::vector<double> embed(const Spectrogram& spec,
                          const std::optional<std::vector<double>>& clinical,
                          const EmbeddingProviderSpec& provider);

// Same map applied to precomputed grid features; lets callers cache the
// grid half, which does not depend on the provider.
std::vector<double> embed_from_grid(const std::vector<double>& grid,
                                    const std::optional<std::vector<double>>& clinical,
                                    const EmbeddingProviderSpec& provider);

} // namespace comapipe::spectro
