#include "comapipe/spectro.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "comapipe/errors.hpp"
#include "comapipe/fft.hpp"
#include "comapipe/rng.hpp"

namespace comapipe::spectro {

namespace {

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Triangular filters with edges evenly spaced on the mel scale, evaluated at
// the rdft bin frequencies. Rows are not normalized; relative band shape is
// what matters since everything ends up dB-re-peak.
std::vector<std::vector<double>> mel_bank(std::size_t n_mel, std::size_t n_bins, double fs,
                                          std::size_t frame, double fmin, double fmax) {
    const double mlo = hz_to_mel(fmin), mhi = hz_to_mel(fmax);
    std::vector<double> edges(n_mel + 2);
    for (std::size_t i = 0; i < edges.size(); ++i)
        edges[i] = mel_to_hz(mlo + (mhi - mlo) * double(i) / double(n_mel + 1));

    std::vector<std::vector<double>> bank(n_mel, std::vector<double>(n_bins, 0.0));
    for (std::size_t m = 0; m < n_mel; ++m) {
        const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
        for (std::size_t k = 0; k < n_bins; ++k) {
            const double f = double(k) * fs / double(frame);
            double w = 0.0;
            if (f > lo && f < mid && mid > lo) w = (f - lo) / (mid - lo);
            else if (f >= mid && f < hi && hi > mid) w = (hi - f) / (hi - mid);
            else if (f == mid) w = 1.0;
            bank[m][k] = w;
        }
        // Narrow bands can fall between bins entirely; pick up the nearest
        // bin so no row is identically zero.
        bool empty = std::all_of(bank[m].begin(), bank[m].end(), [](double v) { return v == 0.0; });
        if (empty) {
            const double mid = edges[m + 1];
            std::size_t k = std::min<std::size_t>(n_bins - 1, std::size_t(std::llround(mid * double(frame) / fs)));
            bank[m][k] = 1.0;
        }
    }
    return bank;
}

} // namespace

Spectrogram spectrogram(const std::vector<double>& signal, double fs, const StftParams& params) {
    if (fs <= 0.0) throw ArgumentError("spectrogram: fs must be positive");
    if (params.frame == 0 || params.hop == 0) throw ArgumentError("spectrogram: frame and hop must be nonzero");
    if (signal.size() < params.frame)
        throw ArgumentError("spectrogram: signal shorter than one frame (" +
                            std::to_string(signal.size()) + " < " + std::to_string(params.frame) + ")");
    if (params.n_mel == 0) throw ArgumentError("spectrogram: n_mel must be nonzero");

    const std::size_t n_frames = (signal.size() - params.frame) / params.hop + 1;
    const std::size_t n_bins = params.frame / 2 + 1;

    std::vector<double> window(params.frame);
    for (std::size_t i = 0; i < params.frame; ++i)
        window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * double(i) / double(params.frame));

    const auto bank = mel_bank(params.n_mel, n_bins, fs, params.frame, params.fmin, params.fmax);

    Spectrogram out;
    out.floor_db = params.floor_db;
    out.values.assign(params.n_mel, std::vector<double>(n_frames, 0.0));
    out.band_centers.resize(params.n_mel);
    {
        const double mlo = hz_to_mel(params.fmin), mhi = hz_to_mel(params.fmax);
        for (std::size_t m = 0; m < params.n_mel; ++m)
            out.band_centers[m] = mel_to_hz(mlo + (mhi - mlo) * double(m + 1) / double(params.n_mel + 1));
    }
    out.frame_times.resize(n_frames);

    std::vector<double> frame(params.frame);
    double peak = 0.0;
    for (std::size_t t = 0; t < n_frames; ++t) {
        const std::size_t start = t * params.hop;
        out.frame_times[t] = (double(start) + double(params.frame) / 2.0) / fs;
        for (std::size_t i = 0; i < params.frame; ++i) frame[i] = signal[start + i] * window[i];
        const auto spec = rdft_onesided(frame);
        for (std::size_t m = 0; m < params.n_mel; ++m) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n_bins; ++k) {
                const double w = bank[m][k];
                if (w != 0.0) acc += w * std::norm(spec[k]);
            }
            out.values[m][t] = acc;
            peak = std::max(peak, acc);
        }
    }

    // Convert to dB relative to the peak cell; all-zero input gets flagged
    // and pinned to the floor so downstream stats stay finite.
    if (peak <= 0.0) {
        out.zero_energy = true;
        for (auto& row : out.values) std::fill(row.begin(), row.end(), params.floor_db);
    } else {
        for (auto& row : out.values)
            for (double& v : row) {
                double db = (v <= 0.0) ? params.floor_db : 10.0 * std::log10(v / peak);
                v = std::max(db, params.floor_db);
            }
    }
    return out;
}

std::vector<double> grid_features(const Spectrogram& spec) {
    const std::size_t nb = spec.n_bands(), nt = spec.n_frames();
    if (nb == 0 || nt == 0) throw ArgumentError("grid_features: empty spectrogram");

    // Cell [lo, hi) along an axis of length n; cells stay non-empty even
    // when n < 8 by clamping to at least one element.
    auto bounds = [](std::size_t n, std::size_t i) {
        std::size_t lo = i * n / kGridSplits, hi = (i + 1) * n / kGridSplits;
        if (hi <= lo) {
            lo = std::min(lo, n - 1);
            hi = lo + 1;
        }
        return std::pair<std::size_t, std::size_t>{lo, hi};
    };

    std::vector<double> out;
    out.reserve(kGridSplits * kGridSplits * 2);
    for (std::size_t ti = 0; ti < kGridSplits; ++ti) {
        const auto [t0, t1] = bounds(nt, ti);
        for (std::size_t bi = 0; bi < kGridSplits; ++bi) {
            const auto [b0, b1] = bounds(nb, bi);
            double sum = 0.0, sq = 0.0;
            const double cnt = double((t1 - t0) * (b1 - b0));
            for (std::size_t b = b0; b < b1; ++b)
                for (std::size_t t = t0; t < t1; ++t) {
                    const double v = spec.values[b][t];
                    sum += v;
                    sq += v * v;
                }
            const double mean = sum / cnt;
            const double var = std::max(0.0, sq / cnt - mean * mean);
            out.push_back(mean);
            out.push_back(std::sqrt(var));
        }
    }
    return out;
}

std::vector<double> embed_from_grid(const std::vector<double>& grid,
                                    const std::optional<std::vector<double>>& clinical,
                                    const EmbeddingProviderSpec& provider) {
    if (provider.kind != EmbeddingProviderSpec::Kind::ReferenceGrid)
        throw ArgumentError("embed: unknown provider kind");
    if (provider.output_dim == 0) throw ArgumentError("embed: output_dim must be nonzero");
    if (provider.fuse_clinical && !clinical)
        throw ContractError("embed: provider expects a clinical vector but none was given");
    if (!provider.fuse_clinical && clinical)
        throw ContractError("embed: clinical vector given but provider does not fuse it");

    std::vector<double> input = grid;
    if (clinical) input.insert(input.end(), clinical->begin(), clinical->end());
    if (input.empty()) throw ArgumentError("embed: empty input vector");

    // Fixed random projection: rows drawn in order from the provider seed,
    // scaled 1/sqrt(d) so output magnitudes track input magnitudes.
    SplitMix64 gen(provider.seed);
    const double scale = 1.0 / std::sqrt(double(input.size()));
    std::vector<double> out(provider.output_dim, 0.0);
    for (std::size_t i = 0; i < provider.output_dim; ++i) {
        double acc = 0.0;
        for (double v : input) acc += gen.normal() * v;
        out[i] = acc * scale;
    }
    return out;
}

std::vector<double> embed(const Spectrogram& spec,
                          const std::optional<std::vector<double>>& clinical,
                          const EmbeddingProviderSpec& provider) {
    return embed_from_grid(grid_features(spec), clinical, provider);
}

} // namespace comapipe::spectro
