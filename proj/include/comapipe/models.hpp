#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "comapipe/dsp.hpp"
#include "comapipe/features.hpp"
#include "comapipe/ingest.hpp"
#include "comapipe/learners.hpp"
#include "comapipe/rocket.hpp"
#include "comapipe/spectro.hpp"

namespace comapipe::models {

// The six variants form a cumulative family: M2 adds per-channel
// embeddings to M1's tabular block, M3 swaps those for aggregates over
// all (hour, channel) segments, M4 routes the clinical vector into the
// embedding provider, and M5/M6 append the convolution-kernel decision
// value to M3/M4 respectively.
enum class VariantId { M1, M2, M3, M4, M5, M6 };

struct ModelVariant {
    VariantId id = VariantId::M1;
    bool uses_embeddings = false;          // M2..M6
    bool aggregate_time_channels = false;  // M3..M6
    bool intermediate_fusion = false;      // M4, M6
    bool uses_rocket = false;              // M5, M6
};

// Canonical flag pattern for an id. Tests may clear individual flags to
// check structural reductions (e.g. M4 without fusion equals M3).
ModelVariant make_variant(VariantId id);
const char* to_string(VariantId id);
// "M1".."M6" (case-sensitive); anything else is empty.
std::optional<VariantId> variant_from_name(const std::string& name);

// The 19-electrode 10-20 montage used as the fixed channel vocabulary;
// absent channels are zero-filled with availability flags.
const std::vector<std::string>& canonical_channels();

// Convolution-kernel input window: each preprocessed hour is truncated or
// zero-padded to this many seconds so the kernel bank sees a fixed series
// length regardless of recording duration.
inline constexpr double kRocketWindowS = 60.0;

/// Everything a fit needs beyond the data: preprocessing, spectrogram,
/// embedding, kernel-bank and forest settings. Seeds inside sub-configs
/// are ignored; all sub-seeds derive from the master seed passed to fit.
struct FitConfig {
    dsp::FilterSpec filter{};
    double window_s = 300.0; // artifact-selection window
    double stride_s = 10.0;
    double fs_target = 128.0;
    spectro::StftParams stft{};
    std::size_t embed_dim = 64;
    rocket::BankConfig bank{};
    learners::ForestConfig forest{};

    std::size_t rocket_series_len() const {
        return static_cast<std::size_t>(kRocketWindowS * fs_target + 0.5);
    }
};

/// Signal-derived intermediates for one patient, independent of the fold
/// split and of the embedding provider: grid summaries per (hour, channel)
/// and kernel features per hour can be computed once and reused across
/// cross-validation folds.
struct HourSignal {
    int hour = 0;
    std::vector<std::string> channels;        // canonical subset, canonical order
    std::vector<std::vector<double>> grids;   // per channel, grid_features output
    std::vector<double> rocket_features;      // empty unless a bank was given
};

struct PatientSignalCache {
    features::SignalFlags flags;
    features::EegSummary summary;
    std::vector<HourSignal> hours;            // ascending hour
};

// Preprocess (band-pass + notch, cleanest-window selection, resample) and
// derive the cached products. Recordings shorter than window_s fall back
// to the full recording. Grid features are computed only when need_grids;
// kernel features only when bank is non-null. Channels outside the
// canonical list contribute to the summary statistics but are not
// embedded. Throws DataError when a preprocessed window is shorter than
// one spectrogram frame.
PatientSignalCache precompute_signals(const ingest::PatientRecord& rec, const FitConfig& config,
                                      bool need_grids, const rocket::KernelBank* bank);

/// One assembled feature row; names are aligned with values and fixed per
/// variant. Diagnostics collect non-fatal fallbacks (missing channels,
/// absent EEG) encountered during assembly.
struct PatientFeatureRow {
    std::vector<double> values;
    std::vector<std::string> names;
    std::vector<std::string> diagnostics;
};

/// Self-contained fitted artifact: inference needs only this plus raw
/// patient data. The kernel bank is stored as its generation parameters
/// and regenerated (and verified) on load.
struct ModelBundle {
    int version = 1;
    ModelVariant variant;
    std::uint64_t seed = 0; // master seed the sub-seeds derive from
    std::vector<std::string> channels;
    FitConfig config;
    features::ImputationStats imputation;
    spectro::EmbeddingProviderSpec provider; // meaningful when uses_embeddings
    std::optional<learners::RidgeModel> segment_head; // aggregate variants
    std::optional<rocket::KernelBank> bank;           // rocket variants
    std::optional<learners::RidgeModel> rocket_head;  // rocket variants
    learners::ForestModel forest;
};

// Feature names for a variant under a config, in row order. The layout is
// cumulative: clinical + availability flags + spectral summary (M1), per
// channel embeddings of the latest hour with presence flags (M2),
// mean-pooled embeddings plus segment-head aggregates (M3/M4), kernel
// decision value (M5/M6).
std::vector<std::string> variant_feature_names(const ModelVariant& variant,
                                               const FitConfig& config);

// Mean probability and the fraction at or above 1/2 (the majority-vote
// cut with heads expressed as probabilities). Empty input -> {0, 0}.
std::pair<double, double> segment_vote_stats(const std::vector<double>& probs);

// Assemble the feature row for one patient against a fitted (or
// mid-fit) bundle. The cached overload skips re-preprocessing.
PatientFeatureRow build_features(const ingest::PatientRecord& rec, const ModelBundle& bundle);
PatientFeatureRow build_features_cached(const ingest::ClinicalRecord& clinical,
                                        const PatientSignalCache& cache,
                                        const ModelBundle& bundle);

// Fit the variant: imputation stats, segment-head ridge over training
// segments, kernel-bank ridge over training hours, then the final forest
// over assembled rows — every sub-seed derived from `seed`. Training
// patients must carry outcomes of both classes. Throws TrainingError
// (single class, or an embedding/rocket variant with no usable EEG) and
// ArgumentError (empty training set).
ModelBundle fit_variant(const std::vector<ingest::PatientRecord>& train,
                        const ModelVariant& variant, const FitConfig& config,
                        std::uint64_t seed);

// Cache-aware fit used by cross-validation: `train` and `caches` are
// parallel, and `bank` must be the bank generated for this master seed
// (required iff the variant uses kernels).
ModelBundle fit_cached(const std::vector<const ingest::PatientRecord*>& train,
                       const std::vector<const PatientSignalCache*>& caches,
                       const ModelVariant& variant, const FitConfig& config,
                       std::uint64_t seed, const rocket::KernelBank* bank);

// Probability of Poor outcome in [0,1]: forest_predict_proba over the
// assembled row. Deterministic; missing channels or absent EEG degrade to
// the zero-filled paths rather than erroring.
double predict(const ModelBundle& bundle, const ingest::PatientRecord& rec);
double predict_cached(const ModelBundle& bundle, const ingest::ClinicalRecord& clinical,
                      const PatientSignalCache& cache);

// Versioned JSON container. Serialization is canonical (sorted keys,
// shortest round-trip numbers) so identical bundles are byte-identical.
// deserialize_bundle throws FormatError on malformed or corrupted input.
std::string serialize_bundle(const ModelBundle& bundle);
ModelBundle deserialize_bundle(const std::string& text);
void save_bundle(const std::string& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::string& path);

// `<variant>_<seed>.bundle`
std::string bundle_filename(const ModelVariant& variant, std::uint64_t seed);

} // namespace comapipe::models
