#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "comapipe/ingest.hpp"

namespace comapipe::features {

/// Medians of the numeric clinical fields, computed on training data only.
/// A field that was never observed stays unset; encoding a record that
/// needs it then fails loudly instead of inventing a value.
struct ImputationStats {
    std::optional<double> age_median;
    std::optional<double> rosc_median;

    static ImputationStats from_records(const std::vector<ingest::ClinicalRecord>& records);
};

struct EncodedClinical {
    std::vector<double> values;
    std::vector<std::string> names;
    // one flag per optional source field: age, sex, rosc, ohca, shockable
    std::vector<bool> missing_flags;
};

// Fixed 13-feature layout:
//   [age, age_missing, sex_male, sex_missing, rosc, rosc_missing,
//    ohca, ohca_missing, shockable, shockable_missing, ttm_33, ttm_36, ttm_none]
// Numerics are median-imputed, categoricals default to 0 when absent, and
// every optional field carries an explicit missing flag.
EncodedClinical encode_clinical(const ingest::ClinicalRecord& rec, const ImputationStats& imputation);

inline constexpr std::size_t kClinicalDim = 13;
const std::vector<std::string>& clinical_feature_names();

struct SignalFlags {
    bool has_eeg = false;
    int n_hours_available = 0;
    int n_channels_available = 0;
    int earliest_hour = -1;
    int latest_hour = -1;
};

// Pure function of segment metadata; never reads samples.
SignalFlags signal_flags(const ingest::PatientRecord& rec);

inline constexpr std::size_t kSignalFlagDim = 5;
const std::vector<std::string>& signal_flag_names();
std::vector<double> signal_flag_values(const SignalFlags& f);

/// Scalar descriptors of one channel of one hour-long (already cleaned)
/// window. Band powers come from a Welch periodogram (4 s Hann sub-windows,
/// 50% overlap).
struct ChannelHourStats {
    double delta = 0.0;            // 0.5-4 Hz band power
    double theta = 0.0;            // 4-8 Hz
    double alpha = 0.0;            // 8-13 Hz
    double beta = 0.0;             // 13-30 Hz
    double adr = 0.0;              // alpha/delta, 0 when delta is 0
    double total_power = 0.0;
    double sd = 0.0;
    double line_length = 0.0;      // mean |x[i+1]-x[i]|
    double spectral_entropy = 0.0; // bits over 0.5-30 Hz PSD bins
};

inline constexpr std::size_t kStatDim = 9;
const std::vector<std::string>& stat_names();

ChannelHourStats channel_stats(const std::vector<double>& x, double fs);

/// Per-patient aggregate: mean and sample SD of each stat over all
/// (channel, hour) pairs. Zeroed with has_data=false for empty input.
struct EegSummary {
    bool has_data = false;
    std::array<double, kStatDim> mean{};
    std::array<double, kStatDim> sd{};
};

EegSummary eeg_summary(const std::vector<ingest::EegSegment>& segments);

inline constexpr std::size_t kSummaryDim = 2 * kStatDim;
const std::vector<std::string>& summary_names(); // <stat>_mean..., <stat>_sd...
std::vector<double> summary_values(const EegSummary& s);

} // namespace comapipe::features
