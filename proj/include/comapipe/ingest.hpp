#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace comapipe::ingest {

enum class Sex { Male, Female };
enum class Ttm { T33, T36, None };
enum class Outcome { Good, Poor };

// CPC 1-2 map to Good, 3-5 to Poor. Throws ValidationError outside 1..5.
Outcome outcome_from_cpc(int cpc);

const char* to_string(Sex s);
const char* to_string(Ttm t);
const char* to_string(Outcome o);

/// One patient's clinical metadata. Optional fields are absent when the
/// source file carried a missing marker or no line at all.
struct ClinicalRecord {
    std::string patient_id;
    std::optional<double> age;           // years, [0, 130]
    std::optional<Sex> sex;
    std::optional<double> rosc_minutes;  // >= 0
    std::optional<bool> ohca;
    std::optional<bool> shockable_rhythm;
    Ttm ttm = Ttm::None;
    std::optional<int> cpc;              // 1..5
    std::optional<Outcome> outcome;

    void validate() const; // throws ValidationError on range/consistency breaks
};

/// A multi-channel, uniformly sampled EEG window in microvolts.
struct EegSegment {
    std::vector<std::string> channels;
    double fs = 0.0;       // samples/second
    int hour = 0;          // hours after ROSC
    // Row-major [n_channels x n_samples].
    std::vector<std::vector<double>> samples;

    std::size_t n_channels() const { return channels.size(); }
    std::size_t n_samples() const { return samples.empty() ? 0 : samples.front().size(); }
    double duration_s() const { return fs > 0 ? static_cast<double>(n_samples()) / fs : 0.0; }
    void validate() const;
};

struct PatientRecord {
    ClinicalRecord clinical;
    std::vector<EegSegment> segments; // sorted by hour, at most one per hour
};

struct ParseResult {
    ClinicalRecord record;
    std::vector<std::string> warnings; // unknown keys, skipped values
};

// Parses `Key: Value` lines. Keys: Patient, Age, Sex, ROSC, OHCA,
// Shockable Rhythm, TTM, CPC, Outcome. Unknown keys are collected as
// warnings, missing markers (empty/nan/none) become absent fields, and
// TTM values other than 33/36 map to Ttm::None. A line without a colon
// raises ParseError naming the line number. When CPC is present and
// Outcome is not, the outcome is derived from the fixed CPC mapping.
ParseResult parse_clinical(const std::string& text);

// Inverse of parse_clinical for valid records; absent fields render as nan.
std::string render_clinical(const ClinicalRecord& rec);

// Reads a `.sig` container: one text header line
// `fs=<float> channels=<comma-list> hour=<int>` followed by raw
// little-endian float32 samples, channel-major. Sample count is inferred
// from the file length and must divide evenly by the channel count.
EegSegment read_segment(const std::string& path);

// Writes the same container format (used by the synthetic generator).
void write_segment(const std::string& path, const EegSegment& seg);

// Loads `<dir>/clinical.txt` plus every `*.sig` file in the directory.
// Segment ordering is by hour; duplicate hours raise ValidationError.
PatientRecord load_patient(const std::string& dir);

// Loads every subdirectory of data_root that contains a clinical.txt,
// sorted by patient id.
std::vector<PatientRecord> load_cohort(const std::string& data_root);

struct NumericStat {
    double mean = 0.0;
    double sd = 0.0;          // sample SD, n-1 denominator
    std::size_t present = 0;
    std::size_t missing = 0;
};

struct CategoryCount {
    std::string label;
    std::size_t count = 0;
    double percent = 0.0;     // of present values
};

struct CategoricalStat {
    std::vector<CategoryCount> categories;
    std::size_t present = 0;
    std::size_t missing = 0;
};

/// Table-style cohort summary: availability, means/SDs, category counts,
/// outcome prevalence.
struct CohortSummary {
    std::size_t n_patients = 0;
    NumericStat age;
    NumericStat rosc;
    CategoricalStat sex;
    CategoricalStat ohca;
    CategoricalStat shockable;
    CategoricalStat ttm;
    CategoricalStat outcome;
};

CohortSummary summarize_cohort(const std::vector<PatientRecord>& records);

// Renders the summary as a fixed-width text table.
std::string render_summary(const CohortSummary& s);

} // namespace comapipe::ingest
