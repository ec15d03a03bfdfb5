#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "comapipe/ingest.hpp"

namespace comapipe::synth {

/// Knobs for the synthetic benchmark cohort. Clinical fields are drawn to
/// match the reference cohort's marginal counts (scaled to n_patients) and
/// are independent of outcome; the label signal lives only in the EEG,
/// where Poor patients get alpha power attenuated and suppression epochs
/// elevated in proportion to effect_size. effect_size 0 means the two
/// classes are generatively identical.
struct SynthParams {
    std::size_t n_patients = 200;
    std::uint64_t seed = 0;
    double effect_size = 1.0;

    // EEG shape
    int hours_per_patient = 2;
    double hour_duration_s = 30.0;
    double fs = 128.0;
    std::vector<std::string> channels = {"F3", "F4", "C3", "C4",
                                         "P3", "P4", "O1", "O2"};
};

// Deterministic per (params.seed, params). Throws ArgumentError when
// n_patients < 20.
std::vector<ingest::PatientRecord> generate_cohort(const SynthParams& params);

// Writes one directory per patient (clinical.txt + one .sig per hour)
// plus a synth_manifest.json recording the effective parameters.
void write_cohort(const std::string& data_root,
                  const std::vector<ingest::PatientRecord>& cohort,
                  const SynthParams& params);

std::string render_manifest(const SynthParams& params);

} // namespace comapipe::synth
