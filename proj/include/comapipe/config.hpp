#pragma once

#include <cstdint>
#include <string>

#include "comapipe/models.hpp"
#include "comapipe/synth.hpp"

namespace comapipe::config {

/// Everything a pipeline run needs, grouped the way the config file is.
/// The file format is flat TOML-style: `[section]` headers, `key = value`
/// lines, `#` comments. Unknown sections or keys are rejected so a typo
/// cannot silently fall back to a default.
struct PipelineConfig {
    // [run]
    std::string data_root;
    std::string output_dir = "out";
    std::string variant = "M1";
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::size_t k_folds = 5;
    double fpr_max = 0.05;

    // [filter] / [windows] / [spectrogram] / [embedding] / [rocket] / [forest]
    models::FitConfig fit;

    // [synth]
    synth::SynthParams synth;
};

// Parses config text. Later assignments win, so callers can layer a file
// over defaults and flags over the file by applying set() afterwards.
PipelineConfig parse_config(const std::string& text);

// Applies one `section.key = value` assignment; throws ConfigError on an
// unknown key or an unparsable value.
void set_key(PipelineConfig& cfg, const std::string& section, const std::string& key,
             const std::string& value);

// Renders the effective config; parse_config(render_config(c)) == c.
std::string render_config(const PipelineConfig& cfg);

} // namespace comapipe::config
