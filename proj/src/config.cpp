#include "comapipe/config.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "comapipe/errors.hpp"
#include "comapipe/util.hpp"

namespace comapipe::config {

namespace {

double as_double(const std::string& key, const std::string& value) {
    const auto v = parse_double(value);
    if (!v) throw ConfigError("config key " + key + ": not a number: " + value);
    return *v;
}

long long as_int(const std::string& key, const std::string& value) {
    const auto v = parse_int(value);
    if (!v) throw ConfigError("config key " + key + ": not an integer: " + value);
    return *v;
}

std::size_t as_size(const std::string& key, const std::string& value) {
    const long long v = as_int(key, value);
    if (v < 0) throw ConfigError("config key " + key + ": must be non-negative: " + value);
    return std::size_t(v);
}

std::uint64_t as_u64(const std::string& key, const std::string& value) {
    const long long v = as_int(key, value);
    if (v < 0) throw ConfigError("config key " + key + ": must be non-negative: " + value);
    return std::uint64_t(v);
}

std::vector<double> as_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    if (trim(value).empty()) return out;
    for (const auto& part : split(value, ',')) out.push_back(as_double(key, trim(part)));
    return out;
}

std::vector<std::string> as_string_list(const std::string& value) {
    std::vector<std::string> out;
    if (trim(value).empty()) return out;
    for (const auto& part : split(value, ',')) out.push_back(trim(part));
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += v[i];
    }
    return out;
}

} // namespace

void set_key(PipelineConfig& cfg, const std::string& section, const std::string& key,
             const std::string& value) {
    const std::string full = section + "." + key;
    using Setter = std::function<void(PipelineConfig&, const std::string&)>;
    // One handler per known key; lookup failure is the unknown-key error.
    static const std::map<std::string, Setter> table = {
        {"run.data_root", [](PipelineConfig& c, const std::string& v) { c.data_root = v; }},
        {"run.output_dir", [](PipelineConfig& c, const std::string& v) { c.output_dir = v; }},
        {"run.variant", [](PipelineConfig& c, const std::string& v) { c.variant = v; }},
        {"run.seed",
         [](PipelineConfig& c, const std::string& v) { c.seed = as_u64("run.seed", v); }},
        {"run.jobs",
         [](PipelineConfig& c, const std::string& v) {
             c.jobs = as_size("run.jobs", v);
             if (c.jobs == 0) throw ConfigError("config key run.jobs: must be at least 1");
         }},
        {"run.k_folds",
         [](PipelineConfig& c, const std::string& v) { c.k_folds = as_size("run.k_folds", v); }},
        {"run.fpr_max",
         [](PipelineConfig& c, const std::string& v) { c.fpr_max = as_double("run.fpr_max", v); }},

        {"filter.band_low",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.filter.band_low = as_double("filter.band_low", v);
         }},
        {"filter.band_high",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.filter.band_high = as_double("filter.band_high", v);
         }},
        {"filter.notch_freqs",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.filter.notch_freqs = as_double_list("filter.notch_freqs", v);
         }},
        {"filter.order",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.filter.order = int(as_int("filter.order", v));
         }},
        {"filter.notch_q",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.filter.notch_q = as_double("filter.notch_q", v);
         }},

        {"windows.window_s",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.window_s = as_double("windows.window_s", v);
         }},
        {"windows.stride_s",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.stride_s = as_double("windows.stride_s", v);
         }},
        {"windows.fs_target",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.fs_target = as_double("windows.fs_target", v);
         }},

        {"spectrogram.frame",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.stft.frame = as_size("spectrogram.frame", v);
         }},
        {"spectrogram.hop",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.stft.hop = as_size("spectrogram.hop", v);
         }},
        {"spectrogram.n_mel",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.stft.n_mel = as_size("spectrogram.n_mel", v);
         }},
        {"spectrogram.fmin",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.stft.fmin = as_double("spectrogram.fmin", v);
         }},
        {"spectrogram.fmax",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.stft.fmax = as_double("spectrogram.fmax", v);
         }},
        {"spectrogram.floor_db",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.stft.floor_db = as_double("spectrogram.floor_db", v);
         }},

        {"embedding.dim",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.embed_dim = as_size("embedding.dim", v);
         }},

        {"rocket.n_kernels",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.bank.n_kernels = as_size("rocket.n_kernels", v);
         }},
        {"rocket.features_per_kernel",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.bank.features_per_kernel = int(as_int("rocket.features_per_kernel", v));
         }},
        {"rocket.dilation_cap",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.bank.dilation_cap = int(as_int("rocket.dilation_cap", v));
         }},

        {"forest.n_trees",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.forest.n_trees = as_size("forest.n_trees", v);
         }},
        {"forest.mtry",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.forest.mtry = as_size("forest.mtry", v);
         }},
        {"forest.min_leaf",
         [](PipelineConfig& c, const std::string& v) {
             c.fit.forest.min_leaf = as_size("forest.min_leaf", v);
         }},

        {"synth.n_patients",
         [](PipelineConfig& c, const std::string& v) {
             c.synth.n_patients = as_size("synth.n_patients", v);
         }},
        {"synth.effect_size",
         [](PipelineConfig& c, const std::string& v) {
             c.synth.effect_size = as_double("synth.effect_size", v);
         }},
        {"synth.hours_per_patient",
         [](PipelineConfig& c, const std::string& v) {
             c.synth.hours_per_patient = int(as_int("synth.hours_per_patient", v));
         }},
        {"synth.hour_duration_s",
         [](PipelineConfig& c, const std::string& v) {
             c.synth.hour_duration_s = as_double("synth.hour_duration_s", v);
         }},
        {"synth.fs",
         [](PipelineConfig& c, const std::string& v) { c.synth.fs = as_double("synth.fs", v); }},
        {"synth.channels",
         [](PipelineConfig& c, const std::string& v) { c.synth.channels = as_string_list(v); }},
    };

    const auto it = table.find(full);
    if (it == table.end()) throw ConfigError("unknown config key: " + full);
    it->second(cfg, value);
}

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": key outside any [section]");
        set_key(cfg, section, key, value);
    }
    return cfg;
}

std::string render_config(const PipelineConfig& c) {
    std::string out;
    out += "[run]\n";
    out += "data_root = " + c.data_root + "\n";
    out += "output_dir = " + c.output_dir + "\n";
    out += "variant = " + c.variant + "\n";
    out += "seed = " + std::to_string(c.seed) + "\n";
    out += "jobs = " + std::to_string(c.jobs) + "\n";
    out += "k_folds = " + std::to_string(c.k_folds) + "\n";
    out += "fpr_max = " + format_double(c.fpr_max) + "\n";
    out += "\n[filter]\n";
    out += "band_low = " + format_double(c.fit.filter.band_low) + "\n";
    out += "band_high = " + format_double(c.fit.filter.band_high) + "\n";
    out += "notch_freqs = " + join(c.fit.filter.notch_freqs) + "\n";
    out += "order = " + std::to_string(c.fit.filter.order) + "\n";
    out += "notch_q = " + format_double(c.fit.filter.notch_q) + "\n";
    out += "\n[windows]\n";
    out += "window_s = " + format_double(c.fit.window_s) + "\n";
    out += "stride_s = " + format_double(c.fit.stride_s) + "\n";
    out += "fs_target = " + format_double(c.fit.fs_target) + "\n";
    out += "\n[spectrogram]\n";
    out += "frame = " + std::to_string(c.fit.stft.frame) + "\n";
    out += "hop = " + std::to_string(c.fit.stft.hop) + "\n";
    out += "n_mel = " + std::to_string(c.fit.stft.n_mel) + "\n";
    out += "fmin = " + format_double(c.fit.stft.fmin) + "\n";
    out += "fmax = " + format_double(c.fit.stft.fmax) + "\n";
    out += "floor_db = " + format_double(c.fit.stft.floor_db) + "\n";
    out += "\n[embedding]\n";
    out += "dim = " + std::to_string(c.fit.embed_dim) + "\n";
    out += "\n[rocket]\n";
    out += "n_kernels = " + std::to_string(c.fit.bank.n_kernels) + "\n";
    out += "features_per_kernel = " + std::to_string(c.fit.bank.features_per_kernel) + "\n";
    out += "dilation_cap = " + std::to_string(c.fit.bank.dilation_cap) + "\n";
    out += "\n[forest]\n";
    out += "n_trees = " + std::to_string(c.fit.forest.n_trees) + "\n";
    out += "mtry = " + std::to_string(c.fit.forest.mtry) + "\n";
    out += "min_leaf = " + std::to_string(c.fit.forest.min_leaf) + "\n";
    out += "\n[synth]\n";
    out += "n_patients = " + std::to_string(c.synth.n_patients) + "\n";
    out += "effect_size = " + format_double(c.synth.effect_size) + "\n";
    out += "hours_per_patient = " + std::to_string(c.synth.hours_per_patient) + "\n";
    out += "hour_duration_s = " + format_double(c.synth.hour_duration_s) + "\n";
    out += "fs = " + format_double(c.synth.fs) + "\n";
    out += "channels = " + join(c.synth.channels) + "\n";
    return out;
}

} // namespace comapipe::config
