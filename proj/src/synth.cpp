#include "comapipe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "comapipe/errors.hpp"
#include "comapipe/rng.hpp"
#include "comapipe/util.hpp"

namespace comapipe::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Reference cohort marginals (n = 607): count of interest / denominator.
constexpr double kRefN = 607.0;

std::size_t scaled(std::size_t n, double count, double denom = kRefN) {
    return static_cast<std::size_t>(std::llround(double(n) * count / denom));
}

// Shift/scale values so the sample mean and SD (n-1) are exactly the
// targets; the cohort summary then reproduces the table row regardless
// of sampling noise.
void standardize(std::vector<double>& v, double mean, double sd) {
    if (v.size() < 2) return;
    double m = 0.0;
    for (double x : v) m += x;
    m /= double(v.size());
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    const double s = std::sqrt(s2 / double(v.size() - 1));
    if (s == 0.0) return;
    for (double& x : v) x = mean + sd * (x - m) / s;
}

// n slots, `missing` of them absent, the rest filled by draw(); one
// shuffle makes the placement independent of every other attribute.
template <typename Draw>
std::vector<std::optional<double>> numeric_column(std::size_t n, std::size_t missing,
                                                  std::uint64_t seed, Draw draw,
                                                  double mean, double sd) {
    SplitMix64 gen(seed);
    std::vector<double> values(n - missing);
    for (double& x : values) x = draw(gen);
    if (sd > 0.0) standardize(values, mean, sd);
    std::vector<std::optional<double>> col(n);
    for (std::size_t i = 0; i < values.size(); ++i) col[i] = values[i];
    gen.shuffle(col);
    return col;
}

std::vector<std::optional<bool>> boolean_column(std::size_t n, std::size_t missing,
                                                std::size_t n_true, std::uint64_t seed) {
    std::vector<std::optional<bool>> col(n);
    for (std::size_t i = missing; i < n; ++i) col[i] = (i - missing) < n_true;
    SplitMix64 gen(seed);
    gen.shuffle(col);
    return col;
}

struct HourPlan {
    int hour;
    double alpha_amp;     // per-patient alpha carrier amplitude
    double alpha_freq;
    double suppressed_frac;
};

void synthesize_hour(ingest::EegSegment& seg, const HourPlan& plan, SplitMix64& gen) {
    const std::size_t n = seg.samples.empty() ? 0 : seg.samples[0].size();
    const double fs = seg.fs;

    // Suppression epochs: 2 s slots, shared across channels, exact count.
    const std::size_t n_slots = std::size_t(double(n) / fs / 2.0);
    std::size_t k = std::size_t(std::llround(plan.suppressed_frac * double(n_slots)));
    k = std::min(k, n_slots);
    const auto slots = gen.sample_indices(n_slots, k);
    std::vector<bool> suppressed(n_slots, false);
    for (auto s : slots) suppressed[s] = true;
    const std::size_t slot_len = std::size_t(2.0 * fs);

    for (auto& channel : seg.samples) {
        const double amp = plan.alpha_amp * (0.85 + 0.3 * gen.uniform01());
        const double phase = 2.0 * kPi * gen.uniform01();
        const double hum_phase = 2.0 * kPi * gen.uniform01();
        const double offset = 20.0 * (gen.uniform01() - 0.5);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = double(i) / fs;
            double v = 6.0 * gen.normal() +
                       amp * std::sin(2.0 * kPi * plan.alpha_freq * t + phase) +
                       4.0 * std::sin(2.0 * kPi * 50.0 * t + hum_phase);
            const std::size_t slot = i / slot_len;
            if (slot < n_slots && suppressed[slot]) v *= 0.08;
            channel[i] = v + offset;
        }
    }
}

} // namespace

std::vector<ingest::PatientRecord> generate_cohort(const SynthParams& params) {
    const std::size_t n = params.n_patients;
    if (n < 20) throw ArgumentError("synthetic cohort needs at least 20 patients");

    const std::uint64_t seed = params.seed;

    // Age 61 (16), 1 missing; ROSC 23 (19), 304 missing — counts scaled.
    const auto age = numeric_column(
        n, scaled(n, 1.0), derive_seed(seed, "synth-age"),
        [](SplitMix64& g) { return g.normal(); }, 61.0, 16.0);
    // Lognormal matched to mean 23, SD 19: mu = ln(23) - s^2/2 with
    // s^2 = ln(1 + (19/23)^2). Positive by construction, so no truncation
    // bias; only the missing count is pinned exactly.
    const double rosc_s2 = std::log(1.0 + (19.0 / 23.0) * (19.0 / 23.0));
    const double rosc_mu = std::log(23.0) - 0.5 * rosc_s2;
    const double rosc_sigma = std::sqrt(rosc_s2);
    const auto rosc = numeric_column(
        n, scaled(n, 304.0), derive_seed(seed, "synth-rosc"),
        [&](SplitMix64& g) { return std::exp(rosc_mu + rosc_sigma * g.normal()); }, 0.0,
        0.0); // sd 0 skips standardization

    // Sex 417 male / 607; OHCA 442 true of 566 present, 41 missing;
    // shockable 297 of 575 present, 32 missing.
    const auto male =
        boolean_column(n, 0, scaled(n, 417.0), derive_seed(seed, "synth-sex"));
    const std::size_t ohca_miss = scaled(n, 41.0);
    const auto ohca = boolean_column(n, ohca_miss, scaled(n - ohca_miss, 442.0, 566.0),
                                     derive_seed(seed, "synth-ohca"));
    const std::size_t shock_miss = scaled(n, 32.0);
    const auto shock = boolean_column(n, shock_miss, scaled(n - shock_miss, 297.0, 575.0),
                                      derive_seed(seed, "synth-shockable"));

    // TTM 448 at 33 / 61 at 36 / rest none.
    std::vector<ingest::Ttm> ttm(n, ingest::Ttm::None);
    {
        const std::size_t t33 = scaled(n, 448.0);
        const std::size_t t36 = std::min(n - t33, scaled(n, 61.0));
        for (std::size_t i = 0; i < t33; ++i) ttm[i] = ingest::Ttm::T33;
        for (std::size_t i = t33; i < t33 + t36; ++i) ttm[i] = ingest::Ttm::T36;
        SplitMix64 gen(derive_seed(seed, "synth-ttm"));
        gen.shuffle(ttm);
    }

    // Poor prevalence 52%; independent of every clinical column.
    std::vector<ingest::Outcome> outcome(n, ingest::Outcome::Good);
    for (std::size_t i = 0; i < scaled(n, 0.52, 1.0); ++i) outcome[i] = ingest::Outcome::Poor;
    {
        SplitMix64 gen(derive_seed(seed, "synth-outcome"));
        gen.shuffle(outcome);
    }

    SplitMix64 cpc_gen(derive_seed(seed, "synth-cpc"));

    std::vector<ingest::PatientRecord> cohort(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& rec = cohort[i];
        char id[24];
        std::snprintf(id, sizeof(id), "p%04zu", i);
        rec.clinical.patient_id = id;
        rec.clinical.age = age[i];
        rec.clinical.sex = male[i].has_value()
                               ? std::optional<ingest::Sex>(*male[i] ? ingest::Sex::Male
                                                                     : ingest::Sex::Female)
                               : std::nullopt;
        rec.clinical.rosc_minutes = rosc[i];
        rec.clinical.ohca = ohca[i];
        rec.clinical.shockable_rhythm = shock[i];
        rec.clinical.ttm = ttm[i];
        rec.clinical.outcome = outcome[i];
        rec.clinical.cpc = outcome[i] == ingest::Outcome::Good
                               ? 1 + int(cpc_gen.below(2))
                               : 3 + int(cpc_gen.below(3));

        SplitMix64 gen(derive_seed(seed, "synth-eeg", i));
        const bool poor = outcome[i] == ingest::Outcome::Poor;
        const double e = params.effect_size;

        // Healthy cortex: strong alpha, rare suppression. Poor outcome:
        // alpha attenuated by up to 70% and a third to a half of the
        // record suppressed, both fading to the healthy draw at e = 0.
        const double base_amp = 9.0 * (0.8 + 0.4 * gen.uniform01());
        const double alpha_amp = poor ? base_amp * (1.0 - 0.7 * e) : base_amp;
        const double base_sup = 0.03 + 0.05 * gen.uniform01();
        const double sup = poor ? base_sup + e * (0.30 + 0.20 * gen.uniform01()) : base_sup;
        const double alpha_freq = 9.5 + gen.uniform01();

        int prev_hour = -1;
        for (int h = 0; h < params.hours_per_patient; ++h) {
            ingest::EegSegment seg;
            seg.channels = params.channels;
            seg.fs = params.fs;
            int hour = 6 + int(gen.below(66)); // within the 72 h window
            if (hour <= prev_hour) hour = prev_hour + 1;
            prev_hour = hour;
            seg.hour = hour;
            const std::size_t len = std::size_t(params.hour_duration_s * params.fs);
            seg.samples.assign(seg.channels.size(), std::vector<double>(len));
            synthesize_hour(seg, {hour, alpha_amp, alpha_freq, sup}, gen);
            rec.segments.push_back(std::move(seg));
        }
        std::sort(rec.segments.begin(), rec.segments.end(),
                  [](const auto& a, const auto& b) { return a.hour < b.hour; });
    }
    return cohort;
}

std::string render_manifest(const SynthParams& p) {
    nlohmann::json j;
    j["generator"] = "synth";
    j["n_patients"] = p.n_patients;
    j["seed"] = p.seed;
    j["effect_size"] = p.effect_size;
    j["hours_per_patient"] = p.hours_per_patient;
    j["hour_duration_s"] = p.hour_duration_s;
    j["fs"] = p.fs;
    j["channels"] = p.channels;
    j["rng"] = std::string(SplitMix64::name);
    return j.dump(2) + "\n";
}

void write_cohort(const std::string& data_root,
                  const std::vector<ingest::PatientRecord>& cohort,
                  const SynthParams& params) {
    namespace fs = std::filesystem;
    fs::create_directories(data_root);
    for (const auto& rec : cohort) {
        const fs::path dir = fs::path(data_root) / rec.clinical.patient_id;
        fs::create_directories(dir);
        write_file_atomic((dir / "clinical.txt").string(),
                          ingest::render_clinical(rec.clinical));
        for (const auto& seg : rec.segments) {
            char name[32];
            std::snprintf(name, sizeof(name), "eeg_h%03d.sig", seg.hour);
            ingest::write_segment((dir / name).string(), seg);
        }
    }
    write_file_atomic((fs::path(data_root) / "synth_manifest.json").string(),
                      render_manifest(params));
}

} // namespace comapipe::synth
