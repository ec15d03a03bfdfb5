#include "comapipe/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>

#include "comapipe/errors.hpp"
#include "comapipe/fft.hpp"

namespace comapipe::features {

namespace {

std::optional<double> median_of(std::vector<double> v) {
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double require(const std::optional<double>& m, const char* field) {
    if (!m) throw ConfigError(std::string("imputation stats missing required field: ") + field);
    return *m;
}

} // namespace

ImputationStats ImputationStats::from_records(const std::vector<ingest::ClinicalRecord>& records) {
    std::vector<double> ages, roscs;
    for (const auto& r : records) {
        if (r.age) ages.push_back(*r.age);
        if (r.rosc_minutes) roscs.push_back(*r.rosc_minutes);
    }
    ImputationStats s;
    s.age_median = median_of(std::move(ages));
    s.rosc_median = median_of(std::move(roscs));
    return s;
}

const std::vector<std::string>& clinical_feature_names() {
    static const std::vector<std::string> names = {
        "age",  "age_missing",  "sex_male", "sex_missing",       "rosc",   "rosc_missing",
        "ohca", "ohca_missing", "shockable", "shockable_missing", "ttm_33", "ttm_36",
        "ttm_none"};
    return names;
}

EncodedClinical encode_clinical(const ingest::ClinicalRecord& rec, const ImputationStats& imputation) {
    EncodedClinical out;
    out.names = clinical_feature_names();
    out.values.reserve(kClinicalDim);

    const bool age_miss = !rec.age.has_value();
    out.values.push_back(age_miss ? require(imputation.age_median, "age_median") : *rec.age);
    out.values.push_back(age_miss ? 1.0 : 0.0);

    const bool sex_miss = !rec.sex.has_value();
    out.values.push_back(!sex_miss && *rec.sex == ingest::Sex::Male ? 1.0 : 0.0);
    out.values.push_back(sex_miss ? 1.0 : 0.0);

    const bool rosc_miss = !rec.rosc_minutes.has_value();
    out.values.push_back(rosc_miss ? require(imputation.rosc_median, "rosc_median") : *rec.rosc_minutes);
    out.values.push_back(rosc_miss ? 1.0 : 0.0);

    const bool ohca_miss = !rec.ohca.has_value();
    out.values.push_back(!ohca_miss && *rec.ohca ? 1.0 : 0.0);
    out.values.push_back(ohca_miss ? 1.0 : 0.0);

    const bool shock_miss = !rec.shockable_rhythm.has_value();
    out.values.push_back(!shock_miss && *rec.shockable_rhythm ? 1.0 : 0.0);
    out.values.push_back(shock_miss ? 1.0 : 0.0);

    const ingest::Ttm ttm = rec.ttm;
    out.values.push_back(ttm == ingest::Ttm::T33 ? 1.0 : 0.0);
    out.values.push_back(ttm == ingest::Ttm::T36 ? 1.0 : 0.0);
    out.values.push_back(ttm == ingest::Ttm::None ? 1.0 : 0.0);

    out.missing_flags = {age_miss, sex_miss, rosc_miss, ohca_miss, shock_miss};
    return out;
}

const std::vector<std::string>& signal_flag_names() {
    static const std::vector<std::string> names = {"has_eeg", "n_hours", "n_channels",
                                                   "earliest_hour", "latest_hour"};
    return names;
}

SignalFlags signal_flags(const ingest::PatientRecord& rec) {
    SignalFlags f;
    if (rec.segments.empty()) return f;
    f.has_eeg = true;
    std::set<int> hours;
    std::set<std::string> channels;
    for (const auto& seg : rec.segments) {
        hours.insert(seg.hour);
        channels.insert(seg.channels.begin(), seg.channels.end());
    }
    f.n_hours_available = int(hours.size());
    f.n_channels_available = int(channels.size());
    f.earliest_hour = *hours.begin();
    f.latest_hour = *hours.rbegin();
    return f;
}

std::vector<double> signal_flag_values(const SignalFlags& f) {
    return {f.has_eeg ? 1.0 : 0.0, double(f.n_hours_available), double(f.n_channels_available),
            double(f.earliest_hour), double(f.latest_hour)};
}

const std::vector<std::string>& stat_names() {
    static const std::vector<std::string> names = {
        "delta_power", "theta_power", "alpha_power", "beta_power",      "alpha_delta_ratio",
        "total_power", "signal_sd",   "line_length", "spectral_entropy"};
    return names;
}

namespace {

// One-sided Welch PSD: 4 s Hann sub-windows at 50% overlap (whole signal if
// shorter). Returns bin powers in units^2/Hz and the bin spacing.
std::pair<std::vector<double>, double> welch_psd(const std::vector<double>& x, double fs) {
    std::size_t nw = std::size_t(std::llround(4.0 * fs));
    if (nw < 8) nw = 8;
    if (nw > x.size()) nw = x.size();
    const std::size_t hop = std::max<std::size_t>(1, nw / 2);

    std::vector<double> window(nw);
    double wsq = 0.0;
    for (std::size_t i = 0; i < nw; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * double(i) / double(nw));
        wsq += window[i] * window[i];
    }

    const std::size_t n_bins = nw / 2 + 1;
    std::vector<double> psd(n_bins, 0.0);
    std::vector<double> frame(nw);
    std::size_t n_frames = 0;
    for (std::size_t start = 0; start + nw <= x.size(); start += hop) {
        for (std::size_t i = 0; i < nw; ++i) frame[i] = x[start + i] * window[i];
        const auto spec = rdft_onesided(frame);
        for (std::size_t k = 0; k < n_bins; ++k) {
            double p = std::norm(spec[k]) / (fs * wsq);
            if (k != 0 && !(nw % 2 == 0 && k == n_bins - 1)) p *= 2.0; // one-sided fold
            psd[k] += p;
        }
        ++n_frames;
    }
    if (n_frames > 1)
        for (double& p : psd) p /= double(n_frames);
    return {std::move(psd), fs / double(nw)};
}

// Integrated power over [lo, hi): sum of psd * df for bins with lo <= f < hi.
double band_power(const std::vector<double>& psd, double df, double lo, double hi) {
    double acc = 0.0;
    for (std::size_t k = 0; k < psd.size(); ++k) {
        const double f = double(k) * df;
        if (f >= lo && f < hi) acc += psd[k] * df;
    }
    return acc;
}

} // namespace

ChannelHourStats channel_stats(const std::vector<double>& x, double fs) {
    if (fs <= 0.0) throw ArgumentError("channel_stats: fs must be positive");
    if (x.size() < 2) throw ArgumentError("channel_stats: need at least 2 samples");

    ChannelHourStats s;
    const auto [psd, df] = welch_psd(x, fs);

    s.delta = band_power(psd, df, 0.5, 4.0);
    s.theta = band_power(psd, df, 4.0, 8.0);
    s.alpha = band_power(psd, df, 8.0, 13.0);
    s.beta = band_power(psd, df, 13.0, 30.0);
    s.adr = s.delta > 0.0 ? s.alpha / s.delta : 0.0;
    s.total_power = band_power(psd, df, 0.0, fs); // all bins

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= double(x.size());
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    s.sd = std::sqrt(var / double(x.size() - 1));

    double ll = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) ll += std::abs(x[i] - x[i - 1]);
    s.line_length = ll / double(x.size() - 1);

    // Shannon entropy (bits) of the normalized PSD restricted to the
    // filtered range; 0 when there is no in-band power.
    double inband = 0.0;
    for (std::size_t k = 0; k < psd.size(); ++k) {
        const double f = double(k) * df;
        if (f >= 0.5 && f < 30.0) inband += psd[k];
    }
    if (inband > 0.0) {
        double h = 0.0;
        for (std::size_t k = 0; k < psd.size(); ++k) {
            const double f = double(k) * df;
            if (f >= 0.5 && f < 30.0 && psd[k] > 0.0) {
                const double p = psd[k] / inband;
                h -= p * std::log2(p);
            }
        }
        s.spectral_entropy = h;
    }
    return s;
}

namespace {

std::array<double, kStatDim> to_array(const ChannelHourStats& s) {
    return {s.delta, s.theta, s.alpha, s.beta, s.adr, s.total_power, s.sd, s.line_length,
            s.spectral_entropy};
}

} // namespace

EegSummary eeg_summary(const std::vector<ingest::EegSegment>& segments) {
    EegSummary out;
    std::vector<std::array<double, kStatDim>> rows;
    for (const auto& seg : segments) {
        for (const auto& x : seg.samples) {
            if (x.size() < 2) continue;
            rows.push_back(to_array(channel_stats(x, seg.fs)));
        }
    }
    if (rows.empty()) return out;

    out.has_data = true;
    const double n = double(rows.size());
    for (std::size_t j = 0; j < kStatDim; ++j) {
        double sum = 0.0;
        for (const auto& r : rows) sum += r[j];
        out.mean[j] = sum / n;
        if (rows.size() > 1) {
            double sq = 0.0;
            for (const auto& r : rows) sq += (r[j] - out.mean[j]) * (r[j] - out.mean[j]);
            out.sd[j] = std::sqrt(sq / (n - 1.0));
        }
    }
    return out;
}

const std::vector<std::string>& summary_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& s : stat_names()) v.push_back(std::string(s) + "_mean");
        for (const auto& s : stat_names()) v.push_back(std::string(s) + "_sd");
        return v;
    }();
    return names;
}

std::vector<double> summary_values(const EegSummary& s) {
    std::vector<double> v;
    v.reserve(kSummaryDim);
    for (double m : s.mean) v.push_back(m);
    for (double d : s.sd) v.push_back(d);
    return v;
}

} // namespace comapipe::features
