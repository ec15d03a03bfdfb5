#include <doctest.h>

#include <cmath>

#include "comapipe/errors.hpp"
#include "comapipe/features.hpp"
#include "comapipe/rng.hpp"

using namespace comapipe;
using features::EncodedClinical;
using features::ImputationStats;
using ingest::ClinicalRecord;
using ingest::EegSegment;

namespace {

EegSegment make_segment(int hour, std::vector<std::string> channels, std::vector<std::vector<double>> chans,
                        double fs) {
    EegSegment seg;
    seg.hour = hour;
    seg.fs = fs;
    seg.channels = std::move(channels);
    seg.samples = std::move(chans);
    return seg;
}

std::vector<double> sine(double freq, double fs, double seconds, double amp = 1.0) {
    std::vector<double> x(std::size_t(seconds * fs));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = amp * std::sin(2.0 * M_PI * freq * double(i) / fs);
    return x;
}

} // namespace

TEST_CASE("encode_clinical: reference record layout") {
    ClinicalRecord rec;
    rec.age = 61.0;
    rec.sex = ingest::Sex::Male;
    rec.ttm = ingest::Ttm::T33;
    ImputationStats stats;
    stats.age_median = 60.0;
    stats.rosc_median = 23.0;

    auto enc = features::encode_clinical(rec, stats);
    REQUIRE(enc.values.size() == 13);
    REQUIRE(enc.names.size() == 13);
    const std::vector<double> want = {61, 0, 1, 0, 23, 1, 0, 1, 0, 1, 1, 0, 0};
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(enc.values[i] == want[i]);
    CHECK(enc.names[0] == "age");
    CHECK(enc.names[12] == "ttm_none");
    REQUIRE(enc.missing_flags.size() == 5);
    CHECK_FALSE(enc.missing_flags[0]); // age present
    CHECK(enc.missing_flags[2]);       // rosc absent
}

TEST_CASE("encode_clinical: all-absent record imputes medians and flags everything") {
    ClinicalRecord rec; // everything unset, ttm defaults to None
    ImputationStats stats;
    stats.age_median = 58.5;
    stats.rosc_median = 20.0;
    auto enc = features::encode_clinical(rec, stats);
    CHECK(enc.values[0] == 58.5);
    CHECK(enc.values[4] == 20.0);
    for (std::size_t i : {1, 3, 5, 7, 9}) CHECK(enc.values[i] == 1.0);
    CHECK(enc.values[10] == 0.0);
    CHECK(enc.values[11] == 0.0);
    CHECK(enc.values[12] == 1.0); // ttm one-hot lands on none
    for (bool f : enc.missing_flags) CHECK(f);
    for (double v : enc.values) CHECK_FALSE(std::isnan(v));
}

TEST_CASE("encode_clinical: ttm one-hot covers all three states") {
    ImputationStats stats;
    stats.age_median = 0.0;
    stats.rosc_median = 0.0;
    ClinicalRecord rec;
    rec.ttm = ingest::Ttm::T36;
    auto enc = features::encode_clinical(rec, stats);
    CHECK(enc.values[10] == 0.0);
    CHECK(enc.values[11] == 1.0);
    CHECK(enc.values[12] == 0.0);
}

TEST_CASE("encode_clinical: missing imputation field is a configuration error") {
    ClinicalRecord rec; // age absent -> needs age_median
    ImputationStats stats;
    stats.rosc_median = 20.0;
    CHECK_THROWS_AS(features::encode_clinical(rec, stats), ConfigError);

    // but if age is present the age median is never consulted
    rec.age = 50.0;
    auto enc = features::encode_clinical(rec, stats);
    CHECK(enc.values[0] == 50.0);
}

TEST_CASE("ImputationStats computes medians over present values only") {
    std::vector<ClinicalRecord> recs(5);
    recs[0].age = 40.0;
    recs[1].age = 80.0;
    recs[2].age = 60.0;
    recs[3].rosc_minutes = 10.0;
    recs[4].rosc_minutes = 30.0;
    auto stats = ImputationStats::from_records(recs);
    REQUIRE(stats.age_median.has_value());
    CHECK(*stats.age_median == 60.0);       // odd count -> middle
    CHECK(*stats.rosc_median == 20.0);      // even count -> average

    auto empty = ImputationStats::from_records({});
    CHECK_FALSE(empty.age_median.has_value());
    CHECK_FALSE(empty.rosc_median.has_value());
}

TEST_CASE("signal_flags counts hours and channels from metadata") {
    ingest::PatientRecord rec;
    rec.segments.push_back(make_segment(8, {"F3", "F4"}, {{0, 0}, {0, 0}}, 100.0));
    rec.segments.push_back(make_segment(12, {"F3", "C3"}, {{0, 0}, {0, 0}}, 100.0));
    auto f = features::signal_flags(rec);
    CHECK(f.has_eeg);
    CHECK(f.n_hours_available == 2);
    CHECK(f.n_channels_available == 3); // union of {F3,F4,C3}
    CHECK(f.earliest_hour == 8);
    CHECK(f.latest_hour == 12);

    ingest::PatientRecord none;
    auto g = features::signal_flags(none);
    CHECK_FALSE(g.has_eeg);
    CHECK(g.n_hours_available == 0);
    CHECK(g.earliest_hour == -1);
    CHECK(g.latest_hour == -1);
}

TEST_CASE("channel_stats: 10 Hz sine concentrates power in alpha") {
    auto x = sine(10.0, 128.0, 30.0);
    auto s = features::channel_stats(x, 128.0);
    CHECK(s.alpha > 100.0 * s.delta);
    CHECK(s.alpha > 100.0 * s.theta);
    CHECK(s.alpha > 100.0 * s.beta);
    CHECK(s.adr > 100.0);
    // sine power = A^2/2; Welch should land close
    CHECK(s.alpha == doctest::Approx(0.5).epsilon(0.02));
    CHECK(s.sd == doctest::Approx(std::sqrt(0.5)).epsilon(0.01));
}

TEST_CASE("channel_stats: all-zero input yields all-zero stats") {
    std::vector<double> x(1280, 0.0);
    auto s = features::channel_stats(x, 128.0);
    CHECK(s.delta == 0.0);
    CHECK(s.theta == 0.0);
    CHECK(s.alpha == 0.0);
    CHECK(s.beta == 0.0);
    CHECK(s.adr == 0.0);
    CHECK(s.total_power == 0.0);
    CHECK(s.sd == 0.0);
    CHECK(s.line_length == 0.0);
    CHECK(s.spectral_entropy == 0.0);
}

TEST_CASE("band powers: sign flip and DC offset change nothing") {
    SplitMix64 gen(21);
    std::vector<double> x(128 * 20);
    for (auto& v : x) v = gen.normal();
    auto base = features::channel_stats(x, 128.0);

    auto flipped = x;
    for (auto& v : flipped) v = -v;
    auto fs = features::channel_stats(flipped, 128.0);
    CHECK(fs.delta == doctest::Approx(base.delta).epsilon(1e-9));
    CHECK(fs.alpha == doctest::Approx(base.alpha).epsilon(1e-9));

    auto shifted = x;
    for (auto& v : shifted) v += 3.0;
    auto ss = features::channel_stats(shifted, 128.0);
    // DC leaks only into bins below 0.5 Hz with a periodic Hann window
    CHECK(ss.delta == doctest::Approx(base.delta).epsilon(0.01));
    CHECK(ss.theta == doctest::Approx(base.theta).epsilon(0.01));
    CHECK(ss.alpha == doctest::Approx(base.alpha).epsilon(0.01));
    CHECK(ss.beta == doctest::Approx(base.beta).epsilon(0.01));
    CHECK(ss.spectral_entropy == doctest::Approx(base.spectral_entropy).epsilon(0.01));
}

TEST_CASE("band powers sum to no more than total power") {
    SplitMix64 gen(31);
    std::vector<double> x(128 * 15);
    for (auto& v : x) v = gen.normal() + 0.5 * std::sin(2.0 * M_PI * 6.0 * (&v - x.data()) / 128.0);
    auto s = features::channel_stats(x, 128.0);
    const double bands = s.delta + s.theta + s.alpha + s.beta;
    CHECK(bands <= s.total_power * (1.0 + 1e-6));
    CHECK(s.spectral_entropy >= 0.0);
}

TEST_CASE("spectral entropy bounded by log2 of band count") {
    // white noise pushes entropy high but never past log2(#bins in 0.5-30)
    SplitMix64 gen(41);
    std::vector<double> x(128 * 30);
    for (auto& v : x) v = gen.normal();
    auto s = features::channel_stats(x, 128.0);
    // 4 s window at 128 Hz -> df 0.25 Hz -> bins [2,120) -> 118 bins
    CHECK(s.spectral_entropy <= std::log2(118.0) + 1e-12);
    CHECK(s.spectral_entropy > 5.0); // flat-ish spectrum is near the cap
}

TEST_CASE("eeg_summary aggregates over channel-hour pairs") {
    auto a = sine(10.0, 128.0, 10.0);
    auto b = sine(3.0, 128.0, 10.0);
    std::vector<ingest::EegSegment> segs;
    segs.push_back(make_segment(5, {"F3", "F4"}, {a, b}, 128.0));
    auto sum = features::eeg_summary(segs);
    REQUIRE(sum.has_data);

    auto sa = features::channel_stats(a, 128.0);
    auto sb = features::channel_stats(b, 128.0);
    CHECK(sum.mean[2] == doctest::Approx(0.5 * (sa.alpha + sb.alpha)).epsilon(1e-12));
    // sample SD of two values = |diff| / sqrt(2)
    CHECK(sum.sd[0] == doctest::Approx(std::abs(sa.delta - sb.delta) / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("eeg_summary: identical segments yield zero aggregate SD") {
    auto x = sine(7.0, 128.0, 8.0);
    std::vector<ingest::EegSegment> segs;
    segs.push_back(make_segment(1, {"Cz"}, {x}, 128.0));
    segs.push_back(make_segment(2, {"Cz"}, {x}, 128.0));
    auto sum = features::eeg_summary(segs);
    REQUIRE(sum.has_data);
    for (double v : sum.sd) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("eeg_summary: empty input flagged, all zero") {
    auto sum = features::eeg_summary({});
    CHECK_FALSE(sum.has_data);
    for (double v : sum.mean) CHECK(v == 0.0);
    for (double v : sum.sd) CHECK(v == 0.0);
    auto vals = features::summary_values(sum);
    CHECK(vals.size() == features::kSummaryDim);
}

TEST_CASE("feature-name lists line up with value vectors") {
    CHECK(features::clinical_feature_names().size() == features::kClinicalDim);
    CHECK(features::signal_flag_names().size() == features::kSignalFlagDim);
    CHECK(features::summary_names().size() == features::kSummaryDim);
    CHECK(features::stat_names().size() == features::kStatDim);
    CHECK(features::summary_names()[0] == "delta_power_mean");
    CHECK(features::summary_names()[features::kStatDim] == "delta_power_sd");

    features::SignalFlags f;
    CHECK(features::signal_flag_values(f).size() == features::kSignalFlagDim);
}
