#pragma once

#include "comapipe/ingest.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace comapipe::dsp {

/// Band-pass plus notch configuration. Defaults follow standard clinical
/// EEG practice: 0.5-30 Hz 4th-order Butterworth, 50/60 Hz notches at Q=30.
struct FilterSpec {
    double band_low = 0.5;
    double band_high = 30.0;
    std::vector<double> notch_freqs = {50.0, 60.0};
    int order = 4;
    double notch_q = 30.0;
};

struct FilterReport {
    std::vector<double> skipped_notches; // notch frequencies >= fs/2
};

/// Artifact score for one candidate window. total is the fixed weighted sum
/// 1.0*clip_frac + 1.0*flat_frac + 0.5*amplitude_penalty; components are
/// channel-averaged.
struct ArtifactScore {
    std::size_t window_start = 0; // sample index
    std::size_t window_len = 0;
    double clip_frac = 0.0;        // samples within 1% of per-channel rails
    double flat_frac = 0.0;        // 1-s blocks with SD < 0.1 uV
    double amplitude_penalty = 0.0; // 1-s blocks with SD > 500 uV
    double total = 0.0;
};

// Normalized biquad section (a0 == 1).
struct Biquad {
    double b0, b1, b2, a1, a2;
};

// Butterworth band-pass as `order` second-order sections (2*order poles),
// gain-normalized at the band center.
std::vector<Biquad> design_butter_bandpass(int order, double f_lo, double f_hi, double fs);

// Single biquad notch at f0 with quality factor q.
Biquad design_notch(double f0, double q, double fs);

// Zero-phase (forward-backward) cascade filtering with odd-reflect padding
// and steady-state initial conditions. pad_len <= 0 selects the default of
// three times the cascade order.
std::vector<double> filtfilt(const std::vector<Biquad>& sections, const std::vector<double>& x,
                             int pad_len = -1);

// Per-channel zero-phase band-pass + notch. Output keeps shape, fs and
// channel order. Notch frequencies at or above fs/2 are skipped and listed
// in the report. Throws ConfigError when fs <= 2*band_high, DataError on
// NaN input, ArgumentError when the segment is shorter than 3x the
// cascade order.
ingest::EegSegment bandpass_notch(const ingest::EegSegment& seg, const FilterSpec& spec,
                                  FilterReport* report = nullptr);

// Kaiser-windowed sinc resampling with per-position kernel normalization;
// the kernel cutoff provides the anti-alias low-pass when downsampling.
// fs_target == seg.fs returns the input unchanged. Output length is
// round(n * fs_target / fs).
ingest::EegSegment resample(const ingest::EegSegment& seg, double fs_target);

// Scores every window on the (stride-quantized) grid and returns the one
// with minimal total score; ties resolve to the earliest window. The
// returned segment is a verbatim sub-slice of the input.
std::pair<ingest::EegSegment, ArtifactScore> select_cleanest(const ingest::EegSegment& seg,
                                                             double window_s, double stride_s);

// Score one window directly; exposed so tests can brute-force the grid.
ArtifactScore score_window(const ingest::EegSegment& seg, std::size_t start, std::size_t len);

} // namespace comapipe::dsp
