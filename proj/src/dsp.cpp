#include "comapipe/dsp.hpp"

#include "comapipe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace comapipe::dsp {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

// One conjugate pole pair -> denominator coefficients.
Biquad section_from_pole(std::complex<double> pole, double b0, double b1, double b2) {
    Biquad s;
    s.b0 = b0;
    s.b1 = b1;
    s.b2 = b2;
    s.a1 = -2.0 * pole.real();
    s.a2 = std::norm(pole);
    return s;
}

std::complex<double> bilinear(std::complex<double> s, double fs) {
    const double k = 2.0 * fs;
    return (k + s) / (k - s);
}

std::complex<double> section_response(const Biquad& s, std::complex<double> z_inv) {
    const std::complex<double> num = s.b0 + s.b1 * z_inv + s.b2 * z_inv * z_inv;
    const std::complex<double> den = 1.0 + s.a1 * z_inv + s.a2 * z_inv * z_inv;
    return num / den;
}

double dc_gain(const Biquad& s) {
    return (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
}

// Steady-state DF2T state for a unit step input.
void step_zi(const Biquad& s, double& s1, double& s2) {
    const double y = dc_gain(s);
    s2 = s.b2 - s.a2 * y;
    s1 = s.b1 - s.a1 * y + s2;
}

void run_sections(const std::vector<Biquad>& sections, std::vector<double>& x) {
    double scale = 1.0; // cumulative DC gain of upstream sections
    const double x0 = x.empty() ? 0.0 : x.front();
    for (const auto& s : sections) {
        double s1, s2;
        step_zi(s, s1, s2);
        s1 *= x0 * scale;
        s2 *= x0 * scale;
        for (double& v : x) {
            const double in = v;
            const double out = s.b0 * in + s1;
            s1 = s.b1 * in - s.a1 * out + s2;
            s2 = s.b2 * in - s.a2 * out;
            v = out;
        }
        scale *= dc_gain(s);
    }
}

std::size_t cascade_order(const std::vector<Biquad>& sections) { return 2 * sections.size(); }

} // namespace

std::vector<Biquad> design_butter_bandpass(int order, double f_lo, double f_hi, double fs) {
    if (order < 1) throw ConfigError("filter order must be >= 1");
    if (!(0.0 < f_lo && f_lo < f_hi && f_hi < fs / 2.0)) {
        throw ConfigError("band edges must satisfy 0 < low < high < fs/2");
    }

    // Pre-warped analog band edges.
    const double w1 = 2.0 * fs * std::tan(kPi * f_lo / fs);
    const double w2 = 2.0 * fs * std::tan(kPi * f_hi / fs);
    const double w0 = std::sqrt(w1 * w2);
    const double bw = w2 - w1;

    // Low-pass prototype poles with non-negative imaginary part; each maps
    // to two band-pass poles via s^2 - p*bw*s + w0^2 = 0.
    std::vector<Biquad> sections;
    for (int k = 1; k <= order; ++k) {
        const double theta = (2.0 * k - 1.0) * kPi / (2.0 * order);
        const std::complex<double> p(-std::sin(theta), std::cos(theta));
        if (p.imag() < -1e-12) continue; // conjugate handled by its partner
        const std::complex<double> pb = p * bw;
        const std::complex<double> disc = std::sqrt(pb * pb - 4.0 * w0 * w0);
        const std::complex<double> s_hi = (pb + disc) / 2.0;
        const std::complex<double> s_lo = (pb - disc) / 2.0;
        const std::complex<double> z_hi = bilinear(s_hi, fs);
        const std::complex<double> z_lo = bilinear(s_lo, fs);
        if (std::abs(p.imag()) <= 1e-12) {
            // Real prototype pole (odd order): s_hi/s_lo are conjugates or
            // both real; either way they form one section.
            Biquad s;
            s.b0 = 1.0;
            s.b1 = 0.0;
            s.b2 = -1.0;
            s.a1 = -(z_hi + z_lo).real();
            s.a2 = (z_hi * z_lo).real();
            sections.push_back(s);
        } else {
            sections.push_back(section_from_pole(z_hi, 1.0, 0.0, -1.0));
            sections.push_back(section_from_pole(z_lo, 1.0, 0.0, -1.0));
        }
    }

    // Normalize so the response is exactly 1 at the digital band center.
    const double wc = 2.0 * std::atan(w0 / (2.0 * fs));
    const std::complex<double> z_inv = std::exp(std::complex<double>(0.0, -wc));
    std::complex<double> h(1.0, 0.0);
    for (const auto& s : sections) h *= section_response(s, z_inv);
    const double g = std::abs(h);
    if (g <= 0.0) throw ConfigError("degenerate band-pass design");
    const double per_section = std::pow(1.0 / g, 1.0 / static_cast<double>(sections.size()));
    for (auto& s : sections) {
        s.b0 *= per_section;
        s.b1 *= per_section;
        s.b2 *= per_section;
    }
    return sections;
}

Biquad design_notch(double f0, double q, double fs) {
    if (!(0.0 < f0 && f0 < fs / 2.0)) throw ConfigError("notch frequency must be in (0, fs/2)");
    if (q <= 0.0) throw ConfigError("notch Q must be > 0");
    const double w0 = 2.0 * kPi * f0 / fs;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    Biquad s;
    s.b0 = 1.0 / a0;
    s.b1 = -2.0 * std::cos(w0) / a0;
    s.b2 = 1.0 / a0;
    s.a1 = -2.0 * std::cos(w0) / a0;
    s.a2 = (1.0 - alpha) / a0;
    return s;
}

std::vector<double> filtfilt(const std::vector<Biquad>& sections, const std::vector<double>& x,
                             int pad_len) {
    if (sections.empty()) return x;
    const std::size_t n = x.size();
    if (n < 2) throw ArgumentError("filtfilt needs at least 2 samples");
    std::size_t pad = pad_len > 0 ? static_cast<std::size_t>(pad_len)
                                  : 3 * cascade_order(sections);
    if (pad >= n) pad = n - 1;

    // Odd reflection about the end samples.
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * x.front() - x[pad - i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 0; i < pad; ++i) ext.push_back(2.0 * x.back() - x[n - 2 - i]);

    run_sections(sections, ext);
    std::reverse(ext.begin(), ext.end());
    run_sections(sections, ext);
    std::reverse(ext.begin(), ext.end());

    return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                               ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

ingest::EegSegment bandpass_notch(const ingest::EegSegment& seg, const FilterSpec& spec,
                                  FilterReport* report) {
    seg.validate();
    if (seg.fs <= 2.0 * spec.band_high) {
        throw ConfigError("sample rate too low for requested band-pass high edge");
    }
    std::vector<Biquad> sections = design_butter_bandpass(spec.order, spec.band_low,
                                                          spec.band_high, seg.fs);
    for (double f : spec.notch_freqs) {
        if (f >= seg.fs / 2.0) {
            if (report) report->skipped_notches.push_back(f);
            continue;
        }
        sections.push_back(design_notch(f, spec.notch_q, seg.fs));
    }

    if (seg.n_samples() <= 3 * cascade_order(sections)) {
        throw ArgumentError("segment too short for zero-phase filtering");
    }
    for (const auto& row : seg.samples) {
        for (double v : row) {
            if (std::isnan(v)) throw DataError("NaN sample in segment");
        }
    }

    ingest::EegSegment out = seg;
    for (auto& row : out.samples) {
        row = filtfilt(sections, row);
    }
    return out;
}

namespace {

double bessel_i0(double x) {
    // Series expansion; converges fast for the window arguments used here.
    double sum = 1.0, term = 1.0;
    const double half_sq = x * x / 4.0;
    for (int k = 1; k < 64; ++k) {
        term *= half_sq / (static_cast<double>(k) * static_cast<double>(k));
        sum += term;
        if (term < 1e-16 * sum) break;
    }
    return sum;
}

double sinc(double t) {
    if (std::abs(t) < 1e-12) return 1.0;
    return std::sin(kPi * t) / (kPi * t);
}

} // namespace

ingest::EegSegment resample(const ingest::EegSegment& seg, double fs_target) {
    seg.validate();
    if (fs_target <= 0.0) throw ArgumentError("fs_target must be > 0");
    if (fs_target == seg.fs) return seg;

    const double ratio = fs_target / seg.fs;
    const double cutoff = std::min(1.0, ratio); // relative to input Nyquist
    const double beta = 8.6;
    const double i0_beta = bessel_i0(beta);
    const double half_width = std::ceil(32.0 / cutoff);

    const std::size_t n_in = seg.n_samples();
    const std::size_t n_out = static_cast<std::size_t>(
        std::llround(static_cast<double>(n_in) * ratio));

    ingest::EegSegment out;
    out.channels = seg.channels;
    out.fs = fs_target;
    out.hour = seg.hour;
    out.samples.resize(seg.n_channels());

    for (std::size_t c = 0; c < seg.n_channels(); ++c) {
        const auto& x = seg.samples[c];
        auto& y = out.samples[c];
        y.resize(n_out);
        for (std::size_t j = 0; j < n_out; ++j) {
            const double t = static_cast<double>(j) / ratio;
            const long long lo = static_cast<long long>(std::ceil(t - half_width));
            const long long hi = static_cast<long long>(std::floor(t + half_width));
            double acc = 0.0, wsum = 0.0;
            for (long long m = lo; m <= hi; ++m) {
                const double dt = static_cast<double>(m) - t;
                const double u = dt / half_width;
                const double win = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - u * u))) / i0_beta;
                const double w = cutoff * sinc(cutoff * dt) * win;
                wsum += w;
                if (m >= 0 && m < static_cast<long long>(n_in)) {
                    acc += x[static_cast<std::size_t>(m)] * w;
                }
            }
            y[j] = wsum != 0.0 ? acc / wsum : 0.0;
        }
    }
    return out;
}

ArtifactScore score_window(const ingest::EegSegment& seg, std::size_t start, std::size_t len) {
    const std::size_t n_ch = seg.n_channels();
    const std::size_t block = std::max<std::size_t>(1, static_cast<std::size_t>(seg.fs));
    ArtifactScore sc;
    sc.window_start = start;
    sc.window_len = len;

    double clip_sum = 0.0, flat_sum = 0.0, amp_sum = 0.0;
    for (std::size_t c = 0; c < n_ch; ++c) {
        const auto& x = seg.samples[c];
        // Rails from the whole recording, per channel.
        const auto [mn_it, mx_it] = std::minmax_element(x.begin(), x.end());
        const double mn = *mn_it, mx = *mx_it, range = mx - mn;

        std::size_t clipped = 0;
        if (range > 0.0) {
            const double lo_rail = mn + 0.01 * range;
            const double hi_rail = mx - 0.01 * range;
            for (std::size_t i = start; i < start + len; ++i) {
                if (x[i] <= lo_rail || x[i] >= hi_rail) ++clipped;
            }
        }
        clip_sum += static_cast<double>(clipped) / static_cast<double>(len);

        const std::size_t n_blocks = len / block;
        std::size_t flat = 0, loud = 0;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            const std::size_t b0 = start + b * block;
            double mean = 0.0;
            for (std::size_t i = b0; i < b0 + block; ++i) mean += x[i];
            mean /= static_cast<double>(block);
            double var = 0.0;
            for (std::size_t i = b0; i < b0 + block; ++i) var += (x[i] - mean) * (x[i] - mean);
            const double sd = std::sqrt(var / static_cast<double>(block));
            if (sd < 0.1) ++flat;
            if (sd > 500.0) ++loud;
        }
        if (n_blocks > 0) {
            flat_sum += static_cast<double>(flat) / static_cast<double>(n_blocks);
            amp_sum += static_cast<double>(loud) / static_cast<double>(n_blocks);
        }
    }

    sc.clip_frac = clip_sum / static_cast<double>(n_ch);
    sc.flat_frac = flat_sum / static_cast<double>(n_ch);
    sc.amplitude_penalty = amp_sum / static_cast<double>(n_ch);
    sc.total = 1.0 * sc.clip_frac + 1.0 * sc.flat_frac + 0.5 * sc.amplitude_penalty;
    return sc;
}

std::pair<ingest::EegSegment, ArtifactScore> select_cleanest(const ingest::EegSegment& seg,
                                                             double window_s, double stride_s) {
    seg.validate();
    const std::size_t wlen = static_cast<std::size_t>(std::llround(window_s * seg.fs));
    const std::size_t stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(stride_s * seg.fs)));
    if (wlen == 0) throw ArgumentError("window must span at least one sample");
    if (seg.n_samples() < wlen) {
        throw ArgumentError("recording shorter than the artifact window; shorten the window or "
                            "skip this segment");
    }

    ArtifactScore best;
    bool first = true;
    for (std::size_t start = 0; start + wlen <= seg.n_samples(); start += stride) {
        ArtifactScore sc = score_window(seg, start, wlen);
        if (first || sc.total < best.total) {
            best = sc;
            first = false;
        }
    }

    ingest::EegSegment out;
    out.channels = seg.channels;
    out.fs = seg.fs;
    out.hour = seg.hour;
    out.samples.resize(seg.n_channels());
    for (std::size_t c = 0; c < seg.n_channels(); ++c) {
        const auto& x = seg.samples[c];
        out.samples[c].assign(x.begin() + static_cast<std::ptrdiff_t>(best.window_start),
                              x.begin() + static_cast<std::ptrdiff_t>(best.window_start + wlen));
    }
    return {std::move(out), best};
}

} // namespace comapipe::dsp
