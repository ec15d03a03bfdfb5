#include "comapipe/rocket.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "comapipe/errors.hpp"
#include "comapipe/rng.hpp"
#include "comapipe/util.hpp"

namespace comapipe::rocket {

namespace {

constexpr int kLengths[3] = {7, 9, 11};
constexpr int kMaxLength = 11;

} // namespace

KernelBank generate_bank(std::uint64_t seed, std::size_t n_channels, std::size_t series_len,
                         const BankConfig& config) {
    if (n_channels == 0) throw ArgumentError("generate_bank: need at least one channel");
    if (series_len < std::size_t(kMaxLength))
        throw ArgumentError("generate_bank: series_len " + std::to_string(series_len) +
                            " shorter than max kernel length " + std::to_string(kMaxLength));
    if (config.features_per_kernel != 2 && config.features_per_kernel != 4)
        throw ArgumentError("generate_bank: features_per_kernel must be 2 or 4");
    if (config.n_kernels == 0) throw ArgumentError("generate_bank: n_kernels must be nonzero");

    KernelBank bank;
    bank.seed = seed;
    bank.n_input_channels = n_channels;
    bank.series_len = series_len;
    bank.config = config;
    bank.kernels.reserve(config.n_kernels);

    SplitMix64 gen(seed);
    for (std::size_t i = 0; i < config.n_kernels; ++i) {
        RocketKernel k;
        k.length = kLengths[gen.below(3)];

        std::size_t n_sel = 1;
        if (n_channels > 1) {
            const double u = gen.uniform(0.0, std::log2(double(n_channels) + 1.0));
            n_sel = std::min<std::size_t>(n_channels, std::size_t(std::exp2(u)));
            if (n_sel == 0) n_sel = 1;
        }
        k.channel_indices = gen.sample_indices(n_channels, n_sel); // sorted

        k.weights.assign(n_sel, std::vector<double>(std::size_t(k.length)));
        for (auto& row : k.weights) {
            double mean = 0.0;
            for (auto& w : row) {
                w = gen.normal();
                mean += w;
            }
            mean /= double(row.size());
            for (auto& w : row) w -= mean;
        }

        k.bias = gen.uniform(-1.0, 1.0);

        const double hi = std::log2(double(series_len - 1) / double(k.length - 1));
        const double x = gen.uniform(0.0, hi);
        k.dilation = std::min(config.dilation_cap, std::max(1, int(std::exp2(x))));

        k.padding = (gen.next() & 1) ? ((k.length - 1) * k.dilation) / 2 : 0;
        bank.kernels.push_back(std::move(k));
    }
    return bank;
}

namespace {

KernelFeatures apply_impl(const std::vector<std::vector<double>>& series, const RocketKernel& k,
                          const std::vector<char>* nonzero) {
    const long n = series.empty() ? 0 : long(series.front().size());
    const long rf = k.receptive_field();
    const long n_out = n + 2L * k.padding - rf + 1;

    KernelFeatures f;
    if (n_out <= 0) {
        f.too_short = true;
        return f;
    }

    long pos = 0, run = 0, best_run = 0;
    double mx = -HUGE_VAL, pos_sum = 0.0;
    for (long t = 0; t < n_out; ++t) {
        double acc = k.bias;
        for (std::size_t ci = 0; ci < k.channel_indices.size(); ++ci) {
            const std::size_t ch = k.channel_indices[ci];
            if (nonzero && !(*nonzero)[ch]) continue;
            const auto& x = series[ch];
            const auto& w = k.weights[ci];
            long idx = t - k.padding;
            for (int j = 0; j < k.length; ++j, idx += k.dilation)
                if (idx >= 0 && idx < n) acc += w[std::size_t(j)] * x[std::size_t(idx)];
        }
        mx = std::max(mx, acc);
        if (acc > 0.0) {
            ++pos;
            pos_sum += acc;
            ++run;
            best_run = std::max(best_run, run);
        } else {
            run = 0;
        }
    }
    f.ppv = double(pos) / double(n_out);
    f.max = mx;
    f.mpv = pos > 0 ? pos_sum / double(pos) : 0.0;
    f.lspv = double(best_run) / double(n_out);
    return f;
}

} // namespace

KernelFeatures apply_kernel(const std::vector<std::vector<double>>& series, const RocketKernel& k) {
    for (std::size_t ch : k.channel_indices)
        if (ch >= series.size()) throw ContractError("apply_kernel: channel index out of range");
    return apply_impl(series, k, nullptr);
}

std::vector<double> transform(const std::vector<std::vector<double>>& series, const KernelBank& bank) {
    if (series.size() != bank.n_input_channels)
        throw ContractError("transform: series has " + std::to_string(series.size()) +
                            " channels, bank expects " + std::to_string(bank.n_input_channels));

    // all-zero channels contribute nothing to any window; skip them once
    std::vector<char> nonzero(series.size(), 0);
    for (std::size_t c = 0; c < series.size(); ++c)
        nonzero[c] = std::any_of(series[c].begin(), series[c].end(), [](double v) { return v != 0.0; });

    std::vector<double> out;
    out.reserve(bank.feature_dim());
    for (const auto& k : bank.kernels) {
        const auto f = apply_impl(series, k, &nonzero);
        out.push_back(f.ppv);
        out.push_back(f.max);
        if (bank.config.features_per_kernel == 4) {
            out.push_back(f.mpv);
            out.push_back(f.lspv);
        }
    }
    return out;
}

std::vector<std::string> feature_names(const KernelBank& bank) {
    std::vector<std::string> names;
    names.reserve(bank.feature_dim());
    for (std::size_t i = 0; i < bank.kernels.size(); ++i) {
        const std::string p = "k" + std::to_string(i) + "_";
        names.push_back(p + "ppv");
        names.push_back(p + "max");
        if (bank.config.features_per_kernel == 4) {
            names.push_back(p + "mpv");
            names.push_back(p + "lspv");
        }
    }
    return names;
}

namespace {

constexpr char kMagic[4] = {'C', 'P', 'K', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& s, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    s.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& s, std::size_t& off) {
    if (off + sizeof(T) > s.size()) throw FormatError("kernel bank blob truncated");
    T v;
    std::memcpy(&v, s.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

bool kernels_equal(const KernelBank& a, const KernelBank& b) {
    if (a.kernels.size() != b.kernels.size()) return false;
    for (std::size_t i = 0; i < a.kernels.size(); ++i) {
        const auto& x = a.kernels[i];
        const auto& y = b.kernels[i];
        if (x.length != y.length || x.dilation != y.dilation || x.padding != y.padding ||
            x.channel_indices != y.channel_indices || x.bias != y.bias || x.weights != y.weights)
            return false;
    }
    return true;
}

} // namespace

std::string serialize_bank(const KernelBank& bank, bool with_weights) {
    std::string s;
    s.append(kMagic, 4);
    put<std::uint32_t>(s, kVersion);
    put<std::uint64_t>(s, bank.seed);
    put<std::uint64_t>(s, bank.n_input_channels);
    put<std::uint64_t>(s, bank.series_len);
    put<std::uint64_t>(s, bank.config.n_kernels);
    put<std::uint32_t>(s, std::uint32_t(bank.config.features_per_kernel));
    put<std::uint32_t>(s, std::uint32_t(bank.config.dilation_cap));
    put<std::uint8_t>(s, with_weights ? 1 : 0);
    if (with_weights) {
        for (const auto& k : bank.kernels) {
            put<std::uint32_t>(s, std::uint32_t(k.length));
            put<std::uint32_t>(s, std::uint32_t(k.dilation));
            put<std::uint32_t>(s, std::uint32_t(k.padding));
            put<double>(s, k.bias);
            put<std::uint32_t>(s, std::uint32_t(k.channel_indices.size()));
            for (std::size_t c : k.channel_indices) put<std::uint64_t>(s, c);
            for (const auto& row : k.weights)
                for (double w : row) put<double>(s, w);
        }
    }
    return s;
}

KernelBank deserialize_bank(const std::string& blob) {
    std::size_t off = 0;
    if (blob.size() < 4 || std::memcmp(blob.data(), kMagic, 4) != 0)
        throw FormatError("kernel bank blob: bad magic");
    off = 4;
    const auto version = take<std::uint32_t>(blob, off);
    if (version != kVersion)
        throw FormatError("kernel bank blob: unsupported version " + std::to_string(version));

    const auto seed = take<std::uint64_t>(blob, off);
    const auto n_channels = take<std::uint64_t>(blob, off);
    const auto series_len = take<std::uint64_t>(blob, off);
    BankConfig config;
    config.n_kernels = std::size_t(take<std::uint64_t>(blob, off));
    config.features_per_kernel = int(take<std::uint32_t>(blob, off));
    config.dilation_cap = int(take<std::uint32_t>(blob, off));
    const bool with_weights = take<std::uint8_t>(blob, off) != 0;

    KernelBank bank = generate_bank(seed, std::size_t(n_channels), std::size_t(series_len), config);

    if (with_weights) {
        KernelBank stored = bank; // same header; kernels replaced below
        stored.kernels.clear();
        for (std::size_t i = 0; i < config.n_kernels; ++i) {
            RocketKernel k;
            k.length = int(take<std::uint32_t>(blob, off));
            k.dilation = int(take<std::uint32_t>(blob, off));
            k.padding = int(take<std::uint32_t>(blob, off));
            k.bias = take<double>(blob, off);
            const auto n_sel = take<std::uint32_t>(blob, off);
            k.channel_indices.resize(n_sel);
            for (auto& c : k.channel_indices) c = std::size_t(take<std::uint64_t>(blob, off));
            k.weights.assign(n_sel, std::vector<double>(std::size_t(k.length)));
            for (auto& row : k.weights)
                for (auto& w : row) w = take<double>(blob, off);
            stored.kernels.push_back(std::move(k));
        }
        if (!kernels_equal(bank, stored))
            throw FormatError("kernel bank blob: stored kernels do not match regeneration");
    }
    return bank;
}

void save_bank(const std::string& path, const KernelBank& bank, bool with_weights) {
    write_file_atomic(path, serialize_bank(bank, with_weights));
}

KernelBank load_bank(const std::string& path) { return deserialize_bank(read_file(path)); }

} // namespace comapipe::rocket
