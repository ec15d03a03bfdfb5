#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "comapipe/errors.hpp"
#include "comapipe/rng.hpp"
#include "comapipe/spectro.hpp"

using namespace comapipe;
using spectro::EmbeddingProviderSpec;
using spectro::StftParams;

namespace {

std::vector<double> sine(double freq, double fs, double seconds, double amp = 1.0) {
    std::vector<double> x(std::size_t(seconds * fs));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = amp * std::sin(2.0 * M_PI * freq * double(i) / fs);
    return x;
}

} // namespace

TEST_CASE("spectrogram peak is exactly 0 dB for nonzero input") {
    auto s = spectro::spectrogram(sine(7.0, 128.0, 10.0), 128.0, {});
    REQUIRE_FALSE(s.zero_energy);
    double mx = -1e9, mn = 1e9;
    for (const auto& row : s.values)
        for (double v : row) {
            mx = std::max(mx, v);
            mn = std::min(mn, v);
        }
    CHECK(mx == 0.0);
    CHECK(mn >= -80.0);
}

TEST_CASE("10 Hz sine: argmax band lands at 10 Hz") {
    auto s = spectro::spectrogram(sine(10.0, 128.0, 60.0), 128.0, {});
    // mean dB per band, pick the hottest
    std::size_t best = 0;
    double best_mean = -1e9;
    for (std::size_t b = 0; b < s.n_bands(); ++b) {
        double m = 0.0;
        for (double v : s.values[b]) m += v;
        m /= double(s.n_frames());
        if (m > best_mean) {
            best_mean = m;
            best = b;
        }
    }
    // neighbour spacing around the winner as the "one band-width" yardstick
    const double width = (best + 1 < s.n_bands() ? s.band_centers[best + 1] - s.band_centers[best]
                                                 : s.band_centers[best] - s.band_centers[best - 1]);
    CHECK(std::abs(s.band_centers[best] - 10.0) <= width + 1e-12);
}

TEST_CASE("all-zero input: flagged, every value at the floor") {
    std::vector<double> x(2560, 0.0);
    auto s = spectro::spectrogram(x, 128.0, {});
    CHECK(s.zero_energy);
    for (const auto& row : s.values)
        for (double v : row) CHECK(v == -80.0);
}

TEST_CASE("dB values invariant under amplitude scaling") {
    auto x = sine(6.0, 128.0, 8.0);
    for (auto& v : x) v += 0.2 * std::sin(2.0 * M_PI * 19.0 * (&v - x.data()) / 128.0);
    auto a = spectro::spectrogram(x, 128.0, {});

    auto x2 = x;
    for (auto& v : x2) v *= 2.0; // power of two: ratios are bit-identical
    auto b = spectro::spectrogram(x2, 128.0, {});
    for (std::size_t i = 0; i < a.n_bands(); ++i)
        for (std::size_t t = 0; t < a.n_frames(); ++t) CHECK(a.values[i][t] == b.values[i][t]);

    auto x3 = x;
    for (auto& v : x3) v *= 3.7;
    auto c = spectro::spectrogram(x3, 128.0, {});
    for (std::size_t i = 0; i < a.n_bands(); ++i)
        for (std::size_t t = 0; t < a.n_frames(); ++t)
            CHECK(std::abs(a.values[i][t] - c.values[i][t]) < 1e-9);
}

TEST_CASE("spectrogram rejects a frame longer than the signal") {
    std::vector<double> x(100, 1.0);
    CHECK_THROWS_AS(spectro::spectrogram(x, 128.0, {}), ArgumentError);
}

TEST_CASE("grid features read cells time-major with per-cell mean/SD") {
    // 8x8 spectrogram: every cell is a single value, so mean==value, SD==0
    spectro::Spectrogram s;
    s.values.assign(8, std::vector<double>(8, 0.0));
    for (std::size_t b = 0; b < 8; ++b)
        for (std::size_t t = 0; t < 8; ++t) s.values[b][t] = -double(10 * t + b);
    auto g = spectro::grid_features(s);
    REQUIRE(g.size() == 128);
    for (std::size_t t = 0; t < 8; ++t)
        for (std::size_t b = 0; b < 8; ++b) {
            CHECK(g[2 * (t * 8 + b)] == -double(10 * t + b));
            CHECK(g[2 * (t * 8 + b) + 1] == 0.0);
        }
}

TEST_CASE("grid features tolerate tiny spectrograms") {
    spectro::Spectrogram s;
    s.values = {{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}};
    auto g = spectro::grid_features(s);
    REQUIRE(g.size() == 128);
    for (double v : g) CHECK(std::isfinite(v));
}

TEST_CASE("grid features are permutation-invariant within a cell") {
    auto x = sine(9.0, 128.0, 40.0);
    SplitMix64 gen(11);
    for (auto& v : x) v += 0.05 * gen.normal();
    auto s = spectro::spectrogram(x, 128.0, {});
    auto base = spectro::grid_features(s);

    // shuffle the values inside the (time 0..nt/8, band 0..nb/8) cell
    const std::size_t t1 = s.n_frames() / 8, b1 = s.n_bands() / 8;
    std::vector<double> cell;
    for (std::size_t b = 0; b < b1; ++b)
        for (std::size_t t = 0; t < t1; ++t) cell.push_back(s.values[b][t]);
    SplitMix64 shuf(12);
    shuf.shuffle(cell);
    std::size_t k = 0;
    for (std::size_t b = 0; b < b1; ++b)
        for (std::size_t t = 0; t < t1; ++t) s.values[b][t] = cell[k++];

    auto permuted = spectro::grid_features(s);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(base[i] == doctest::Approx(permuted[i]).epsilon(1e-12));
}

TEST_CASE("embedding is deterministic in the seed") {
    auto s = spectro::spectrogram(sine(5.0, 128.0, 10.0), 128.0, {});
    EmbeddingProviderSpec p;
    p.seed = 77;
    auto a = spectro::embed(s, std::nullopt, p);
    auto b = spectro::embed(s, std::nullopt, p);
    REQUIRE(a.size() == p.output_dim);
    CHECK(a == b);

    p.seed = 78;
    auto c = spectro::embed(s, std::nullopt, p);
    CHECK(a != c);
}

TEST_CASE("all-floor spectrogram embeds as the map of the constant grid vector") {
    std::vector<double> zeros(2560, 0.0);
    auto s = spectro::spectrogram(zeros, 128.0, {});
    EmbeddingProviderSpec p;
    p.seed = 5;
    auto via_spec = spectro::embed(s, std::nullopt, p);

    std::vector<double> grid(128, 0.0);
    for (std::size_t i = 0; i < 128; i += 2) grid[i] = -80.0; // mean=-80, SD=0 per cell
    auto direct = spectro::embed_from_grid(grid, std::nullopt, p);
    CHECK(via_spec == direct);
}

TEST_CASE("a single perturbed grid cell changes the embedding") {
    auto x = sine(8.0, 128.0, 30.0);
    auto s = spectro::spectrogram(x, 128.0, {});
    EmbeddingProviderSpec p;
    p.seed = 99;
    auto before = spectro::embed(s, std::nullopt, p);
    s.values[0][0] = -40.0; // lift one floor-level cell
    auto after = spectro::embed(s, std::nullopt, p);
    CHECK(before != after);
}

TEST_CASE("clinical fusion contract is enforced both ways") {
    auto s = spectro::spectrogram(sine(5.0, 128.0, 10.0), 128.0, {});
    EmbeddingProviderSpec p;
    std::vector<double> clin(13, 0.5);
    CHECK_THROWS_AS(spectro::embed(s, clin, p), ContractError); // fuse off, vector given
    p.fuse_clinical = true;
    CHECK_THROWS_AS(spectro::embed(s, std::nullopt, p), ContractError); // fuse on, no vector
    auto fused = spectro::embed(s, clin, p);
    REQUIRE(fused.size() == p.output_dim);

    // fused and unfused providers disagree (different input dims)
    p.fuse_clinical = false;
    auto plain = spectro::embed(s, std::nullopt, p);
    CHECK(fused != plain);
}

TEST_CASE("embedding map is linear") {
    SplitMix64 gen(3);
    std::vector<double> a(128), b(128);
    for (auto& v : a) v = gen.normal();
    for (auto& v : b) v = gen.normal();
    std::vector<double> combo(128);
    for (std::size_t i = 0; i < 128; ++i) combo[i] = 2.0 * a[i] - 0.5 * b[i];

    EmbeddingProviderSpec p;
    p.seed = 41;
    auto fa = spectro::embed_from_grid(a, std::nullopt, p);
    auto fb = spectro::embed_from_grid(b, std::nullopt, p);
    auto fc = spectro::embed_from_grid(combo, std::nullopt, p);
    for (std::size_t i = 0; i < fc.size(); ++i)
        CHECK(fc[i] == doctest::Approx(2.0 * fa[i] - 0.5 * fb[i]).epsilon(1e-9));
}
