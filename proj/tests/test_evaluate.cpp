#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "comapipe/errors.hpp"
#include "comapipe/evaluate.hpp"
#include "comapipe/rng.hpp"
#include "oracles.hpp"

using namespace comapipe;

namespace {

std::vector<ingest::Outcome> to_outcomes(const std::vector<int>& is_poor) {
    std::vector<ingest::Outcome> out;
    out.reserve(is_poor.size());
    for (int y : is_poor) out.push_back(y ? ingest::Outcome::Poor : ingest::Outcome::Good);
    return out;
}

// Random instance with deliberate ties: probabilities snapped to a coarse
// grid about half the time.
void random_instance(SplitMix64& gen, std::size_t n, std::vector<int>& is_poor,
                     std::vector<double>& probs) {
    is_poor.resize(n);
    probs.resize(n);
    const bool coarse = (gen.next() & 1) != 0;
    for (std::size_t i = 0; i < n; ++i) {
        is_poor[i] = (gen.next() & 1) ? 1 : 0;
        double p = gen.uniform01();
        if (coarse) p = std::round(p * 8.0) / 8.0;
        probs[i] = p;
    }
}

double trapezoid_area(const RocCurve& c) {
    double area = 0.0;
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        const auto& a = c.points[i - 1];
        const auto& b = c.points[i];
        area += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
    }
    return area;
}

} // namespace

TEST_CASE("challenge score: worked four-patient example, clean separation") {
    const auto labels = to_outcomes({1, 1, 0, 0});
    const std::vector<double> probs = {0.9, 0.8, 0.7, 0.2};
    const auto rep = challenge_score(labels, probs);
    CHECK(rep.theta == 0.8);
    CHECK(rep.tpr_at_theta == 1.0);
    CHECK(rep.fpr_at_theta == 0.0);
    CHECK(rep.challenge_score == 1.0);
    CHECK(rep.n_pos == 2);
    CHECK(rep.n_neg == 2);
}

TEST_CASE("challenge score: interleaved example caps the score at 0.5") {
    // Any threshold at or below 0.7 admits the 0.7 negative: FPR 1/2.
    const auto labels = to_outcomes({1, 1, 0, 0});
    const std::vector<double> probs = {0.9, 0.6, 0.7, 0.2};
    const auto rep = challenge_score(labels, probs);
    CHECK(rep.challenge_score == 0.5);
    CHECK(rep.theta == 0.9);
    CHECK(rep.fpr_at_theta == 0.0);
}

TEST_CASE("challenge score: perfect separation scores 1") {
    const auto labels = to_outcomes({0, 1, 0, 1, 1});
    const std::vector<double> probs = {0.1, 0.8, 0.3, 0.9, 0.75};
    CHECK(challenge_score(labels, probs).challenge_score == 1.0);
}

TEST_CASE("challenge score: matches exhaustive threshold search on 1000 random instances") {
    SplitMix64 gen(0xC0FFEE);
    std::vector<int> is_poor;
    std::vector<double> probs;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + gen.below(50);
        random_instance(gen, n, is_poor, probs);
        const auto rep = challenge_score(to_outcomes(is_poor), probs);
        const auto ref = oracles::brute_force_challenge(is_poor, probs);
        CHECK(rep.challenge_score == ref.tpr);
        CHECK(rep.theta == ref.theta);
        CHECK(rep.fpr_at_theta == ref.fpr);
        CHECK(rep.challenge_score == rep.tpr_at_theta);
    }
}

TEST_CASE("challenge score: admits at most floor(0.05 * n_neg) false positives") {
    SplitMix64 gen(31337);
    std::vector<int> is_poor;
    std::vector<double> probs;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 40 + gen.below(80);
        random_instance(gen, n, is_poor, probs);
        std::size_t n_neg = 0;
        for (int y : is_poor) n_neg += (y == 0);
        if (n_neg < 20) continue;
        const auto rep = challenge_score(to_outcomes(is_poor), probs);
        std::size_t fp = 0;
        for (std::size_t i = 0; i < probs.size(); ++i)
            if (!is_poor[i] && probs[i] >= rep.theta) ++fp;
        CHECK(fp <= std::size_t(0.05 * double(n_neg)));
        CHECK(rep.fpr_at_theta <= 0.05);
    }
}

TEST_CASE("challenge score: invariant under strictly increasing transforms") {
    SplitMix64 gen(777);
    std::vector<int> is_poor;
    std::vector<double> probs;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 5 + gen.below(40);
        random_instance(gen, n, is_poor, probs);
        const auto labels = to_outcomes(is_poor);
        std::vector<double> squared(n);
        for (std::size_t i = 0; i < n; ++i) squared[i] = probs[i] * probs[i];
        const auto a = challenge_score(labels, probs);
        const auto b = challenge_score(labels, squared);
        CHECK(a.challenge_score == b.challenge_score);
        CHECK(a.fpr_at_theta == b.fpr_at_theta);
        if (std::isinf(a.theta))
            CHECK(std::isinf(b.theta));
        else
            CHECK(b.theta == a.theta * a.theta);
    }
}

TEST_CASE("challenge score: degenerate single-class inputs") {
    SUBCASE("all Poor: the FPR constraint is vacuous, score 1 at the lowest value") {
        const auto rep = challenge_score(to_outcomes({1, 1, 1}), {0.9, 0.4, 0.6});
        CHECK(rep.challenge_score == 1.0);
        CHECK(rep.theta == 0.4);
        CHECK(rep.fpr_at_theta == 0.0);
        CHECK(rep.n_neg == 0);
    }
    SUBCASE("all Good: TPR is 0 everywhere, sentinel threshold returned") {
        const auto rep = challenge_score(to_outcomes({0, 0, 0}), {0.9, 0.4, 0.6});
        CHECK(rep.challenge_score == 0.0);
        CHECK(std::isinf(rep.theta));
        CHECK(rep.theta > 0.0);
        CHECK(rep.fpr_at_theta == 0.0);
        CHECK(rep.n_pos == 0);
    }
}

TEST_CASE("challenge score: ties between thresholds resolve to the highest") {
    // Thresholds 0.8 and 0.6 both give TPR 1/2 with FPR 0; 0.8 must win.
    const auto labels = to_outcomes({1, 1, 0});
    const std::vector<double> probs = {0.8, 0.3, 0.3};
    const auto rep = challenge_score(labels, probs);
    CHECK(rep.theta == 0.8);
    CHECK(rep.challenge_score == 0.5);
}

TEST_CASE("challenge score: input validation") {
    const auto labels = to_outcomes({1, 0});
    CHECK_THROWS_AS(challenge_score({}, {}), ArgumentError);
    CHECK_THROWS_AS(challenge_score(labels, {0.5}), ArgumentError);
    CHECK_THROWS_AS(challenge_score(labels, {0.5, 1.2}), ValidationError);
    CHECK_THROWS_AS(challenge_score(labels, {-0.1, 0.5}), ValidationError);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(challenge_score(labels, {nan, 0.5}), ValidationError);
    CHECK_NOTHROW(challenge_score(labels, {0.0, 1.0}));
}

TEST_CASE("roc/auc: perfect separation gives AUC 1") {
    const auto curve = roc_auc(to_outcomes({1, 1, 0, 0}), {0.9, 0.8, 0.3, 0.1});
    CHECK(curve.auc == 1.0);
}

TEST_CASE("roc/auc: all-equal probabilities give AUC one half") {
    const auto curve = roc_auc(to_outcomes({1, 0, 1, 0, 0}), {0.5, 0.5, 0.5, 0.5, 0.5});
    CHECK(curve.auc == 0.5);
    // Single finite threshold: curve is (0,0) -> (1,1).
    REQUIRE(curve.points.size() == 2);
    CHECK(curve.points[0].fpr == 0.0);
    CHECK(curve.points[0].tpr == 0.0);
    CHECK(curve.points[1].fpr == 1.0);
    CHECK(curve.points[1].tpr == 1.0);
}

TEST_CASE("roc/auc: rank statistic matches pairwise concordance on 100 random instances") {
    SplitMix64 gen(0xAB5E);
    std::vector<int> is_poor;
    std::vector<double> probs;
    int done = 0;
    while (done < 100) {
        const std::size_t n = 2 + gen.below(30);
        random_instance(gen, n, is_poor, probs);
        std::size_t n_pos = 0;
        for (int y : is_poor) n_pos += (y != 0);
        if (n_pos == 0 || n_pos == is_poor.size()) continue;
        ++done;
        const auto curve = roc_auc(to_outcomes(is_poor), probs);
        const double ref = oracles::pairwise_auc(is_poor, probs);
        CHECK(std::abs(curve.auc - ref) < 1e-12);
        // The rank statistic must also equal the trapezoidal area under
        // the returned curve.
        CHECK(std::abs(curve.auc - trapezoid_area(curve)) < 1e-12);
    }
}

TEST_CASE("roc/auc: curve is monotone from (0,0) to (1,1)") {
    SplitMix64 gen(99);
    std::vector<int> is_poor;
    std::vector<double> probs;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + gen.below(40);
        random_instance(gen, n, is_poor, probs);
        std::size_t n_pos = 0;
        for (int y : is_poor) n_pos += (y != 0);
        if (n_pos == 0 || n_pos == is_poor.size()) continue;
        const auto curve = roc_auc(to_outcomes(is_poor), probs);
        REQUIRE(curve.points.size() >= 2);
        CHECK(curve.points.front().fpr == 0.0);
        CHECK(curve.points.front().tpr == 0.0);
        CHECK(curve.points.back().fpr == 1.0);
        CHECK(curve.points.back().tpr == 1.0);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
            CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
        }
        CHECK(curve.auc >= 0.0);
        CHECK(curve.auc <= 1.0);
    }
}

TEST_CASE("roc/auc: reversing the scores complements the AUC") {
    const std::vector<int> is_poor = {1, 0, 1, 0, 1, 0, 0, 1};
    const std::vector<double> probs = {0.9, 0.6, 0.7, 0.65, 0.3, 0.2, 0.8, 0.55};
    std::vector<double> flipped;
    for (double p : probs) flipped.push_back(1.0 - p);
    const double a = roc_auc(to_outcomes(is_poor), probs).auc;
    const double b = roc_auc(to_outcomes(is_poor), flipped).auc;
    CHECK(std::abs(a + b - 1.0) < 1e-12);
}

TEST_CASE("roc/auc: single-class labels are rejected") {
    CHECK_THROWS_AS(roc_auc(to_outcomes({1, 1, 1}), {0.1, 0.2, 0.3}), ArgumentError);
    CHECK_THROWS_AS(roc_auc(to_outcomes({0, 0}), {0.1, 0.2}), ArgumentError);
}

TEST_CASE("threshold sweep: extreme thresholds") {
    const auto labels = to_outcomes({1, 1, 0, 0, 0});
    const std::vector<double> probs = {0.9, 0.4, 0.5, 0.2, 0.1};
    const auto rows = threshold_sweep(labels, probs, {0.0, 0.95});
    REQUIRE(rows.size() == 2);
    // theta 0: everyone predicted Poor.
    CHECK(rows[0].fnr == 0.0);
    CHECK(rows[0].fpr == 1.0);
    CHECK(rows[0].accuracy == 2.0 / 5.0);
    // theta above the maximum: nobody predicted Poor.
    CHECK(rows[1].fpr == 0.0);
    CHECK(rows[1].fnr == 1.0);
    CHECK(rows[1].accuracy == 3.0 / 5.0);
}

TEST_CASE("threshold sweep: matches a direct confusion-matrix oracle") {
    SplitMix64 gen(4242);
    std::vector<int> is_poor;
    std::vector<double> probs;
    random_instance(gen, 60, is_poor, probs);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(double(i) / 20.0);
    const auto rows = threshold_sweep(to_outcomes(is_poor), probs, grid);
    REQUIRE(rows.size() == grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            const bool pred = probs[i] >= grid[g];
            if (is_poor[i])
                (pred ? ++tp : ++fn);
            else
                (pred ? ++fp : ++tn);
        }
        CHECK(rows[g].theta == grid[g]);
        CHECK(rows[g].accuracy == double(tp + tn) / double(probs.size()));
        CHECK(rows[g].fpr == double(fp) / double(fp + tn));
        CHECK(rows[g].fnr == double(fn) / double(fn + tp));
    }
}

TEST_CASE("threshold sweep: empty grid is rejected") {
    CHECK_THROWS_AS(threshold_sweep(to_outcomes({1, 0}), {0.5, 0.5}, {}), ArgumentError);
}

TEST_CASE("stratified folds: balanced partition with class ratio within one") {
    SplitMix64 gen(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 23 + gen.below(200);
        std::vector<ingest::Outcome> labels;
        std::size_t n_pos = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const bool poor = gen.uniform01() < 0.52;
            labels.push_back(poor ? ingest::Outcome::Poor : ingest::Outcome::Good);
            n_pos += poor;
        }
        const std::size_t k = 5;
        if (n_pos < k || n - n_pos < k) continue;
        const auto fold = stratified_folds(labels, k, trial);
        REQUIRE(fold.size() == n);

        std::vector<std::size_t> total(k, 0), pos(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(fold[i] < k);
            ++total[fold[i]];
            pos[fold[i]] += (labels[i] == ingest::Outcome::Poor);
        }
        const auto [tmin, tmax] = std::minmax_element(total.begin(), total.end());
        CHECK(*tmax - *tmin <= 1);
        const auto [pmin, pmax] = std::minmax_element(pos.begin(), pos.end());
        CHECK(*pmax - *pmin <= 1);
        // Negatives inherit the same property.
        std::vector<std::size_t> neg(k);
        for (std::size_t f = 0; f < k; ++f) neg[f] = total[f] - pos[f];
        const auto [nmin, nmax] = std::minmax_element(neg.begin(), neg.end());
        CHECK(*nmax - *nmin <= 1);
    }
}

TEST_CASE("stratified folds: deterministic per seed, sensitive to the seed") {
    std::vector<ingest::Outcome> labels;
    for (int i = 0; i < 40; ++i)
        labels.push_back(i % 2 ? ingest::Outcome::Poor : ingest::Outcome::Good);
    const auto a = stratified_folds(labels, 5, 11);
    const auto b = stratified_folds(labels, 5, 11);
    const auto c = stratified_folds(labels, 5, 12);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("stratified folds: class counts below k are rejected") {
    std::vector<ingest::Outcome> labels(20, ingest::Outcome::Good);
    labels[0] = ingest::Outcome::Poor;
    labels[1] = ingest::Outcome::Poor;
    CHECK_THROWS_AS(stratified_folds(labels, 5, 0), ArgumentError);
    CHECK_THROWS_AS(stratified_folds(labels, 1, 0), ArgumentError);
}

TEST_CASE("mean and sample standard deviation") {
    double m = 0.0, s = 0.0;
    mean_sd({1.0, 2.0, 3.0, 4.0}, m, s);
    CHECK(m == 2.5);
    CHECK(std::abs(s - std::sqrt(5.0 / 3.0)) < 1e-15);
    mean_sd({7.0}, m, s);
    CHECK(m == 7.0);
    CHECK(s == 0.0);
    CHECK_THROWS_AS(mean_sd({}, m, s), ArgumentError);
}
