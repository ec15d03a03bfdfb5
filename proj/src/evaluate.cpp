#include "comapipe/evaluate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "comapipe/errors.hpp"
#include "comapipe/rng.hpp"
#include "comapipe/util.hpp"

namespace comapipe {

namespace {

void check_inputs(const std::vector<ingest::Outcome>& labels, const std::vector<double>& probs) {
    if (labels.empty()) throw ArgumentError("labels are empty");
    if (labels.size() != probs.size())
        throw ArgumentError("labels and probabilities differ in length");
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("probability outside [0,1]");
    }
}

// Unique predicted values sorted descending; the +inf sentinel (predict
// nobody) is handled by the callers' initial state.
std::vector<double> descending_thresholds(const std::vector<double>& probs) {
    std::vector<double> t = probs;
    std::sort(t.begin(), t.end(), std::greater<double>());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

} // namespace

ScoreReport challenge_score(const std::vector<ingest::Outcome>& labels,
                            const std::vector<double>& probs,
                            double fpr_max) {
    check_inputs(labels, probs);

    ScoreReport rep;
    for (ingest::Outcome o : labels) (o == ingest::Outcome::Poor ? ++rep.n_pos : ++rep.n_neg);

    // Sentinel threshold: nobody predicted Poor, TPR 0, FPR 0 — always
    // feasible, so the report is well-defined even when every finite
    // threshold violates the constraint.
    rep.theta = std::numeric_limits<double>::infinity();
    rep.tpr_at_theta = 0.0;
    rep.fpr_at_theta = 0.0;

    // Sweep thresholds downwards, accumulating predictions. TPR and FPR
    // are both non-decreasing along the sweep; updating only on a strict
    // TPR improvement therefore lands on the highest theta among ties.
    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });

    std::size_t tp = 0, fp = 0, at = 0;
    for (double theta : descending_thresholds(probs)) {
        while (at < order.size() && probs[order[at]] >= theta) {
            (labels[order[at]] == ingest::Outcome::Poor ? ++tp : ++fp);
            ++at;
        }
        const double tpr = rep.n_pos ? double(tp) / double(rep.n_pos) : 0.0;
        const double fpr = rep.n_neg ? double(fp) / double(rep.n_neg) : 0.0;
        if (fpr > fpr_max) continue;
        if (tpr > rep.tpr_at_theta) {
            rep.theta = theta;
            rep.tpr_at_theta = tpr;
            rep.fpr_at_theta = fpr;
        }
    }
    rep.challenge_score = rep.tpr_at_theta;
    return rep;
}

RocCurve roc_auc(const std::vector<ingest::Outcome>& labels, const std::vector<double>& probs) {
    check_inputs(labels, probs);

    std::size_t n_pos = 0, n_neg = 0;
    for (ingest::Outcome o : labels) (o == ingest::Outcome::Poor ? ++n_pos : ++n_neg);
    if (n_pos == 0 || n_neg == 0)
        throw ArgumentError("AUC is undefined with a single class");

    RocCurve curve;
    curve.points.push_back({0.0, 0.0}); // theta = +inf

    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });

    std::size_t tp = 0, fp = 0, at = 0;
    for (double theta : descending_thresholds(probs)) {
        while (at < order.size() && probs[order[at]] >= theta) {
            (labels[order[at]] == ingest::Outcome::Poor ? ++tp : ++fp);
            ++at;
        }
        curve.points.push_back({double(fp) / double(n_neg), double(tp) / double(n_pos)});
    }
    // The lowest threshold predicts everyone Poor, so the sweep always
    // ends exactly at (1,1); theta = -inf adds no further point.

    // Rank-statistic AUC with midranks for ties: the probability a random
    // Poor outranks a random Good, ties counted 1/2. Equals the
    // trapezoidal area under the points above.
    std::vector<double> sorted = probs;
    std::sort(sorted.begin(), sorted.end());
    double rank_sum_pos = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != ingest::Outcome::Poor) continue;
        const auto lo = std::lower_bound(sorted.begin(), sorted.end(), probs[i]);
        const auto hi = std::upper_bound(lo, sorted.end(), probs[i]);
        const double first = double(lo - sorted.begin()) + 1.0;
        const double last = double(hi - sorted.begin());
        rank_sum_pos += 0.5 * (first + last); // midrank
    }
    const double np = double(n_pos), nn = double(n_neg);
    curve.auc = (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
    return curve;
}

std::vector<SweepRow> threshold_sweep(const std::vector<ingest::Outcome>& labels,
                                      const std::vector<double>& probs,
                                      const std::vector<double>& grid) {
    check_inputs(labels, probs);
    if (grid.empty()) throw ArgumentError("threshold grid is empty");

    std::size_t n_pos = 0, n_neg = 0;
    for (ingest::Outcome o : labels) (o == ingest::Outcome::Poor ? ++n_pos : ++n_neg);

    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double theta : grid) {
        std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            const bool pred_poor = probs[i] >= theta;
            const bool is_poor = labels[i] == ingest::Outcome::Poor;
            if (pred_poor)
                (is_poor ? ++tp : ++fp);
            else
                (is_poor ? ++fn : ++tn);
        }
        SweepRow row;
        row.theta = theta;
        row.accuracy = double(tp + tn) / double(labels.size());
        row.fpr = n_neg ? double(fp) / double(n_neg) : 0.0;
        row.fnr = n_pos ? double(fn) / double(n_pos) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::size_t> stratified_folds(const std::vector<ingest::Outcome>& labels,
                                          std::size_t k,
                                          std::uint64_t seed) {
    if (k < 2) throw ArgumentError("need at least 2 folds");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] == ingest::Outcome::Poor ? pos : neg).push_back(i);
    if (pos.size() < k || neg.size() < k)
        throw ArgumentError("each class needs at least one member per fold");

    SplitMix64 gen(derive_seed(seed, "stratified-folds"));
    gen.shuffle(pos);
    gen.shuffle(neg);

    // Deal each class round-robin; the counter continues across classes so
    // total fold sizes stay within one of each other as well.
    std::vector<std::size_t> fold(labels.size(), 0);
    std::size_t counter = 0;
    for (std::size_t i : pos) fold[i] = counter++ % k;
    for (std::size_t i : neg) fold[i] = counter++ % k;
    return fold;
}

void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
    if (v.empty()) throw ArgumentError("mean of an empty list");
    double s = 0.0;
    for (double x : v) s += x;
    mean = s / double(v.size());
    if (v.size() < 2) {
        sd = 0.0;
        return;
    }
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / double(v.size() - 1));
}

CvResult cross_validate(const std::vector<ingest::PatientRecord>& records,
                        const models::ModelVariant& variant, const models::FitConfig& config,
                        std::size_t k, std::uint64_t seed, std::size_t jobs) {
    if (records.empty()) throw ArgumentError("no patients to cross-validate");

    // Sort by patient id so fold assignment (and every fit) sees a fixed
    // order regardless of how the caller enumerated the cohort.
    std::vector<const ingest::PatientRecord*> recs;
    recs.reserve(records.size());
    for (const auto& r : records) recs.push_back(&r);
    std::sort(recs.begin(), recs.end(), [](const auto* a, const auto* b) {
        return a->clinical.patient_id < b->clinical.patient_id;
    });
    for (std::size_t i = 1; i < recs.size(); ++i) {
        if (recs[i]->clinical.patient_id == recs[i - 1]->clinical.patient_id)
            throw ArgumentError("duplicate patient id: " + recs[i]->clinical.patient_id);
    }

    std::vector<ingest::Outcome> labels;
    labels.reserve(recs.size());
    for (const auto* r : recs) {
        if (!r->clinical.outcome)
            throw ArgumentError("patient without outcome: " + r->clinical.patient_id);
        labels.push_back(*r->clinical.outcome);
    }

    CvResult result;
    result.variant = models::to_string(variant.id);
    result.k = k;
    result.seed = seed;
    result.assignments = stratified_folds(labels, k, seed);
    for (const auto* r : recs) result.patient_ids.push_back(r->clinical.patient_id);

    // Split-independent signal products are shared across folds: the
    // kernel bank depends only on the master seed, and grids/kernel
    // features only on the preprocessing config.
    std::optional<rocket::KernelBank> bank;
    if (variant.uses_rocket)
        bank = rocket::generate_bank(derive_seed(seed, "rocket-bank"),
                                     models::canonical_channels().size(),
                                     config.rocket_series_len(), config.bank);
    std::vector<models::PatientSignalCache> caches(recs.size());
    parallel_for(recs.size(), jobs, [&](std::size_t i) {
        caches[i] = models::precompute_signals(*recs[i], config, variant.uses_embeddings,
                                               bank ? &*bank : nullptr);
    });

    std::vector<double> fold_scores, fold_aucs;
    for (std::size_t f = 0; f < k; ++f) {
        std::vector<const ingest::PatientRecord*> train;
        std::vector<const models::PatientSignalCache*> train_caches;
        std::vector<std::size_t> test_idx;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            if (result.assignments[i] == f) {
                test_idx.push_back(i);
            } else {
                train.push_back(recs[i]);
                train_caches.push_back(&caches[i]);
            }
        }
        const auto bundle = models::fit_cached(train, train_caches, variant, config, seed,
                                               bank ? &*bank : nullptr);

        std::vector<ingest::Outcome> test_y;
        std::vector<double> test_p;
        for (std::size_t i : test_idx) {
            test_y.push_back(labels[i]);
            test_p.push_back(models::predict_cached(bundle, recs[i]->clinical, caches[i]));
        }

        FoldReport fr;
        fr.score = challenge_score(test_y, test_p);
        fr.auc = roc_auc(test_y, test_p).auc;
        fr.n_train = train.size();
        fr.n_test = test_idx.size();
        result.folds.push_back(fr);
        fold_scores.push_back(fr.score.challenge_score);
        fold_aucs.push_back(fr.auc);
    }

    mean_sd(fold_scores, result.cv_score_mean, result.cv_score_sd);
    mean_sd(fold_aucs, result.cv_auc_mean, result.cv_auc_sd);
    return result;
}

std::string render_cv_json(const CvResult& r) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : r.folds) {
        // A +inf threshold (no feasible finite cut) renders as the string
        // "inf" since JSON has no infinity literal.
        nlohmann::json theta =
            std::isinf(f.score.theta) ? nlohmann::json("inf") : nlohmann::json(f.score.theta);
        folds.push_back({{"challenge_score", f.score.challenge_score},
                         {"theta", theta},
                         {"tpr_at_theta", f.score.tpr_at_theta},
                         {"fpr_at_theta", f.score.fpr_at_theta},
                         {"n_pos", f.score.n_pos},
                         {"n_neg", f.score.n_neg},
                         {"auc", f.auc},
                         {"n_train", f.n_train},
                         {"n_test", f.n_test}});
    }
    nlohmann::json j{{"variant", r.variant},
                     {"k", r.k},
                     {"seed", r.seed},
                     {"folds", folds},
                     {"patient_ids", r.patient_ids},
                     {"fold_assignments", r.assignments},
                     {"cv_score_mean", r.cv_score_mean},
                     {"cv_score_sd", r.cv_score_sd},
                     {"cv_auc_mean", r.cv_auc_mean},
                     {"cv_auc_sd", r.cv_auc_sd}};
    return j.dump(2) + "\n";
}

std::string render_roc_csv(const RocCurve& curve) {
    std::string out = "fpr,tpr\n";
    for (const auto& p : curve.points)
        out += format_double(p.fpr) + "," + format_double(p.tpr) + "\n";
    return out;
}

std::string render_sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "theta,accuracy,fpr,fnr\n";
    for (const auto& r : rows)
        out += format_double(r.theta) + "," + format_double(r.accuracy) + "," + format_double(r.fpr) + "," +
               format_double(r.fnr) + "\n";
    return out;
}

} // namespace comapipe
