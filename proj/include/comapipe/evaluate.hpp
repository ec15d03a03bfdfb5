#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "comapipe/ingest.hpp"
#include "comapipe/models.hpp"

namespace comapipe {

// Result of the constrained-threshold score: the maximum true positive
// rate (Poor = positive) over candidate thresholds whose false positive
// rate stays at or below fpr_max. Candidate thresholds are the unique
// predicted values plus a +infinity sentinel (predict nobody). When no
// finite threshold is feasible the sentinel wins: theta = +inf, score 0.
struct ScoreReport {
    double challenge_score = 0.0; // == tpr_at_theta
    double theta = 0.0;
    double tpr_at_theta = 0.0;
    double fpr_at_theta = 0.0;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

// ROC points ordered from theta=+inf (0,0) down to theta=-inf (1,1);
// both coordinates are monotone non-decreasing along the curve.
struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

struct SweepRow {
    double theta = 0.0;
    double accuracy = 0.0;
    double fpr = 0.0;
    double fnr = 0.0;
};

// Decision rule everywhere in this module: predict Poor iff prob >= theta.
//
// challenge_score: max TPR subject to FPR <= fpr_max; ties resolved to the
// highest feasible theta. With no negatives the FPR is defined as 0 for
// every threshold (the constraint is vacuous); with no positives the TPR
// is 0 and the sentinel is returned.
// Throws ArgumentError (empty or mismatched inputs) and ValidationError
// (probability outside [0,1]).
ScoreReport challenge_score(const std::vector<ingest::Outcome>& labels,
                            const std::vector<double>& probs,
                            double fpr_max = 0.05);

// ROC curve by threshold sweep over unique predicted values plus AUC via
// the rank statistic (ties counted 1/2), which equals the trapezoidal
// area under the constructed curve. Throws ArgumentError when only one
// class is present (AUC undefined), plus the challenge_score errors.
RocCurve roc_auc(const std::vector<ingest::Outcome>& labels, const std::vector<double>& probs);

// One row per requested theta, in grid order: accuracy, FPR and FNR of
// the Poor label. Empty grid is an ArgumentError; with no negatives FPR
// is 0, with no positives FNR is 0.
std::vector<SweepRow> threshold_sweep(const std::vector<ingest::Outcome>& labels,
                                      const std::vector<double>& probs,
                                      const std::vector<double>& grid);

// Stratified fold assignment: returns a fold index in [0, k) per label.
// Each class is shuffled with a seed-derived generator and dealt
// round-robin, the deal counter continuing across classes, so per-class
// counts and total fold sizes both differ by at most one. Requires
// 2 <= k <= n and at least one member of each class per fold's worth,
// i.e. both class counts >= k.
std::vector<std::size_t> stratified_folds(const std::vector<ingest::Outcome>& labels,
                                          std::size_t k,
                                          std::uint64_t seed);

struct FoldReport {
    ScoreReport score;
    double auc = 0.0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
};

struct CvResult {
    std::string variant;
    std::vector<FoldReport> folds;
    // fold index per patient, aligned with patient ids sorted ascending
    std::vector<std::string> patient_ids;
    std::vector<std::size_t> assignments;
    double cv_score_mean = 0.0;
    double cv_score_sd = 0.0;
    double cv_auc_mean = 0.0;
    double cv_auc_sd = 0.0;
    std::size_t k = 0;
    std::uint64_t seed = 0;
};

// Stratified k-fold cross-validation of one model variant. Patients are
// sorted by id before fold assignment, so the result is invariant to
// input order; every fold's imputation stats and sub-models are fit on
// that fold's training patients only, with the same master seed. Signal
// products that do not depend on the split (grid summaries, kernel
// features, the kernel bank itself) are computed once and shared across
// folds. Requires every patient to carry an outcome, unique patient ids,
// and at least k patients per class.
// jobs > 1 threads the per-patient signal precompute; the result is
// identical regardless of the worker count.
CvResult cross_validate(const std::vector<ingest::PatientRecord>& records,
                        const models::ModelVariant& variant, const models::FitConfig& config,
                        std::size_t k, std::uint64_t seed, std::size_t jobs = 1);

// Mean and sample standard deviation (n-1 denominator) of v.
// v must be non-empty; sd is 0 for a single element.
void mean_sd(const std::vector<double>& v, double& mean, double& sd);

// Canonical renderings for result artifacts. The JSON is byte-stable for
// identical results; CSV numbers use shortest round-trip formatting.
std::string render_cv_json(const CvResult& result);
std::string render_roc_csv(const RocCurve& curve);
std::string render_sweep_csv(const std::vector<SweepRow>& rows);

} // namespace comapipe
