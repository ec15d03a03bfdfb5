#pragma once

// Test-only oracles, independent of the library implementation paths they
// verify. Everything here is direct/brute-force on purpose.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracles {

// Single-frequency DFT amplitude: |(2/n) * sum x[k] exp(-2*pi*i*f*k/fs)|.
// For a pure sine of amplitude A at frequency f (on-bin), returns ~A.
inline double dft_amplitude(const std::vector<double>& x, double f, double fs) {
    const double w = -2.0 * 3.141592653589793238462643383279 * f / fs;
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double ph = w * static_cast<double>(k);
        acc += x[k] * std::complex<double>(std::cos(ph), std::sin(ph));
    }
    return 2.0 * std::abs(acc) / static_cast<double>(x.size());
}

inline double rms(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

// Exhaustive Challenge-score search: all thresholds drawn from the
// predictions plus one sentinel above the maximum; predict positive when
// prob >= theta; among thresholds with FPR <= fpr_max pick max TPR,
// ties to the highest theta.
struct BruteScore {
    double theta = std::numeric_limits<double>::infinity();
    double tpr = 0.0;
    double fpr = 0.0;
};

inline BruteScore brute_force_challenge(const std::vector<int>& is_poor,
                                        const std::vector<double>& probs,
                                        double fpr_max = 0.05) {
    std::size_t n_pos = 0, n_neg = 0;
    for (int y : is_poor) (y ? ++n_pos : ++n_neg);

    std::vector<double> thresholds = probs;
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds.push_back(std::numeric_limits<double>::infinity());

    BruteScore best; // sentinel: zero predictions, TPR 0, FPR 0
    for (double theta : thresholds) {
        std::size_t tp = 0, fp = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] >= theta) (is_poor[i] ? ++tp : ++fp);
        }
        const double tpr = n_pos ? static_cast<double>(tp) / static_cast<double>(n_pos) : 0.0;
        const double fpr = n_neg ? static_cast<double>(fp) / static_cast<double>(n_neg) : 0.0;
        if (fpr > fpr_max) continue;
        if (tpr > best.tpr || (tpr == best.tpr && theta > best.theta)) {
            best.theta = theta;
            best.tpr = tpr;
            best.fpr = fpr;
        }
    }
    return best;
}

// O(n^2) pairwise-concordance AUC with ties counted 1/2.
inline double pairwise_auc(const std::vector<int>& is_poor, const std::vector<double>& probs) {
    double concordant = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!is_poor[i]) continue;
        for (std::size_t j = 0; j < probs.size(); ++j) {
            if (is_poor[j]) continue;
            ++pairs;
            if (probs[i] > probs[j]) concordant += 1.0;
            else if (probs[i] == probs[j]) concordant += 0.5;
        }
    }
    return concordant / static_cast<double>(pairs);
}

} // namespace oracles
