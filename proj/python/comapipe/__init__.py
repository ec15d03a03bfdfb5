"""EEG outcome-prediction pipeline.

Thin Python surface over the C++ core: zero-phase filtering and artifact
windowing, dB-re-peak mel spectrograms, seeded random-kernel features,
ridge/forest learners, the constrained-TPR score, and the M1..M6 fused
model family over patient cohorts.
"""

from comapipe._core import (
    Cohort,
    Error,
    ForestModel,
    KernelBank,
    Model,
    RidgeModel,
    __version__,
    challenge_score,
    cross_validate,
    filter_eeg,
    fit,
    forest_fit,
    generate_cohort,
    load_cohort,
    resample,
    ridge_fit,
    ridge_fit_fixed,
    roc_auc,
    select_cleanest,
    spectrogram,
    stratified_folds,
    summarize_cohort,
)

__all__ = [
    "Cohort",
    "Error",
    "ForestModel",
    "KernelBank",
    "Model",
    "RidgeModel",
    "__version__",
    "challenge_score",
    "cross_validate",
    "filter_eeg",
    "fit",
    "forest_fit",
    "generate_cohort",
    "load_cohort",
    "resample",
    "ridge_fit",
    "ridge_fit_fixed",
    "roc_auc",
    "select_cleanest",
    "spectrogram",
    "stratified_folds",
    "summarize_cohort",
]
