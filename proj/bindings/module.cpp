// Python bindings: numpy-friendly wrappers over the signal chain, the two
// learners, the evaluation metrics and the cohort-level model family.
// Matrices cross the boundary as copies; nothing here keeps references to
// Python memory.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "comapipe/dsp.hpp"
#include "comapipe/errors.hpp"
#include "comapipe/evaluate.hpp"
#include "comapipe/ingest.hpp"
#include "comapipe/learners.hpp"
#include "comapipe/models.hpp"
#include "comapipe/rocket.hpp"
#include "comapipe/spectro.hpp"
#include "comapipe/synth.hpp"

namespace py = pybind11;
using namespace comapipe;

namespace {

using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const DArray& a) {
    if (a.ndim() != 1) throw ArgumentError("expected a 1-D array");
    const auto* p = a.data();
    return std::vector<double>(p, p + a.shape(0));
}

// Accepts [n_rows x n_cols]; 1-D input is promoted to a single row.
std::vector<std::vector<double>> to_matrix(const DArray& a) {
    if (a.ndim() == 1) return {to_vector(a)};
    if (a.ndim() != 2) throw ArgumentError("expected a 1-D or 2-D array");
    std::vector<std::vector<double>> m(std::size_t(a.shape(0)));
    const auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i) {
        m[std::size_t(i)].resize(std::size_t(a.shape(1)));
        for (py::ssize_t j = 0; j < a.shape(1); ++j) m[std::size_t(i)][std::size_t(j)] = r(i, j);
    }
    return m;
}

py::array_t<double> from_vector(const std::vector<double>& v) {
    py::array_t<double> a(py::ssize_t(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

py::array_t<double> from_matrix(const std::vector<std::vector<double>>& m) {
    const py::ssize_t rows = py::ssize_t(m.size());
    const py::ssize_t cols = m.empty() ? 0 : py::ssize_t(m.front().size());
    py::array_t<double> a({rows, cols});
    auto w = a.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < rows; ++i)
        for (py::ssize_t j = 0; j < cols; ++j) w(i, j) = m[std::size_t(i)][std::size_t(j)];
    return a;
}

ingest::EegSegment make_segment(const DArray& x, double fs) {
    ingest::EegSegment seg;
    seg.samples = to_matrix(x);
    seg.fs = fs;
    seg.channels.resize(seg.samples.size());
    for (std::size_t c = 0; c < seg.channels.size(); ++c)
        seg.channels[c] = "ch" + std::to_string(c);
    return seg;
}

// Returns with the input's dimensionality: 1-D stays 1-D.
py::object samples_like(const DArray& input, const ingest::EegSegment& seg) {
    if (input.ndim() == 1) return from_vector(seg.samples.front());
    return from_matrix(seg.samples);
}

std::vector<ingest::Outcome> to_outcomes(const std::vector<int>& y) {
    std::vector<ingest::Outcome> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        out[i] = y[i] ? ingest::Outcome::Poor : ingest::Outcome::Good;
    return out;
}

struct PyCohort {
    std::vector<ingest::PatientRecord> records;
};

struct PyModel {
    models::ModelBundle bundle;
};

models::ModelVariant variant_or_throw(const std::string& name) {
    const auto id = models::variant_from_name(name);
    if (!id) throw ArgumentError("unknown variant: " + name + " (expected M1..M6)");
    return models::make_variant(*id);
}

models::FitConfig make_fit_config(std::size_t embed_dim, std::size_t n_kernels,
                                  std::size_t n_trees, double window_s, double stride_s,
                                  double fs_target) {
    models::FitConfig cfg;
    cfg.embed_dim = embed_dim;
    cfg.bank.n_kernels = n_kernels;
    cfg.forest.n_trees = n_trees;
    cfg.window_s = window_s;
    cfg.stride_s = stride_s;
    cfg.fs_target = fs_target;
    return cfg;
}

py::dict score_dict(const ScoreReport& r) {
    py::dict d;
    d["score"] = r.challenge_score;
    d["theta"] = r.theta;
    d["tpr"] = r.tpr_at_theta;
    d["fpr"] = r.fpr_at_theta;
    d["n_pos"] = r.n_pos;
    d["n_neg"] = r.n_neg;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "EEG outcome-prediction pipeline: filtering, spectral features, "
              "random-kernel transforms, ridge/forest learners and fused model variants.";
    m.attr("__version__") = "0.1.0";

    py::register_exception<comapipe::Error>(m, "Error");

    // ------------------------------------------------------------ signal ops
    m.def(
        "filter_eeg",
        [](const DArray& x, double fs, double band_low, double band_high,
           const std::vector<double>& notch_freqs, int order, double notch_q) {
            dsp::FilterSpec spec;
            spec.band_low = band_low;
            spec.band_high = band_high;
            spec.notch_freqs = notch_freqs;
            spec.order = order;
            spec.notch_q = notch_q;
            const auto seg = make_segment(x, fs);
            return samples_like(x, dsp::bandpass_notch(seg, spec));
        },
        py::arg("x"), py::arg("fs"), py::arg("band_low") = 0.5, py::arg("band_high") = 30.0,
        py::arg("notch_freqs") = std::vector<double>{50.0, 60.0}, py::arg("order") = 4,
        py::arg("notch_q") = 30.0,
        "Zero-phase band-pass + notch filtering; rows are channels.");

    m.def(
        "resample",
        [](const DArray& x, double fs, double fs_target) {
            return samples_like(x, dsp::resample(make_segment(x, fs), fs_target));
        },
        py::arg("x"), py::arg("fs"), py::arg("fs_target"),
        "Kaiser-windowed sinc resampling to fs_target.");

    m.def(
        "select_cleanest",
        [](const DArray& x, double fs, double window_s, double stride_s) {
            const auto [win, score] = dsp::select_cleanest(make_segment(x, fs), window_s, stride_s);
            py::dict d;
            d["start_s"] = double(score.window_start) / fs;
            d["clip_frac"] = score.clip_frac;
            d["flat_frac"] = score.flat_frac;
            d["amplitude_penalty"] = score.amplitude_penalty;
            d["total"] = score.total;
            return py::make_tuple(samples_like(x, win), d);
        },
        py::arg("x"), py::arg("fs"), py::arg("window_s"), py::arg("stride_s"),
        "Least-artifact window on the stride grid, with its score breakdown.");

    m.def(
        "spectrogram",
        [](const DArray& x, double fs, std::size_t frame, std::size_t hop, std::size_t n_mel,
           double fmin, double fmax, double floor_db) {
            spectro::StftParams p{frame, hop, n_mel, fmin, fmax, floor_db};
            const auto spec = spectro::spectrogram(to_vector(x), fs, p);
            py::dict d;
            d["values"] = from_matrix(spec.values);
            d["band_centers"] = from_vector(spec.band_centers);
            d["frame_times"] = from_vector(spec.frame_times);
            d["zero_energy"] = spec.zero_energy;
            d["floor_db"] = spec.floor_db;
            return d;
        },
        py::arg("x"), py::arg("fs"), py::arg("frame") = 256, py::arg("hop") = 64,
        py::arg("n_mel") = 64, py::arg("fmin") = 0.5, py::arg("fmax") = 30.0,
        py::arg("floor_db") = -80.0,
        "Mel power spectrogram in dB relative to the peak bin.");

    // -------------------------------------------------------- kernel features
    py::class_<rocket::KernelBank>(m, "KernelBank",
                                   "Seeded random convolution kernel bank; regeneration from "
                                   "the same seed is bit-identical.")
        .def(py::init([](std::uint64_t seed, std::size_t n_channels, std::size_t series_len,
                         std::size_t n_kernels, int features_per_kernel, int dilation_cap) {
                 rocket::BankConfig cfg{n_kernels, features_per_kernel, dilation_cap};
                 return rocket::generate_bank(seed, n_channels, series_len, cfg);
             }),
             py::arg("seed"), py::arg("n_channels"), py::arg("series_len"),
             py::arg("n_kernels") = 10000, py::arg("features_per_kernel") = 2,
             py::arg("dilation_cap") = 32)
        .def_property_readonly("feature_dim", &rocket::KernelBank::feature_dim)
        .def_property_readonly("n_kernels",
                               [](const rocket::KernelBank& b) { return b.kernels.size(); })
        .def_readonly("seed", &rocket::KernelBank::seed)
        .def(
            "transform",
            [](const rocket::KernelBank& b, const DArray& series) {
                return from_vector(rocket::transform(to_matrix(series), b));
            },
            py::arg("series"), "Pooled kernel features of a [n_channels x n_samples] series.")
        .def("feature_names", [](const rocket::KernelBank& b) { return rocket::feature_names(b); })
        .def(
            "save",
            [](const rocket::KernelBank& b, const std::string& path, bool with_weights) {
                rocket::save_bank(path, b, with_weights);
            },
            py::arg("path"), py::arg("with_weights") = false)
        .def_static("load", [](const std::string& path) { return rocket::load_bank(path); },
                    py::arg("path"));

    // ---------------------------------------------------------------- learners
    py::class_<learners::RidgeModel>(m, "RidgeModel",
                                     "Linear head with closed-form LOOCV alpha selection; "
                                     "positive decision values mean Poor.")
        .def_readonly("alpha_chosen", &learners::RidgeModel::alpha_chosen)
        .def_readonly("alpha_grid", &learners::RidgeModel::alpha_grid)
        .def_readonly("loocv_errors", &learners::RidgeModel::loocv_errors)
        .def_readonly("weights", &learners::RidgeModel::weights)
        .def_readonly("intercept", &learners::RidgeModel::intercept)
        .def(
            "decision",
            [](const learners::RidgeModel& model, const DArray& x) {
                if (x.ndim() == 1) return py::cast(learners::ridge_decision(model, to_vector(x)));
                const auto rows = to_matrix(x);
                std::vector<double> out(rows.size());
                for (std::size_t i = 0; i < rows.size(); ++i)
                    out[i] = learners::ridge_decision(model, rows[i]);
                return py::object(from_vector(out));
            },
            py::arg("x"), "Decision value(s); accepts one row or a matrix.");

    m.def(
        "ridge_fit",
        [](const DArray& X, const std::vector<int>& y) {
            return learners::ridge_fit(to_matrix(X), to_outcomes(y));
        },
        py::arg("X"), py::arg("y"),
        "Ridge fit over the 10-alpha log grid; y holds 1 for Poor, 0 for Good.");
    m.def(
        "ridge_fit_fixed",
        [](const DArray& X, const std::vector<int>& y, double alpha) {
            return learners::ridge_fit_fixed(to_matrix(X), to_outcomes(y), alpha);
        },
        py::arg("X"), py::arg("y"), py::arg("alpha"));

    py::class_<learners::ForestModel>(m, "ForestModel",
                                      "Bagged Gini-split trees with normalized importances.")
        .def_property_readonly("importances",
                               [](const learners::ForestModel& f) { return from_vector(f.importances); })
        .def_property_readonly("n_trees",
                               [](const learners::ForestModel& f) { return f.trees.size(); })
        .def(
            "predict_proba",
            [](const learners::ForestModel& model, const DArray& x) {
                if (x.ndim() == 1)
                    return py::cast(learners::forest_predict_proba(model, to_vector(x)));
                const auto rows = to_matrix(x);
                std::vector<double> out(rows.size());
                for (std::size_t i = 0; i < rows.size(); ++i)
                    out[i] = learners::forest_predict_proba(model, rows[i]);
                return py::object(from_vector(out));
            },
            py::arg("x"), "Poor probability per row.");

    m.def(
        "forest_fit",
        [](const DArray& X, const std::vector<int>& y, std::size_t n_trees, std::size_t mtry,
           std::size_t min_leaf, std::uint64_t seed) {
            learners::ForestConfig cfg{n_trees, mtry, min_leaf, seed};
            return learners::forest_fit(to_matrix(X), to_outcomes(y), cfg);
        },
        py::arg("X"), py::arg("y"), py::arg("n_trees") = 300, py::arg("mtry") = 0,
        py::arg("min_leaf") = 1, py::arg("seed") = 0);

    // ---------------------------------------------------------------- metrics
    m.def(
        "challenge_score",
        [](const std::vector<int>& y, const std::vector<double>& probs, double fpr_max) {
            return score_dict(challenge_score(to_outcomes(y), probs, fpr_max));
        },
        py::arg("y"), py::arg("probs"), py::arg("fpr_max") = 0.05,
        "Max TPR subject to FPR <= fpr_max, with the chosen threshold.");

    m.def(
        "roc_auc",
        [](const std::vector<int>& y, const std::vector<double>& probs) {
            const auto curve = roc_auc(to_outcomes(y), probs);
            std::vector<double> fpr, tpr;
            for (const auto& p : curve.points) {
                fpr.push_back(p.fpr);
                tpr.push_back(p.tpr);
            }
            py::dict d;
            d["auc"] = curve.auc;
            d["fpr"] = from_vector(fpr);
            d["tpr"] = from_vector(tpr);
            return d;
        },
        py::arg("y"), py::arg("probs"), "ROC curve and rank-statistic AUC (ties at 1/2).");

    m.def(
        "stratified_folds",
        [](const std::vector<int>& y, std::size_t k, std::uint64_t seed) {
            return stratified_folds(to_outcomes(y), k, seed);
        },
        py::arg("y"), py::arg("k"), py::arg("seed") = 0,
        "Per-label fold index in [0, k), class-balanced.");

    // ----------------------------------------------------------- cohort level
    py::class_<PyCohort>(m, "Cohort", "An ordered set of patient records (clinical + EEG).")
        .def("__len__", [](const PyCohort& c) { return c.records.size(); })
        .def("patient_ids",
             [](const PyCohort& c) {
                 std::vector<std::string> ids;
                 for (const auto& r : c.records) ids.push_back(r.clinical.patient_id);
                 return ids;
             })
        .def("outcomes", [](const PyCohort& c) {
            py::list out;
            for (const auto& r : c.records) {
                if (!r.clinical.outcome)
                    out.append(py::none());
                else
                    out.append(*r.clinical.outcome == ingest::Outcome::Poor ? 1 : 0);
            }
            return out;
        });

    m.def(
        "load_cohort",
        [](const std::string& data_root) {
            return PyCohort{ingest::load_cohort(data_root)};
        },
        py::arg("data_root"),
        "Load every patient directory (clinical.txt + *.sig) under data_root.");

    m.def(
        "generate_cohort",
        [](std::size_t n, std::uint64_t seed, double effect_size, int hours_per_patient,
           double hour_duration_s, double fs, const std::optional<std::string>& out_dir) {
            synth::SynthParams p;
            p.n_patients = n;
            p.seed = seed;
            p.effect_size = effect_size;
            p.hours_per_patient = hours_per_patient;
            p.hour_duration_s = hour_duration_s;
            p.fs = fs;
            PyCohort c{synth::generate_cohort(p)};
            if (out_dir) synth::write_cohort(*out_dir, c.records, p);
            return c;
        },
        py::arg("n") = 200, py::arg("seed") = 0, py::arg("effect_size") = 1.0,
        py::arg("hours_per_patient") = 2, py::arg("hour_duration_s") = 30.0,
        py::arg("fs") = 128.0, py::arg("out_dir") = py::none(),
        "Synthetic benchmark cohort; optionally also written to out_dir.");

    m.def(
        "summarize_cohort",
        [](const PyCohort& c) { return ingest::render_summary(ingest::summarize_cohort(c.records)); },
        py::arg("cohort"), "Fixed-width clinical summary table.");

    py::class_<PyModel>(m, "Model", "A fitted variant bundle; self-contained for inference.")
        .def_property_readonly("variant",
                               [](const PyModel& mm) { return std::string(models::to_string(mm.bundle.variant.id)); })
        .def_property_readonly("seed", [](const PyModel& mm) { return mm.bundle.seed; })
        .def_property_readonly(
            "feature_names",
            [](const PyModel& mm) {
                return models::variant_feature_names(mm.bundle.variant, mm.bundle.config);
            })
        .def_property_readonly(
            "importances",
            [](const PyModel& mm) { return from_vector(mm.bundle.forest.importances); })
        .def(
            "predict",
            [](const PyModel& mm, const PyCohort& c) {
                std::vector<double> probs(c.records.size());
                for (std::size_t i = 0; i < c.records.size(); ++i)
                    probs[i] = models::predict(mm.bundle, c.records[i]);
                return from_vector(probs);
            },
            py::arg("cohort"), "Poor probability per patient, cohort order.")
        .def(
            "save", [](const PyModel& mm, const std::string& path) { models::save_bundle(path, mm.bundle); },
            py::arg("path"))
        .def_static("load",
                    [](const std::string& path) { return PyModel{models::load_bundle(path)}; },
                    py::arg("path"));

    m.def(
        "fit",
        [](const PyCohort& cohort, const std::string& variant, std::uint64_t seed,
           std::size_t embed_dim, std::size_t n_kernels, std::size_t n_trees, double window_s,
           double stride_s, double fs_target) {
            const auto cfg =
                make_fit_config(embed_dim, n_kernels, n_trees, window_s, stride_s, fs_target);
            return PyModel{models::fit_variant(cohort.records, variant_or_throw(variant), cfg, seed)};
        },
        py::arg("cohort"), py::arg("variant") = "M1", py::arg("seed") = 0,
        py::arg("embed_dim") = 64, py::arg("n_kernels") = 10000, py::arg("n_trees") = 300,
        py::arg("window_s") = 300.0, py::arg("stride_s") = 10.0, py::arg("fs_target") = 128.0,
        "Fit one model variant on a labeled cohort.");

    m.def(
        "cross_validate",
        [](const PyCohort& cohort, const std::string& variant, std::size_t k, std::uint64_t seed,
           std::size_t jobs, std::size_t embed_dim, std::size_t n_kernels, std::size_t n_trees,
           double window_s, double stride_s, double fs_target) {
            const auto cfg =
                make_fit_config(embed_dim, n_kernels, n_trees, window_s, stride_s, fs_target);
            const auto result =
                cross_validate(cohort.records, variant_or_throw(variant), cfg, k, seed, jobs);
            return py::module_::import("json").attr("loads")(render_cv_json(result));
        },
        py::arg("cohort"), py::arg("variant") = "M1", py::arg("k") = 5, py::arg("seed") = 0,
        py::arg("jobs") = 1, py::arg("embed_dim") = 64, py::arg("n_kernels") = 10000,
        py::arg("n_trees") = 300, py::arg("window_s") = 300.0, py::arg("stride_s") = 10.0,
        py::arg("fs_target") = 128.0,
        "Stratified k-fold cross-validation; returns the result report as a dict.");
}
