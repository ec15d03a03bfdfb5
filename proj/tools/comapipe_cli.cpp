#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "comapipe/config.hpp"
#include "comapipe/dsp.hpp"
#include "comapipe/errors.hpp"
#include "comapipe/evaluate.hpp"
#include "comapipe/features.hpp"
#include "comapipe/ingest.hpp"
#include "comapipe/models.hpp"
#include "comapipe/svg.hpp"
#include "comapipe/synth.hpp"
#include "comapipe/util.hpp"

namespace fs = std::filesystem;
using namespace comapipe;

namespace {

// Exit codes: 0 success, 2 usage/config, 3 data/validation, 4 internal.
int fail(int code, const char* kind, const std::string& message) {
    nlohmann::json j{{"error", kind}, {"message", message}};
    std::fprintf(stderr, "%s\n", j.dump().c_str());
    return code;
}

// Flag values that were actually given on the command line; they override
// the config file, which overrides compiled defaults.
struct Overrides {
    std::optional<std::string> data, output, variant;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs, k_folds;

    void apply(config::PipelineConfig& cfg) const {
        if (data) cfg.data_root = *data;
        if (output) cfg.output_dir = *output;
        if (variant) cfg.variant = *variant;
        if (seed) cfg.seed = *seed;
        if (jobs) {
            if (*jobs == 0) throw ArgumentError("--jobs must be at least 1");
            cfg.jobs = *jobs;
        }
        if (k_folds) cfg.k_folds = *k_folds;
    }
};

// Registers the flags shared by every data-processing subcommand.
void add_common(CLI::App* cmd, std::string& config_file, Overrides& ov) {
    cmd->add_option("--config", config_file, "Config file (flat TOML-style)");
    cmd->add_option_function<std::string>(
        "--data", [&ov](const std::string& v) { ov.data = v; },
        "Data root (default: $COMAPIPE_DATA)");
    cmd->add_option_function<std::string>(
        "--output", [&ov](const std::string& v) { ov.output = v; }, "Output directory");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&ov](std::uint64_t v) { ov.seed = v; }, "Master seed");
    cmd->add_option_function<std::size_t>(
        "--jobs", [&ov](std::size_t v) { ov.jobs = v; }, "Worker thread cap");
}

config::PipelineConfig effective_config(const std::string& config_file, const Overrides& ov) {
    config::PipelineConfig cfg;
    if (!config_file.empty()) cfg = config::parse_config(read_file(config_file));
    ov.apply(cfg);
    return cfg;
}

std::string resolve_data_root(const config::PipelineConfig& cfg) {
    if (!cfg.data_root.empty()) return cfg.data_root;
    const char* env = std::getenv("COMAPIPE_DATA");
    if (env && *env) return env;
    throw ArgumentError(
        "no data root: pass --data, set COMAPIPE_DATA, or set run.data_root in the config");
}

models::ModelVariant resolve_variant(const std::string& name) {
    const auto id = models::variant_from_name(name);
    if (!id) throw ArgumentError("unknown variant: " + name + " (expected M1..M6)");
    return models::make_variant(*id);
}

// Reproducibility manifest: the full effective config (it embeds the seed
// and variant) next to every artifact a command writes.
void archive_config(const config::PipelineConfig& cfg, const std::string& command) {
    fs::create_directories(cfg.output_dir);
    write_file_atomic((fs::path(cfg.output_dir) / (command + "_config.txt")).string(),
                      config::render_config(cfg));
}

std::vector<ingest::PatientRecord> load_labeled(const std::string& data_root) {
    auto cohort = ingest::load_cohort(data_root);
    if (cohort.empty()) throw DataError("no patients under data root: " + data_root);
    return cohort;
}

std::string outcome_text(const std::optional<ingest::Outcome>& o) {
    return o ? ingest::to_string(*o) : "";
}

// ---- subcommand bodies ----------------------------------------------------

int cmd_ingest_check(const config::PipelineConfig& cfg) {
    const auto cohort = ingest::load_cohort(resolve_data_root(cfg));
    if (cohort.empty()) throw DataError("no patients under data root: " + cfg.data_root);
    std::size_t n_segments = 0;
    for (const auto& rec : cohort) {
        rec.clinical.validate();
        for (const auto& seg : rec.segments) seg.validate();
        n_segments += rec.segments.size();
    }
    std::fputs(ingest::render_summary(ingest::summarize_cohort(cohort)).c_str(), stdout);
    std::printf("EEG segments: %zu\n", n_segments);
    return 0;
}

int cmd_synth(const config::PipelineConfig& cfg) {
    synth::SynthParams p = cfg.synth;
    p.seed = cfg.seed;
    const auto cohort = synth::generate_cohort(p);
    synth::write_cohort(cfg.output_dir, cohort, p);
    std::printf("wrote %zu patients to %s\n", cohort.size(), cfg.output_dir.c_str());
    return 0;
}

int cmd_train(const config::PipelineConfig& cfg) {
    const auto variant = resolve_variant(cfg.variant);
    const auto cohort = load_labeled(resolve_data_root(cfg));
    const auto bundle = models::fit_variant(cohort, variant, cfg.fit, cfg.seed);

    archive_config(cfg, "train");
    const auto path = fs::path(cfg.output_dir) / models::bundle_filename(variant, cfg.seed);
    models::save_bundle(path.string(), bundle);

    // Importances in bundle feature order; the report sorts for display.
    const auto names = models::variant_feature_names(variant, cfg.fit);
    std::string csv = "feature,importance\n";
    for (std::size_t i = 0; i < names.size(); ++i)
        csv += names[i] + "," + format_double(bundle.forest.importances[i]) + "\n";
    write_file_atomic((fs::path(cfg.output_dir) / "feature_importances.csv").string(), csv);

    std::printf("trained %s on %zu patients (%zu features) -> %s\n", cfg.variant.c_str(),
                cohort.size(), names.size(), path.string().c_str());
    return 0;
}

int cmd_featurize(const config::PipelineConfig& cfg) {
    const auto variant = resolve_variant(cfg.variant);
    const auto cohort = load_labeled(resolve_data_root(cfg));
    const auto bundle = models::fit_variant(cohort, variant, cfg.fit, cfg.seed);

    std::vector<models::PatientFeatureRow> rows(cohort.size());
    parallel_for(cohort.size(), cfg.jobs,
                 [&](std::size_t i) { rows[i] = models::build_features(cohort[i], bundle); });

    std::string csv = "patient_id";
    for (const auto& name : rows[0].names) csv += "," + name;
    csv += ",outcome\n";
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        csv += cohort[i].clinical.patient_id;
        for (double v : rows[i].values) csv += "," + format_double(v);
        csv += "," + outcome_text(cohort[i].clinical.outcome) + "\n";
    }

    archive_config(cfg, "featurize");
    const auto path = fs::path(cfg.output_dir) / ("features_" + cfg.variant + ".csv");
    write_file_atomic(path.string(), csv);
    std::printf("wrote %zu rows x %zu features -> %s\n", cohort.size(), rows[0].names.size(),
                path.string().c_str());
    return 0;
}

int cmd_cv(const config::PipelineConfig& cfg) {
    const auto variant = resolve_variant(cfg.variant);
    const auto cohort = load_labeled(resolve_data_root(cfg));
    const auto result = cross_validate(cohort, variant, cfg.fit, cfg.k_folds, cfg.seed, cfg.jobs);
    const auto json = render_cv_json(result);
    std::fputs(json.c_str(), stdout);
    archive_config(cfg, "cv");
    const auto path = fs::path(cfg.output_dir) /
                      ("cv_" + cfg.variant + "_" + std::to_string(cfg.seed) + ".json");
    write_file_atomic(path.string(), json);
    return 0;
}

int cmd_predict(const config::PipelineConfig& cfg, const std::string& bundle_path, double theta) {
    const auto bundle = models::load_bundle(bundle_path);
    const auto cohort = ingest::load_cohort(resolve_data_root(cfg));
    if (cohort.empty()) throw DataError("no patients under data root: " + cfg.data_root);

    std::vector<double> probs(cohort.size());
    parallel_for(cohort.size(), cfg.jobs,
                 [&](std::size_t i) { probs[i] = models::predict(bundle, cohort[i]); });

    std::string csv = "patient_id,probability_poor,predicted_label_at_threshold\n";
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        csv += cohort[i].clinical.patient_id + "," + format_double(probs[i]) + "," +
               (probs[i] >= theta ? "Poor" : "Good") + "\n";
    }

    archive_config(cfg, "predict");
    const auto path = fs::path(cfg.output_dir) / "predictions.csv";
    write_file_atomic(path.string(), csv);
    std::printf("wrote %zu predictions -> %s\n", cohort.size(), path.string().c_str());
    return 0;
}

int cmd_report(const config::PipelineConfig& cfg, const std::string& bundle_path) {
    const auto bundle = models::load_bundle(bundle_path);
    const auto cohort = load_labeled(resolve_data_root(cfg));

    std::vector<ingest::Outcome> labels;
    for (const auto& rec : cohort) {
        if (!rec.clinical.outcome)
            throw DataError("report needs outcomes; patient without one: " +
                            rec.clinical.patient_id);
        labels.push_back(*rec.clinical.outcome);
    }
    std::vector<double> probs(cohort.size());
    parallel_for(cohort.size(), cfg.jobs,
                 [&](std::size_t i) { probs[i] = models::predict(bundle, cohort[i]); });

    archive_config(cfg, "report");
    const fs::path out(cfg.output_dir);

    // Challenge score + ROC; CSV first, SVG from the same in-memory curve.
    const auto score = challenge_score(labels, probs, cfg.fpr_max);
    const auto curve = roc_auc(labels, probs);
    write_file_atomic((out / "roc.csv").string(), render_roc_csv(curve));
    {
        svg::Series s{"AUC = " + format_double(curve.auc), "#1f77b4", {}};
        for (const auto& p : curve.points) s.points.push_back({p.fpr, p.tpr});
        svg::ChartOptions o;
        o.title = "ROC";
        o.x_label = "false positive rate";
        o.y_label = "true positive rate";
        o.vline_x = cfg.fpr_max;
        o.diagonal = true;
        o.x_range = {{0.0, 1.0}};
        o.y_range = {{0.0, 1.0}};
        write_file_atomic((out / "roc.svg").string(), svg::line_chart({s}, o));
    }

    // Threshold sweep on a fixed 0..1 grid.
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(double(i) / 50.0);
    const auto sweep = threshold_sweep(labels, probs, grid);
    write_file_atomic((out / "sweep.csv").string(), render_sweep_csv(sweep));
    {
        svg::Series acc{"accuracy", "#1f77b4", {}}, fpr{"FPR", "#d62728", {}},
            fnr{"FNR", "#2ca02c", {}};
        for (const auto& row : sweep) {
            acc.points.push_back({row.theta, row.accuracy});
            fpr.points.push_back({row.theta, row.fpr});
            fnr.points.push_back({row.theta, row.fnr});
        }
        svg::ChartOptions o;
        o.title = "Threshold sweep";
        o.x_label = "decision threshold";
        o.y_label = "rate";
        o.x_range = {{0.0, 1.0}};
        o.y_range = {{0.0, 1.0}};
        write_file_atomic((out / "sweep.svg").string(), svg::line_chart({acc, fpr, fnr}, o));
    }

    // Feature importances, sorted, top 20 plotted.
    const auto names = models::variant_feature_names(bundle.variant, bundle.config);
    std::vector<std::size_t> order(names.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return bundle.forest.importances[a] > bundle.forest.importances[b];
    });
    std::string imp_csv = "feature,importance\n";
    std::vector<std::string> top_names;
    std::vector<double> top_values;
    for (std::size_t r = 0; r < order.size(); ++r) {
        imp_csv += names[order[r]] + "," + format_double(bundle.forest.importances[order[r]]) + "\n";
        if (r < 20) {
            top_names.push_back(names[order[r]]);
            top_values.push_back(bundle.forest.importances[order[r]]);
        }
    }
    write_file_atomic((out / "importances.csv").string(), imp_csv);
    {
        svg::ChartOptions o;
        o.title = "Feature importances (top " + std::to_string(top_names.size()) + ")";
        o.x_label = "Gini importance";
        o.height = 30 * int(top_names.size()) + 90;
        write_file_atomic((out / "importances.svg").string(),
                          svg::bar_chart(top_names, top_values, o));
    }

    // Example spectrogram: first patient with EEG, first hour, first channel,
    // through the same preprocessing chain the models see.
    for (const auto& rec : cohort) {
        if (rec.segments.empty() || rec.segments.front().channels.empty()) continue;
        const auto& raw = rec.segments.front();
        const auto filtered = dsp::bandpass_notch(raw, bundle.config.filter);
        const double window = std::min(bundle.config.window_s, filtered.duration_s());
        const auto cleaned =
            dsp::select_cleanest(filtered, window, bundle.config.stride_s).first;
        const auto prepped = dsp::resample(cleaned, bundle.config.fs_target);
        if (prepped.n_samples() < bundle.config.stft.frame) continue;
        const auto spec =
            spectro::spectrogram(prepped.samples[0], prepped.fs, bundle.config.stft);
        std::string csv = "band_hz";
        for (double t : spec.frame_times) csv += "," + format_double(t);
        csv += "\n";
        for (std::size_t b = 0; b < spec.n_bands(); ++b) {
            csv += format_double(spec.band_centers[b]);
            for (double v : spec.values[b]) csv += "," + format_double(v);
            csv += "\n";
        }
        write_file_atomic((out / "spectrogram_example.csv").string(), csv);
        svg::ChartOptions o;
        o.title = "Spectrogram (patient " + rec.clinical.patient_id + ", hour " +
                  std::to_string(raw.hour) + ", " + prepped.channels[0] + ", dB re peak)";
        o.x_label = "time [frames]";
        o.y_label = "mel band";
        write_file_atomic((out / "spectrogram_example.svg").string(),
                          svg::heatmap(spec.values, spec.floor_db, 0.0, o));
        break;
    }

    nlohmann::json j{{"challenge_score", score.challenge_score},
                     {"theta", std::isinf(score.theta) ? nlohmann::json("inf")
                                                       : nlohmann::json(score.theta)},
                     {"tpr_at_theta", score.tpr_at_theta},
                     {"fpr_at_theta", score.fpr_at_theta},
                     {"n_pos", score.n_pos},
                     {"n_neg", score.n_neg},
                     {"auc", curve.auc},
                     {"n_patients", cohort.size()},
                     {"bundle", bundle_path},
                     {"variant", models::to_string(bundle.variant.id)}};
    write_file_atomic((out / "score.json").string(), j.dump(2) + "\n");
    std::printf("report for %zu patients -> %s (score %.4f, AUC %.4f)\n", cohort.size(),
                cfg.output_dir.c_str(), score.challenge_score, curve.auc);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"EEG-based neurological outcome prediction pipeline"};
    app.require_subcommand(1);

    std::string config_file;
    Overrides ov;
    std::optional<std::string> variant_flag;
    std::string bundle_path;
    double theta = 0.5;
    std::optional<std::size_t> n_patients;
    std::optional<double> effect;

    auto* ingest_check = app.add_subcommand("ingest-check", "Validate a data root and summarize");
    add_common(ingest_check, config_file, ov);

    auto* featurize = app.add_subcommand("featurize", "Write the feature matrix as CSV");
    auto* train = app.add_subcommand("train", "Fit a variant and write a model bundle");
    auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
    auto* predict = app.add_subcommand("predict", "Score patients with a bundle");
    auto* report = app.add_subcommand("report", "Render score report and SVG plots");
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic benchmark cohort");

    for (auto* cmd : {featurize, train, cv}) {
        add_common(cmd, config_file, ov);
        cmd->add_option_function<std::string>(
            "--variant", [&](const std::string& v) { ov.variant = v; }, "Model variant M1..M6");
    }
    cv->add_option_function<std::size_t>(
        "--k", [&](std::size_t v) { ov.k_folds = v; }, "Fold count (default 5)");

    add_common(predict, config_file, ov);
    predict->add_option("--bundle", bundle_path, "Model bundle file")->required();
    predict->add_option("--theta", theta, "Decision threshold (default 0.5)");

    add_common(report, config_file, ov);
    report->add_option("--bundle", bundle_path, "Model bundle file")->required();

    add_common(synth_cmd, config_file, ov);
    synth_cmd->add_option_function<std::size_t>(
        "--n", [&](std::size_t v) { n_patients = v; }, "Cohort size (at least 20)");
    synth_cmd->add_option_function<double>(
        "--effect", [&](double v) { effect = v; }, "Planted effect size (default 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, "usage", e.what());
    }

    try {
        auto cfg = effective_config(config_file, ov);
        if (n_patients) cfg.synth.n_patients = *n_patients;
        if (effect) cfg.synth.effect_size = *effect;

        if (ingest_check->parsed()) return cmd_ingest_check(cfg);
        if (featurize->parsed()) return cmd_featurize(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (cv->parsed()) return cmd_cv(cfg);
        if (predict->parsed()) return cmd_predict(cfg, bundle_path, theta);
        if (report->parsed()) return cmd_report(cfg, bundle_path);
        if (synth_cmd->parsed()) return cmd_synth(cfg);
        return fail(2, "usage", "no subcommand given");
    } catch (const ArgumentError& e) {
        return fail(2, "usage", e.what());
    } catch (const ConfigError& e) {
        return fail(2, "config", e.what());
    } catch (const ContractError& e) {
        return fail(4, "internal", e.what());
    } catch (const Error& e) {
        // parse/validation/format/data/io/training: bad input data
        return fail(3, "data", e.what());
    } catch (const std::exception& e) {
        return fail(4, "internal", e.what());
    }
}
