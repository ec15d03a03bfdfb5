#include "comapipe/models.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <json.hpp>

#include "comapipe/errors.hpp"
#include "comapipe/rng.hpp"
#include "comapipe/util.hpp"

namespace comapipe::models {

using json = nlohmann::json;

ModelVariant make_variant(VariantId id) {
    ModelVariant v;
    v.id = id;
    switch (id) {
        case VariantId::M1:
            break;
        case VariantId::M2:
            v.uses_embeddings = true;
            break;
        case VariantId::M3:
            v.uses_embeddings = v.aggregate_time_channels = true;
            break;
        case VariantId::M4:
            v.uses_embeddings = v.aggregate_time_channels = v.intermediate_fusion = true;
            break;
        case VariantId::M5:
            v.uses_embeddings = v.aggregate_time_channels = v.uses_rocket = true;
            break;
        case VariantId::M6:
            v.uses_embeddings = v.aggregate_time_channels = true;
            v.intermediate_fusion = v.uses_rocket = true;
            break;
    }
    return v;
}

const char* to_string(VariantId id) {
    switch (id) {
        case VariantId::M1: return "M1";
        case VariantId::M2: return "M2";
        case VariantId::M3: return "M3";
        case VariantId::M4: return "M4";
        case VariantId::M5: return "M5";
        case VariantId::M6: return "M6";
    }
    return "M?";
}

std::optional<VariantId> variant_from_name(const std::string& name) {
    if (name == "M1") return VariantId::M1;
    if (name == "M2") return VariantId::M2;
    if (name == "M3") return VariantId::M3;
    if (name == "M4") return VariantId::M4;
    if (name == "M5") return VariantId::M5;
    if (name == "M6") return VariantId::M6;
    return std::nullopt;
}

const std::vector<std::string>& canonical_channels() {
    static const std::vector<std::string> names = {
        "Fp1", "Fp2", "F3", "F4", "F7", "F8", "Fz", "C3", "C4", "Cz",
        "P3", "P4", "Pz", "T3", "T4", "T5", "T6", "O1", "O2"};
    return names;
}

namespace {

bool is_canonical(const std::string& name) {
    const auto& canon = canonical_channels();
    return std::find(canon.begin(), canon.end(), name) != canon.end();
}

// Fix the channel order (canonical first, extras sorted by name) before
// any arithmetic, so every downstream sum is independent of the order
// channels happened to appear in the source file.
ingest::EegSegment reorder_channels(const ingest::EegSegment& seg) {
    std::vector<std::size_t> order;
    order.reserve(seg.channels.size());
    for (const auto& name : canonical_channels()) {
        for (std::size_t i = 0; i < seg.channels.size(); ++i)
            if (seg.channels[i] == name) order.push_back(i);
    }
    std::vector<std::size_t> extras;
    for (std::size_t i = 0; i < seg.channels.size(); ++i)
        if (!is_canonical(seg.channels[i])) extras.push_back(i);
    std::sort(extras.begin(), extras.end(), [&](std::size_t a, std::size_t b) {
        return seg.channels[a] != seg.channels[b] ? seg.channels[a] < seg.channels[b] : a < b;
    });
    order.insert(order.end(), extras.begin(), extras.end());

    ingest::EegSegment out;
    out.fs = seg.fs;
    out.hour = seg.hour;
    for (std::size_t i : order) {
        out.channels.push_back(seg.channels[i]);
        out.samples.push_back(seg.samples[i]);
    }
    return out;
}

ingest::EegSegment preprocess(const ingest::EegSegment& raw, const FitConfig& config) {
    auto seg = reorder_channels(raw);
    seg = dsp::bandpass_notch(seg, config.filter);
    const double window = std::min(config.window_s, seg.duration_s());
    seg = dsp::select_cleanest(seg, window, config.stride_s).first;
    return dsp::resample(seg, config.fs_target);
}

double logistic(double d) { return 1.0 / (1.0 + std::exp(-d)); }

std::optional<std::vector<double>> fusion_vector(const ingest::ClinicalRecord& clinical,
                                                 const ModelBundle& bundle) {
    if (!bundle.provider.fuse_clinical) return std::nullopt;
    return features::encode_clinical(clinical, bundle.imputation).values;
}

} // namespace

PatientSignalCache precompute_signals(const ingest::PatientRecord& rec, const FitConfig& config,
                                      bool need_grids, const rocket::KernelBank* bank) {
    PatientSignalCache cache;
    cache.flags = features::signal_flags(rec);

    std::vector<ingest::EegSegment> prepped;
    prepped.reserve(rec.segments.size());
    for (const auto& raw : rec.segments) prepped.push_back(preprocess(raw, config));
    std::stable_sort(prepped.begin(), prepped.end(),
                     [](const auto& a, const auto& b) { return a.hour < b.hour; });

    cache.summary = features::eeg_summary(prepped);

    const auto& canon = canonical_channels();
    for (const auto& seg : prepped) {
        HourSignal hs;
        hs.hour = seg.hour;
        std::vector<const std::vector<double>*> data;
        for (const auto& name : canon) {
            for (std::size_t i = 0; i < seg.channels.size(); ++i) {
                if (seg.channels[i] == name) {
                    hs.channels.push_back(name);
                    data.push_back(&seg.samples[i]);
                    break;
                }
            }
        }
        if (need_grids) {
            for (const auto* x : data) {
                if (x->size() < config.stft.frame)
                    throw DataError("hour " + std::to_string(seg.hour) +
                                    ": window shorter than one spectrogram frame");
                const auto spec = spectro::spectrogram(*x, seg.fs, config.stft);
                hs.grids.push_back(spectro::grid_features(spec));
            }
        }
        if (bank != nullptr) {
            const std::size_t len = bank->series_len;
            std::vector<std::vector<double>> series(canon.size(), std::vector<double>(len, 0.0));
            for (std::size_t c = 0; c < hs.channels.size(); ++c) {
                const std::size_t row =
                    std::size_t(std::find(canon.begin(), canon.end(), hs.channels[c]) - canon.begin());
                const std::size_t n = std::min(len, data[c]->size());
                std::copy(data[c]->begin(), data[c]->begin() + long(n), series[row].begin());
            }
            hs.rocket_features = rocket::transform(series, *bank);
        }
        cache.hours.push_back(std::move(hs));
    }
    return cache;
}

std::pair<double, double> segment_vote_stats(const std::vector<double>& probs) {
    if (probs.empty()) return {0.0, 0.0};
    double sum = 0.0;
    std::size_t votes = 0;
    for (double p : probs) {
        sum += p;
        votes += (p >= 0.5);
    }
    const double n = double(probs.size());
    return {sum / n, double(votes) / n};
}

std::vector<std::string> variant_feature_names(const ModelVariant& variant,
                                               const FitConfig& config) {
    std::vector<std::string> names = features::clinical_feature_names();
    const auto& flags = features::signal_flag_names();
    names.insert(names.end(), flags.begin(), flags.end());
    const auto& summary = features::summary_names();
    names.insert(names.end(), summary.begin(), summary.end());

    if (variant.uses_embeddings && !variant.aggregate_time_channels) {
        for (const auto& ch : canonical_channels()) {
            for (std::size_t j = 0; j < config.embed_dim; ++j)
                names.push_back("emb_" + ch + "_" + std::to_string(j));
            names.push_back("present_" + ch);
        }
    }
    if (variant.aggregate_time_channels) {
        for (std::size_t j = 0; j < config.embed_dim; ++j)
            names.push_back("emb_agg_" + std::to_string(j));
        names.push_back("seg_prob_mean");
        names.push_back("seg_vote_poor_frac");
    }
    if (variant.uses_rocket) names.push_back("rocket_decision");
    return names;
}

PatientFeatureRow build_features_cached(const ingest::ClinicalRecord& clinical,
                                        const PatientSignalCache& cache,
                                        const ModelBundle& bundle) {
    const ModelVariant& variant = bundle.variant;
    PatientFeatureRow row;
    row.names = variant_feature_names(variant, bundle.config);

    row.values = features::encode_clinical(clinical, bundle.imputation).values;
    const auto flag_vals = features::signal_flag_values(cache.flags);
    row.values.insert(row.values.end(), flag_vals.begin(), flag_vals.end());
    const auto summary_vals = features::summary_values(cache.summary);
    row.values.insert(row.values.end(), summary_vals.begin(), summary_vals.end());

    if (variant.uses_embeddings && !cache.flags.has_eeg)
        row.diagnostics.push_back("no EEG: signal features zero-filled");

    const auto fused = fusion_vector(clinical, bundle);
    const std::size_t dim = bundle.provider.output_dim;
    const auto& canon = canonical_channels();

    if (variant.uses_embeddings) {
        for (const auto& hs : cache.hours) {
            if (hs.grids.size() != hs.channels.size())
                throw ContractError("signal cache lacks grid features for this variant");
        }
    }

    if (variant.uses_embeddings && !variant.aggregate_time_channels) {
        const HourSignal* latest = cache.hours.empty() ? nullptr : &cache.hours.back();
        for (const auto& name : canon) {
            const std::vector<double>* grid = nullptr;
            if (latest != nullptr) {
                for (std::size_t c = 0; c < latest->channels.size(); ++c) {
                    if (latest->channels[c] == name) {
                        grid = &latest->grids[c];
                        break;
                    }
                }
            }
            if (grid != nullptr) {
                const auto e = spectro::embed_from_grid(*grid, fused, bundle.provider);
                row.values.insert(row.values.end(), e.begin(), e.end());
                row.values.push_back(1.0);
            } else {
                row.values.insert(row.values.end(), dim, 0.0);
                row.values.push_back(0.0);
                if (latest != nullptr)
                    row.diagnostics.push_back("channel " + name +
                                              " absent in latest hour: zero-filled");
            }
        }
    }

    if (variant.aggregate_time_channels) {
        if (!bundle.segment_head)
            throw ContractError("bundle is missing the segment head for an aggregate variant");
        std::vector<double> pooled(dim, 0.0);
        std::vector<double> probs;
        std::size_t n_seg = 0;
        for (const auto& hs : cache.hours) {
            for (const auto& grid : hs.grids) {
                const auto e = spectro::embed_from_grid(grid, fused, bundle.provider);
                for (std::size_t j = 0; j < dim; ++j) pooled[j] += e[j];
                probs.push_back(logistic(learners::ridge_decision(*bundle.segment_head, e)));
                ++n_seg;
            }
        }
        if (n_seg > 0)
            for (double& v : pooled) v /= double(n_seg);
        const auto [prob_mean, vote_frac] = segment_vote_stats(probs);
        row.values.insert(row.values.end(), pooled.begin(), pooled.end());
        row.values.push_back(prob_mean);
        row.values.push_back(vote_frac);
    }

    if (variant.uses_rocket) {
        if (!bundle.rocket_head)
            throw ContractError("bundle is missing the kernel head for a rocket variant");
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& hs : cache.hours) {
            if (hs.rocket_features.empty())
                throw ContractError("signal cache lacks kernel features for this variant");
            sum += learners::ridge_decision(*bundle.rocket_head, hs.rocket_features);
            ++n;
        }
        row.values.push_back(n > 0 ? sum / double(n) : 0.0);
        if (n == 0) row.diagnostics.push_back("no EEG hours: kernel decision set to 0");
    }

    if (row.values.size() != row.names.size())
        throw ContractError("feature row and name list diverged");
    return row;
}

PatientFeatureRow build_features(const ingest::PatientRecord& rec, const ModelBundle& bundle) {
    const auto cache =
        precompute_signals(rec, bundle.config, bundle.variant.uses_embeddings,
                           bundle.bank ? &*bundle.bank : nullptr);
    return build_features_cached(rec.clinical, cache, bundle);
}

ModelBundle fit_cached(const std::vector<const ingest::PatientRecord*>& train,
                       const std::vector<const PatientSignalCache*>& caches,
                       const ModelVariant& variant, const FitConfig& config,
                       std::uint64_t seed, const rocket::KernelBank* bank) {
    if (train.empty()) throw ArgumentError("empty training set");
    if (train.size() != caches.size())
        throw ContractError("training records and signal caches differ in length");

    std::vector<ingest::Outcome> y;
    y.reserve(train.size());
    bool any_poor = false, any_good = false;
    for (const auto* p : train) {
        if (!p->clinical.outcome)
            throw ArgumentError("training patient without outcome: " + p->clinical.patient_id);
        y.push_back(*p->clinical.outcome);
        (y.back() == ingest::Outcome::Poor ? any_poor : any_good) = true;
    }
    if (!any_poor || !any_good)
        throw TrainingError("training outcomes are single-class");

    ModelBundle bundle;
    bundle.variant = variant;
    bundle.seed = seed;
    bundle.channels = canonical_channels();
    bundle.config = config;

    std::vector<ingest::ClinicalRecord> clinicals;
    clinicals.reserve(train.size());
    for (const auto* p : train) clinicals.push_back(p->clinical);
    bundle.imputation = features::ImputationStats::from_records(clinicals);

    if (variant.uses_embeddings) {
        bundle.provider.kind = spectro::EmbeddingProviderSpec::Kind::ReferenceGrid;
        bundle.provider.seed = derive_seed(seed, "embedding");
        bundle.provider.output_dim = config.embed_dim;
        bundle.provider.fuse_clinical = variant.intermediate_fusion;
    }

    if (variant.uses_rocket) {
        if (bank == nullptr)
            throw ContractError("a kernel bank is required for a rocket variant");
        if (bank->n_input_channels != bundle.channels.size() ||
            bank->series_len != config.rocket_series_len())
            throw ContractError("kernel bank does not match the configuration");
        bundle.bank = *bank;
    }

    if (variant.aggregate_time_channels) {
        std::vector<std::vector<double>> embeds;
        std::vector<ingest::Outcome> seg_y;
        for (std::size_t i = 0; i < train.size(); ++i) {
            const auto fused = fusion_vector(train[i]->clinical, bundle);
            for (const auto& hs : caches[i]->hours) {
                if (hs.grids.size() != hs.channels.size())
                    throw ContractError("signal cache lacks grid features for this variant");
                for (const auto& grid : hs.grids) {
                    embeds.push_back(spectro::embed_from_grid(grid, fused, bundle.provider));
                    seg_y.push_back(y[i]);
                }
            }
        }
        if (embeds.empty())
            throw TrainingError("no EEG segments available to fit the segment head");
        bundle.segment_head = learners::ridge_fit(embeds, seg_y);
    }

    if (variant.uses_rocket) {
        std::vector<std::vector<double>> feats;
        std::vector<ingest::Outcome> hour_y;
        for (std::size_t i = 0; i < train.size(); ++i) {
            for (const auto& hs : caches[i]->hours) {
                if (hs.rocket_features.empty())
                    throw ContractError("signal cache lacks kernel features for this variant");
                feats.push_back(hs.rocket_features);
                hour_y.push_back(y[i]);
            }
        }
        if (feats.empty())
            throw TrainingError("no EEG hours available to fit the kernel head");
        bundle.rocket_head = learners::ridge_fit(feats, hour_y);
    }

    std::vector<std::vector<double>> X;
    X.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i)
        X.push_back(build_features_cached(train[i]->clinical, *caches[i], bundle).values);

    auto forest_config = config.forest;
    forest_config.seed = derive_seed(seed, "forest");
    bundle.forest = learners::forest_fit(X, y, forest_config);
    return bundle;
}

ModelBundle fit_variant(const std::vector<ingest::PatientRecord>& train,
                        const ModelVariant& variant, const FitConfig& config,
                        std::uint64_t seed) {
    std::optional<rocket::KernelBank> bank;
    if (variant.uses_rocket)
        bank = rocket::generate_bank(derive_seed(seed, "rocket-bank"), canonical_channels().size(),
                                     config.rocket_series_len(), config.bank);

    std::vector<PatientSignalCache> caches;
    caches.reserve(train.size());
    for (const auto& rec : train)
        caches.push_back(precompute_signals(rec, config, variant.uses_embeddings,
                                            bank ? &*bank : nullptr));

    std::vector<const ingest::PatientRecord*> recs;
    std::vector<const PatientSignalCache*> cache_ptrs;
    for (std::size_t i = 0; i < train.size(); ++i) {
        recs.push_back(&train[i]);
        cache_ptrs.push_back(&caches[i]);
    }
    return fit_cached(recs, cache_ptrs, variant, config, seed, bank ? &*bank : nullptr);
}

double predict_cached(const ModelBundle& bundle, const ingest::ClinicalRecord& clinical,
                      const PatientSignalCache& cache) {
    const auto row = build_features_cached(clinical, cache, bundle);
    return learners::forest_predict_proba(bundle.forest, row.values);
}

double predict(const ModelBundle& bundle, const ingest::PatientRecord& rec) {
    const auto cache =
        precompute_signals(rec, bundle.config, bundle.variant.uses_embeddings,
                           bundle.bank ? &*bundle.bank : nullptr);
    return predict_cached(bundle, rec.clinical, cache);
}

namespace {

json ridge_json(const learners::RidgeModel& m) {
    return json{{"weights", m.weights},
                {"intercept", m.intercept},
                {"alpha_chosen", m.alpha_chosen},
                {"alpha_grid", m.alpha_grid},
                {"loocv_errors", m.loocv_errors},
                {"mean", m.mean},
                {"sd", m.sd},
                {"dropped_features", m.dropped_features}};
}

learners::RidgeModel ridge_from_json(const json& j) {
    learners::RidgeModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.intercept = j.at("intercept").get<double>();
    m.alpha_chosen = j.at("alpha_chosen").get<double>();
    m.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
    m.loocv_errors = j.at("loocv_errors").get<std::vector<double>>();
    m.mean = j.at("mean").get<std::vector<double>>();
    m.sd = j.at("sd").get<std::vector<double>>();
    m.dropped_features = j.at("dropped_features").get<std::vector<std::size_t>>();
    return m;
}

json forest_json(const learners::ForestModel& f) {
    json trees = json::array();
    for (const auto& tree : f.trees) {
        json nodes = json::array();
        for (const auto& n : tree.nodes)
            nodes.push_back(json::array({n.feature, n.threshold, n.left, n.right, n.poor_fraction}));
        trees.push_back(std::move(nodes));
    }
    return json{{"n_trees", f.config.n_trees},
                {"mtry", f.config.mtry},
                {"min_leaf", f.config.min_leaf},
                {"seed", f.config.seed},
                {"n_features", f.n_features},
                {"importances", f.importances},
                {"trees", std::move(trees)}};
}

learners::ForestModel forest_from_json(const json& j) {
    learners::ForestModel f;
    f.config.n_trees = j.at("n_trees").get<std::size_t>();
    f.config.mtry = j.at("mtry").get<std::size_t>();
    f.config.min_leaf = j.at("min_leaf").get<std::size_t>();
    f.config.seed = j.at("seed").get<std::uint64_t>();
    f.n_features = j.at("n_features").get<std::size_t>();
    f.importances = j.at("importances").get<std::vector<double>>();
    for (const auto& tj : j.at("trees")) {
        learners::Tree tree;
        for (const auto& nj : tj) {
            if (!nj.is_array() || nj.size() != 5)
                throw FormatError("bundle: malformed tree node");
            learners::TreeNode n;
            n.feature = nj[0].get<int>();
            n.threshold = nj[1].get<double>();
            n.left = nj[2].get<int>();
            n.right = nj[3].get<int>();
            n.poor_fraction = nj[4].get<double>();
            tree.nodes.push_back(n);
        }
        f.trees.push_back(std::move(tree));
    }
    return f;
}

json config_json(const FitConfig& c) {
    return json{
        {"filter",
         {{"band_low", c.filter.band_low},
          {"band_high", c.filter.band_high},
          {"notch_freqs", c.filter.notch_freqs},
          {"order", c.filter.order},
          {"notch_q", c.filter.notch_q}}},
        {"window_s", c.window_s},
        {"stride_s", c.stride_s},
        {"fs_target", c.fs_target},
        {"stft",
         {{"frame", c.stft.frame},
          {"hop", c.stft.hop},
          {"n_mel", c.stft.n_mel},
          {"fmin", c.stft.fmin},
          {"fmax", c.stft.fmax},
          {"floor_db", c.stft.floor_db}}},
        {"embed_dim", c.embed_dim},
        {"bank",
         {{"n_kernels", c.bank.n_kernels},
          {"features_per_kernel", c.bank.features_per_kernel},
          {"dilation_cap", c.bank.dilation_cap}}},
        {"forest",
         {{"n_trees", c.forest.n_trees},
          {"mtry", c.forest.mtry},
          {"min_leaf", c.forest.min_leaf}}}};
}

FitConfig config_from_json(const json& j) {
    FitConfig c;
    const auto& fj = j.at("filter");
    c.filter.band_low = fj.at("band_low").get<double>();
    c.filter.band_high = fj.at("band_high").get<double>();
    c.filter.notch_freqs = fj.at("notch_freqs").get<std::vector<double>>();
    c.filter.order = fj.at("order").get<int>();
    c.filter.notch_q = fj.at("notch_q").get<double>();
    c.window_s = j.at("window_s").get<double>();
    c.stride_s = j.at("stride_s").get<double>();
    c.fs_target = j.at("fs_target").get<double>();
    const auto& sj = j.at("stft");
    c.stft.frame = sj.at("frame").get<std::size_t>();
    c.stft.hop = sj.at("hop").get<std::size_t>();
    c.stft.n_mel = sj.at("n_mel").get<std::size_t>();
    c.stft.fmin = sj.at("fmin").get<double>();
    c.stft.fmax = sj.at("fmax").get<double>();
    c.stft.floor_db = sj.at("floor_db").get<double>();
    c.embed_dim = j.at("embed_dim").get<std::size_t>();
    const auto& bj = j.at("bank");
    c.bank.n_kernels = bj.at("n_kernels").get<std::size_t>();
    c.bank.features_per_kernel = bj.at("features_per_kernel").get<int>();
    c.bank.dilation_cap = bj.at("dilation_cap").get<std::size_t>();
    const auto& tj = j.at("forest");
    c.forest.n_trees = tj.at("n_trees").get<std::size_t>();
    c.forest.mtry = tj.at("mtry").get<std::size_t>();
    c.forest.min_leaf = tj.at("min_leaf").get<std::size_t>();
    return c;
}

} // namespace

std::string serialize_bundle(const ModelBundle& bundle) {
    json j;
    j["format"] = "comapipe-bundle";
    j["version"] = bundle.version;
    j["variant"] = json{{"id", to_string(bundle.variant.id)},
                        {"uses_embeddings", bundle.variant.uses_embeddings},
                        {"aggregate_time_channels", bundle.variant.aggregate_time_channels},
                        {"intermediate_fusion", bundle.variant.intermediate_fusion},
                        {"uses_rocket", bundle.variant.uses_rocket}};
    j["seed"] = bundle.seed;
    j["channels"] = bundle.channels;
    j["config"] = config_json(bundle.config);
    j["imputation"] = json{
        {"age_median",
         bundle.imputation.age_median ? json(*bundle.imputation.age_median) : json(nullptr)},
        {"rosc_median",
         bundle.imputation.rosc_median ? json(*bundle.imputation.rosc_median) : json(nullptr)}};
    j["provider"] = json{{"kind", "reference_grid"},
                         {"seed", bundle.provider.seed},
                         {"output_dim", bundle.provider.output_dim},
                         {"fuse_clinical", bundle.provider.fuse_clinical}};
    j["segment_head"] = bundle.segment_head ? ridge_json(*bundle.segment_head) : json(nullptr);
    if (bundle.bank && bundle.rocket_head) {
        j["rocket"] = json{{"bank",
                            {{"seed", bundle.bank->seed},
                             {"n_channels", bundle.bank->n_input_channels},
                             {"series_len", bundle.bank->series_len},
                             {"n_kernels", bundle.bank->config.n_kernels},
                             {"features_per_kernel", bundle.bank->config.features_per_kernel},
                             {"dilation_cap", bundle.bank->config.dilation_cap}}},
                           {"head", ridge_json(*bundle.rocket_head)}};
    } else {
        j["rocket"] = nullptr;
    }
    j["forest"] = forest_json(bundle.forest);
    return j.dump() + "\n";
}

ModelBundle deserialize_bundle(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("bundle parse: ") + e.what());
    }
    try {
        if (!j.is_object() || j.value("format", std::string()) != "comapipe-bundle")
            throw FormatError("not a model bundle");
        if (j.at("version").get<int>() != 1)
            throw FormatError("unsupported bundle version");

        ModelBundle b;
        b.version = 1;
        const auto& vj = j.at("variant");
        const auto id = variant_from_name(vj.at("id").get<std::string>());
        if (!id) throw FormatError("unknown variant id");
        b.variant.id = *id;
        b.variant.uses_embeddings = vj.at("uses_embeddings").get<bool>();
        b.variant.aggregate_time_channels = vj.at("aggregate_time_channels").get<bool>();
        b.variant.intermediate_fusion = vj.at("intermediate_fusion").get<bool>();
        b.variant.uses_rocket = vj.at("uses_rocket").get<bool>();
        b.seed = j.at("seed").get<std::uint64_t>();
        b.channels = j.at("channels").get<std::vector<std::string>>();
        b.config = config_from_json(j.at("config"));
        const auto& ij = j.at("imputation");
        if (!ij.at("age_median").is_null())
            b.imputation.age_median = ij.at("age_median").get<double>();
        if (!ij.at("rosc_median").is_null())
            b.imputation.rosc_median = ij.at("rosc_median").get<double>();
        const auto& pj = j.at("provider");
        if (pj.at("kind").get<std::string>() != "reference_grid")
            throw FormatError("unknown embedding provider kind");
        b.provider.kind = spectro::EmbeddingProviderSpec::Kind::ReferenceGrid;
        b.provider.seed = pj.at("seed").get<std::uint64_t>();
        b.provider.output_dim = pj.at("output_dim").get<std::size_t>();
        b.provider.fuse_clinical = pj.at("fuse_clinical").get<bool>();
        if (!j.at("segment_head").is_null())
            b.segment_head = ridge_from_json(j.at("segment_head"));
        if (!j.at("rocket").is_null()) {
            const auto& rj = j.at("rocket");
            const auto& bj = rj.at("bank");
            rocket::BankConfig bc;
            bc.n_kernels = bj.at("n_kernels").get<std::size_t>();
            bc.features_per_kernel = bj.at("features_per_kernel").get<int>();
            bc.dilation_cap = bj.at("dilation_cap").get<std::size_t>();
            b.bank = rocket::generate_bank(bj.at("seed").get<std::uint64_t>(),
                                           bj.at("n_channels").get<std::size_t>(),
                                           bj.at("series_len").get<std::size_t>(), bc);
            b.rocket_head = ridge_from_json(rj.at("head"));
        }
        b.forest = forest_from_json(j.at("forest"));
        return b;
    } catch (const json::exception& e) {
        throw FormatError(std::string("bundle: ") + e.what());
    }
}

void save_bundle(const std::string& path, const ModelBundle& bundle) {
    write_file_atomic(path, serialize_bundle(bundle));
}

ModelBundle load_bundle(const std::string& path) {
    return deserialize_bundle(read_file(path));
}

std::string bundle_filename(const ModelVariant& variant, std::uint64_t seed) {
    return std::string(to_string(variant.id)) + "_" + std::to_string(seed) + ".bundle";
}

} // namespace comapipe::models
