#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdoc/classifier/train.hpp"
#include "tdoc/dataset/export.hpp"
#include "tdoc/dataset/manifest.hpp"
#include "tdoc/error.hpp"
#include "tdoc/evaluate/metrics.hpp"
#include "tdoc/features/vocabulary.hpp"
#include "tdoc/preprocess/words.hpp"
#include "tdoc/util/hash.hpp"

namespace tdoc::evaluate {

using dataset::DatasetManifest;
using dataset::SegmentStore;

struct FitConfig {
    features::VocabConfig vocab;
    classifier::Hyperparams hp;
    std::size_t threads = 1;
};

struct FittedModel {
    features::Vocabulary vocab;
    classifier::TrainResult trained;
    std::string model_id;
};

inline std::string config_fingerprint(const FitConfig& c) {
    nlohmann::ordered_json j = {{"vocab", features::vocab_config_json(c.vocab)}, {"hp", classifier::hyperparams_json(c.hp)}};
    return fingerprint(j.dump());
}

inline std::vector<std::string_view> split_texts(const DatasetManifest& m, const SegmentStore& store,
                                                 const std::string& split, std::size_t cap = 0) {
    std::vector<std::string_view> texts;
    for (const auto& r : m.split(split)) {
        std::string_view t = store.at(r).text;
        texts.push_back(cap ? preprocess::first_words(t, cap) : t);
    }
    return texts;
}

inline std::vector<classifier::Example> make_examples(const DatasetManifest& m, const SegmentStore& store,
                                                      const features::Vocabulary& vocab, const std::string& split,
                                                      std::size_t threads, std::size_t cap = 0) {
    auto vectors = features::transform_all(split_texts(m, store, split, cap), vocab, threads);
    std::vector<classifier::Example> out(vectors.size());
    const auto& refs = m.split(split);
    for (std::size_t i = 0; i < refs.size(); ++i) {
        out[i].x = std::move(vectors[i]);
        out[i].y = m.label_position(refs[i].label);
    }
    return out;
}

// Vocabulary from the train split only, then the classifier.
inline FittedModel fit_on_manifest(const DatasetManifest& m, const SegmentStore& store, const FitConfig& cfg,
                                   const std::function<void(const classifier::EpochLog&)>& on_epoch = {}) {
    FittedModel f;
    f.vocab = features::fit_vocabulary(split_texts(m, store, dataset::kTrain), cfg.vocab, cfg.threads);
    auto train = make_examples(m, store, f.vocab, dataset::kTrain, cfg.threads);
    auto val = make_examples(m, store, f.vocab, dataset::kValidation, cfg.threads);
    f.trained = classifier::train(train, val, m.label_set, f.vocab.size(), f.vocab.fingerprint(), cfg.hp, cfg.threads,
                                  on_epoch);
    f.model_id = "native-softmax-" + fingerprint(classifier::model_to_json(f.trained.params).dump()).substr(0, 12);
    return f;
}

// Predictions for one split; cap > 0 truncates every segment to its first
// cap words before featurizing.
inline std::vector<Prediction> predict_split(const classifier::ModelParams& params, const features::Vocabulary& vocab,
                                             const DatasetManifest& m, const SegmentStore& store,
                                             const std::string& split, std::size_t threads, std::size_t cap = 0) {
    if (params.label_set != m.label_set) throw InvalidInput("model label set differs from the dataset label set");
    auto texts = split_texts(m, store, split, cap);
    const auto& refs = m.split(split);
    std::vector<Prediction> out(refs.size());
    parallel_for(refs.size(), threads, [&](std::size_t i) {
        auto& p = out[i];
        p.doc_id = refs[i].doc_id;
        p.seg_index = refs[i].seg_index;
        p.true_label = m.label_position(refs[i].label);
        p.proba = classifier::predict_proba(params, features::transform(texts[i], vocab));
        p.predicted_label = classifier::argmax(p.proba);
    });
    return out;
}

inline EvalReport evaluate_fitted(const FittedModel& f, const DatasetManifest& m, const SegmentStore& store,
                                  const FitConfig& cfg, std::size_t cap = 0) {
    auto preds = predict_split(f.trained.params, f.vocab, m, store, dataset::kTest, cfg.threads, cap);
    return make_report(preds, m.label_set, f.model_id, config_fingerprint(cfg));
}

// ---- sweeps ---------------------------------------------------------------

struct SweepRow {
    std::string key;  // grid point: fraction, combo name or cap
    std::uint64_t seed = 0;
    double accuracy = 0;
    std::optional<double> roc_auc;
    double macro_f1 = 0;
    std::size_t n_classes = 0;
    std::size_t train_docs = 0;
    std::size_t test_segments = 0;
};

struct SweepSummary {
    std::string key;
    std::size_t runs = 0;
    double mean_accuracy = 0;
    double std_accuracy = 0;
    std::optional<double> mean_roc_auc;
    std::optional<double> std_roc_auc;
};

struct SweepReport {
    std::string kind;  // "portion", "wg-combos" or "segment-length"
    std::vector<std::string> grid;
    std::vector<std::uint64_t> seeds;
    std::vector<SweepRow> rows;
    std::vector<SweepSummary> summary;

    const SweepSummary& at(const std::string& key) const {
        for (const auto& s : summary)
            if (s.key == key) return s;
        throw InvalidInput("no sweep point " + key);
    }
};

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return {mean, 0.0};
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

// Mean and sample standard deviation per grid point, in grid order.
inline void summarize(SweepReport& r) {
    for (const auto& key : r.grid) {
        std::vector<double> acc, auc;
        for (const auto& row : r.rows) {
            if (row.key != key) continue;
            acc.push_back(row.accuracy);
            if (row.roc_auc) auc.push_back(*row.roc_auc);
        }
        if (acc.empty()) continue;
        SweepSummary s;
        s.key = key;
        s.runs = acc.size();
        std::tie(s.mean_accuracy, s.std_accuracy) = mean_std(acc);
        if (auc.size() == acc.size()) {
            auto [m, sd] = mean_std(auc);
            s.mean_roc_auc = m;
            s.std_roc_auc = sd;
        }
        r.summary.push_back(s);
    }
}

inline SweepRow row_from(const std::string& key, std::uint64_t seed, const EvalReport& e, const DatasetManifest& m) {
    SweepRow row;
    row.key = key;
    row.seed = seed;
    row.accuracy = e.accuracy;
    row.roc_auc = e.roc_auc_macro_ovr;
    row.macro_f1 = e.macro_f1;
    row.n_classes = m.label_set.size();
    row.train_docs = dataset::doc_ids(dataset::train_era(m)).size();
    row.test_segments = e.n_predictions;
    return row;
}

inline std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace detail

inline FitConfig with_seed(FitConfig cfg, std::uint64_t seed) {
    cfg.hp.seed = seed;
    return cfg;
}

// For each fraction and seed: nested subsample of the train era, fit, and
// evaluate on the untouched test split.
inline SweepReport run_portion_sweep(const DatasetManifest& m, const SegmentStore& store,
                                     const std::vector<double>& fractions, const std::vector<std::uint64_t>& seeds,
                                     const FitConfig& cfg) {
    if (fractions.empty() || seeds.empty()) throw InvalidInput("portion sweep needs fractions and seeds");
    SweepReport r;
    r.kind = "portion";
    r.seeds = seeds;
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw InvalidInput("sweep fraction outside (0, 1]");
        r.grid.push_back(detail::format_number(f));
    }
    for (std::size_t i = 0; i < fractions.size(); ++i)
        for (std::uint64_t seed : seeds) {
            auto sub = dataset::subsample(m, fractions[i], seed);
            auto c = with_seed(cfg, seed);
            auto fitted = fit_on_manifest(sub, store, c);
            r.rows.push_back(detail::row_from(r.grid[i], seed, evaluate_fitted(fitted, sub, store, c), sub));
        }
    detail::summarize(r);
    return r;
}

// "RAN1+SA1+CT1" style name, canonical order.
inline std::string combo_name(const std::vector<WorkingGroup>& wgs) {
    std::vector<WorkingGroup> sorted = wgs;
    std::sort(sorted.begin(), sorted.end());
    std::string s;
    for (WorkingGroup wg : sorted) {
        if (!s.empty()) s += "+";
        s += wg_name(wg);
    }
    return s;
}

inline std::vector<std::vector<WorkingGroup>> default_wg_combos() {
    using W = WorkingGroup;
    return {
        {W::RAN1, W::SA1, W::CT1},
        {W::RAN1, W::RAN2, W::RAN3},
        {W::RAN1, W::RAN2, W::RAN3, W::SA1, W::CT1},
        {W::RAN1, W::RAN2, W::RAN3, W::RAN4, W::SA2, W::SA5},
        {W::RAN1, W::RAN2, W::RAN3, W::SA1, W::SA2, W::SA3, W::CT1, W::CT3, W::CT4},
        {W::RAN1, W::RAN2, W::RAN3, W::RAN4, W::SA1, W::SA2, W::SA3, W::SA4, W::CT1, W::CT3, W::CT4, W::CT6},
        {kAllWorkingGroups.begin(), kAllWorkingGroups.end()},
    };
}

// For each combination and seed: restrict the labels, fit, evaluate.
inline SweepReport run_wg_combination_suite(const DatasetManifest& m, const SegmentStore& store,
                                            const std::vector<std::vector<WorkingGroup>>& combos,
                                            const std::vector<std::uint64_t>& seeds, const FitConfig& cfg) {
    if (combos.empty() || seeds.empty()) throw InvalidInput("combination suite needs combos and seeds");
    SweepReport r;
    r.kind = "wg-combos";
    r.seeds = seeds;
    for (const auto& c : combos) r.grid.push_back(combo_name(c));
    for (std::size_t i = 0; i < combos.size(); ++i) {
        auto filtered = dataset::filter_wgs(m, combos[i]);
        for (std::uint64_t seed : seeds) {
            auto c = with_seed(cfg, seed);
            auto fitted = fit_on_manifest(filtered, store, c);
            r.rows.push_back(detail::row_from(r.grid[i], seed, evaluate_fitted(fitted, filtered, store, c), filtered));
        }
    }
    detail::summarize(r);
    return r;
}

// One model per seed trained on the full-length segments; the test split is
// re-featurized at each cap.
inline SweepReport run_segment_length_sweep(const DatasetManifest& m, const SegmentStore& store,
                                            const std::vector<std::size_t>& caps,
                                            const std::vector<std::uint64_t>& seeds, const FitConfig& cfg) {
    if (caps.empty() || seeds.empty()) throw InvalidInput("segment-length sweep needs caps and seeds");
    SweepReport r;
    r.kind = "segment-length";
    r.seeds = seeds;
    for (std::size_t cap : caps) {
        if (cap < 1) throw InvalidInput("segment length cap must be at least 1");
        r.grid.push_back(std::to_string(cap));
    }
    for (std::uint64_t seed : seeds) {
        auto c = with_seed(cfg, seed);
        auto fitted = fit_on_manifest(m, store, c);
        for (std::size_t i = 0; i < caps.size(); ++i)
            r.rows.push_back(detail::row_from(r.grid[i], seed, evaluate_fitted(fitted, m, store, c, caps[i]), m));
    }
    // Rows grouped by cap, then seed, like the other sweeps.
    std::stable_sort(r.rows.begin(), r.rows.end(), [&](const SweepRow& a, const SweepRow& b) {
        auto pos = [&](const std::string& k) { return std::find(r.grid.begin(), r.grid.end(), k) - r.grid.begin(); };
        return pos(a.key) < pos(b.key);
    });
    detail::summarize(r);
    return r;
}

inline std::string sweep_key_column(const std::string& kind) {
    if (kind == "portion") return "fraction";
    if (kind == "wg-combos") return "combo";
    return "cap";
}

inline std::string sweep_to_csv(const SweepReport& r) {
    std::string out = sweep_key_column(r.kind) + ",seed,accuracy,roc_auc,macro_f1,n_classes,train_docs,test_segments\n";
    char buf[256];
    for (const auto& row : r.rows) {
        char auc[32] = "";
        if (row.roc_auc) std::snprintf(auc, sizeof auc, "%.17g", *row.roc_auc);
        std::snprintf(buf, sizeof buf, ",%llu,%.17g,%s,%.17g,%zu,%zu,%zu\n", static_cast<unsigned long long>(row.seed),
                      row.accuracy, auc, row.macro_f1, row.n_classes, row.train_docs, row.test_segments);
        out += row.key + buf;
    }
    return out;
}

inline nlohmann::ordered_json sweep_to_json(const SweepReport& r) {
    nlohmann::ordered_json j;
    j["kind"] = r.kind;
    j["grid"] = r.grid;
    j["seeds"] = r.seeds;
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows)
        j["rows"].push_back({{sweep_key_column(r.kind), row.key},
                             {"seed", row.seed},
                             {"accuracy", row.accuracy},
                             {"roc_auc", opt(row.roc_auc)},
                             {"macro_f1", row.macro_f1},
                             {"n_classes", row.n_classes},
                             {"train_docs", row.train_docs},
                             {"test_segments", row.test_segments}});
    j["summary"] = nlohmann::ordered_json::array();
    for (const auto& s : r.summary)
        j["summary"].push_back({{sweep_key_column(r.kind), s.key},
                                {"runs", s.runs},
                                {"mean_accuracy", s.mean_accuracy},
                                {"std_accuracy", s.std_accuracy},
                                {"mean_roc_auc", opt(s.mean_roc_auc)},
                                {"std_roc_auc", opt(s.std_roc_auc)}});
    return j;
}

// The combination table with one column per TSG listing member numbers.
inline std::string combo_table_text(const SweepReport& r) {
    std::string out;
    char line[200];
    std::snprintf(line, sizeof line, "%-14s %-12s %-12s %10s %8s\n", "RAN", "SA", "CT", "accuracy", "std");
    out += line;
    for (const auto& s : r.summary) {
        std::map<Tsg, std::string> cols;
        std::string name = s.key;
        std::size_t start = 0;
        while (start <= name.size()) {
            std::size_t end = name.find('+', start);
            if (end == std::string::npos) end = name.size();
            WorkingGroup wg = wg_from_name(name.substr(start, end - start));
            auto& c = cols[wg_tsg(wg)];
            if (!c.empty()) c += ",";
            c += std::to_string(wg_number(wg));
            start = end + 1;
        }
        auto col = [&](Tsg t) { return cols.count(t) ? cols[t] : std::string("None"); };
        std::snprintf(line, sizeof line, "%-14s %-12s %-12s %9.2f%% %7.2f\n", col(Tsg::RAN).c_str(), col(Tsg::SA).c_str(),
                      col(Tsg::CT).c_str(), 100 * s.mean_accuracy, 100 * s.std_accuracy);
        out += line;
    }
    return out;
}

}  // namespace tdoc::evaluate
