#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdoc/error.hpp"
#include "tdoc/working_group.hpp"

namespace tdoc::evaluate {

// Labels are positions in the label set the predictions were made against.
struct Prediction {
    std::string doc_id;
    std::size_t seg_index = 0;
    std::size_t true_label = 0;
    std::size_t predicted_label = 0;
    std::vector<double> proba;
    friend bool operator==(const Prediction&, const Prediction&) = default;
};

inline void require_nonempty(const std::vector<Prediction>& preds) {
    if (preds.empty()) throw InvalidInput("no predictions to score");
}

inline double accuracy(const std::vector<Prediction>& preds) {
    require_nonempty(preds);
    std::size_t hits = 0;
    for (const auto& p : preds) hits += p.predicted_label == p.true_label ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

// confusion[t][p] counts predictions of class p for true class t.
inline std::vector<std::vector<std::size_t>> confusion_matrix(const std::vector<Prediction>& preds, std::size_t k) {
    std::vector<std::vector<std::size_t>> m(k, std::vector<std::size_t>(k, 0));
    for (const auto& p : preds) {
        if (p.true_label >= k || p.predicted_label >= k) throw InvalidInput("label index outside the label set");
        ++m[p.true_label][p.predicted_label];
    }
    return m;
}

struct ClassMetrics {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::size_t support = 0;    // actual positives
    std::size_t predicted = 0;  // predicted positives
    // Neither present nor predicted: F1 is 0 by convention.
    bool absent = false;
};

// Per-class precision/recall/F1 from the confusion matrix. An undefined
// ratio (zero denominator) counts as 0.
inline std::vector<ClassMetrics> per_class_metrics(const std::vector<std::vector<std::size_t>>& confusion) {
    const std::size_t k = confusion.size();
    std::vector<ClassMetrics> out(k);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t tp = confusion[c][c];
        for (std::size_t j = 0; j < k; ++j) {
            out[c].support += confusion[c][j];
            out[c].predicted += confusion[j][c];
        }
        auto& m = out[c];
        m.precision = m.predicted ? static_cast<double>(tp) / static_cast<double>(m.predicted) : 0.0;
        m.recall = m.support ? static_cast<double>(tp) / static_cast<double>(m.support) : 0.0;
        m.f1 = (m.precision + m.recall) > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        m.absent = m.support == 0 && m.predicted == 0;
    }
    return out;
}

// Unweighted mean of per-class F1 over all k classes.
inline double macro_f1(const std::vector<Prediction>& preds, std::size_t k) {
    require_nonempty(preds);
    auto per = per_class_metrics(confusion_matrix(preds, k));
    double s = 0;
    for (const auto& m : per) s += m.f1;
    return s / static_cast<double>(k);
}

// P(score of a positive > score of a negative) + P(tie) / 2 via midranks.
// nullopt when either side is empty.
inline std::optional<double> binary_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
    const std::size_t n = scores.size();
    std::size_t n_pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
    std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Ranks are 1-based; tied runs share their mean rank. Sums of half
    // integers are exact in double for any realistic n.
    double rank_sum_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t)
            if (positive[order[t]]) rank_sum_pos += midrank;
        i = j + 1;
    }
    double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1) / 2.0) / (np * nn);
}

struct AucResult {
    double macro = 0;
    std::vector<std::optional<double>> per_class;  // nullopt: excluded
    std::vector<std::size_t> excluded;
};

// Macro one-vs-rest ROC-AUC on proba[k]. Classes lacking positives or
// negatives are excluded; if every class is excluded this throws.
inline AucResult roc_auc_ovr(const std::vector<Prediction>& preds, std::size_t k) {
    require_nonempty(preds);
    AucResult r;
    std::vector<double> scores(preds.size());
    std::vector<bool> positive(preds.size());
    double sum = 0;
    std::size_t included = 0;
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < preds.size(); ++i) {
            if (preds[i].proba.size() != k) throw InvalidInput("probability row length differs from the label count");
            scores[i] = preds[i].proba[c];
            positive[i] = preds[i].true_label == c;
        }
        auto auc = binary_auc(scores, positive);
        r.per_class.push_back(auc);
        if (auc) {
            sum += *auc;
            ++included;
        } else {
            r.excluded.push_back(c);
        }
    }
    if (included == 0) throw InvalidInput("ROC-AUC undefined: no class has both positive and negative examples");
    r.macro = sum / static_cast<double>(included);
    return r;
}

inline double roc_auc_macro_ovr(const std::vector<Prediction>& preds, std::size_t k) { return roc_auc_ovr(preds, k).macro; }

struct EvalReport {
    std::vector<WorkingGroup> label_set;
    std::size_t n_predictions = 0;
    double accuracy = 0;
    double macro_f1 = 0;
    std::optional<double> roc_auc_macro_ovr;
    std::vector<std::size_t> auc_excluded;
    std::vector<ClassMetrics> per_class;
    std::vector<std::vector<std::size_t>> confusion;
    std::string model_id;
    std::string config_fingerprint;
};

inline EvalReport make_report(const std::vector<Prediction>& preds, const std::vector<WorkingGroup>& label_set,
                              std::string model_id = {}, std::string config_fingerprint = {}) {
    require_nonempty(preds);
    const std::size_t k = label_set.size();
    EvalReport r;
    r.label_set = label_set;
    r.n_predictions = preds.size();
    r.confusion = confusion_matrix(preds, k);
    r.per_class = per_class_metrics(r.confusion);
    r.accuracy = accuracy(preds);
    r.macro_f1 = macro_f1(preds, k);
    try {
        auto auc = roc_auc_ovr(preds, k);
        r.roc_auc_macro_ovr = auc.macro;
        r.auc_excluded = auc.excluded;
    } catch (const InvalidInput&) {
        for (std::size_t c = 0; c < k; ++c) r.auc_excluded.push_back(c);
    }
    r.model_id = std::move(model_id);
    r.config_fingerprint = std::move(config_fingerprint);
    return r;
}

inline nlohmann::ordered_json report_to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["model_id"] = r.model_id;
    j["config_fingerprint"] = r.config_fingerprint;
    j["label_set"] = wg_names(r.label_set);
    j["n_predictions"] = r.n_predictions;
    j["accuracy"] = r.accuracy;
    j["macro_f1"] = r.macro_f1;
    j["roc_auc_macro_ovr"] = r.roc_auc_macro_ovr ? nlohmann::ordered_json(*r.roc_auc_macro_ovr) : nlohmann::ordered_json();
    nlohmann::ordered_json excluded = nlohmann::ordered_json::array();
    for (std::size_t c : r.auc_excluded) excluded.push_back(std::string(wg_name(r.label_set[c])));
    j["roc_auc_excluded_classes"] = excluded;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        const auto& m = r.per_class[c];
        per[std::string(wg_name(r.label_set[c]))] = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                                                     {"support", m.support},     {"predicted", m.predicted},
                                                     {"absent", m.absent}};
    }
    j["per_class"] = per;
    j["confusion"] = r.confusion;
    return j;
}

namespace detail {
inline std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}
}  // namespace detail

// Aligned plain-text rendering: headline metrics, per-class table, confusion.
inline std::string report_to_text(const EvalReport& r) {
    std::string out;
    if (!r.model_id.empty()) out += "model:     " + r.model_id + "\n";
    out += "segments:  " + std::to_string(r.n_predictions) + "\n";
    out += "accuracy:  " + detail::fmt("%.4f", r.accuracy) + "\n";
    out += "macro F1:  " + detail::fmt("%.4f", r.macro_f1) + "\n";
    out += "ROC-AUC:   " + (r.roc_auc_macro_ovr ? detail::fmt("%.4f", *r.roc_auc_macro_ovr) : std::string("n/a")) + "\n\n";
    char line[160];
    std::snprintf(line, sizeof line, "%-6s %9s %9s %9s %9s\n", "class", "precision", "recall", "f1", "support");
    out += line;
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        const auto& m = r.per_class[c];
        std::snprintf(line, sizeof line, "%-6s %9.4f %9.4f %9.4f %9zu%s\n", std::string(wg_name(r.label_set[c])).c_str(),
                      m.precision, m.recall, m.f1, m.support, m.absent ? "  (absent)" : "");
        out += line;
    }
    out += "\nconfusion (rows: true, columns: predicted)\n";
    std::snprintf(line, sizeof line, "%-6s", "");
    out += line;
    for (WorkingGroup wg : r.label_set) {
        std::snprintf(line, sizeof line, " %6s", std::string(wg_name(wg)).c_str());
        out += line;
    }
    out += "\n";
    for (std::size_t t = 0; t < r.confusion.size(); ++t) {
        std::snprintf(line, sizeof line, "%-6s", std::string(wg_name(r.label_set[t])).c_str());
        out += line;
        for (std::size_t v : r.confusion[t]) {
            std::snprintf(line, sizeof line, " %6zu", v);
            out += line;
        }
        out += "\n";
    }
    return out;
}

}  // namespace tdoc::evaluate
