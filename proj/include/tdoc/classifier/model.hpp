#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdoc/error.hpp"
#include "tdoc/features/vocabulary.hpp"
#include "tdoc/working_group.hpp"

namespace tdoc::classifier {

using features::FeatureVector;

struct Hyperparams {
    std::size_t batch_size = 32;
    double learning_rate = 2e-3;
    double l2 = 0.01;
    std::size_t epochs = 10;
    std::uint64_t seed = 0;
    std::size_t early_stop_patience = 2;
    // "sgd" (plain mini-batch gradient descent) or "adagrad".
    std::string optimizer = "sgd";

    void check() const {
        if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
        if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ConfigError("l2 must be non-negative");
        if (optimizer != "sgd" && optimizer != "adagrad") throw ConfigError("optimizer must be sgd or adagrad");
    }
    friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

// Softmax regression: logits = W x + b with W stored row-major (K x V).
struct ModelParams {
    std::vector<WorkingGroup> label_set;
    std::size_t n_features = 0;
    std::vector<double> W;
    std::vector<double> b;
    Hyperparams trained_config;
    std::string vocab_fingerprint;

    ModelParams() = default;
    ModelParams(std::vector<WorkingGroup> labels, std::size_t v, std::string fingerprint)
        : label_set(std::move(labels)), n_features(v), W(label_set.size() * v, 0.0), b(label_set.size(), 0.0),
          vocab_fingerprint(std::move(fingerprint)) {
        if (label_set.size() < 2) throw InvalidInput("a classifier needs at least two labels");
    }

    std::size_t n_classes() const { return label_set.size(); }
    double& w(std::size_t k, std::size_t j) { return W[k * n_features + j]; }
    double w(std::size_t k, std::size_t j) const { return W[k * n_features + j]; }
    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct Example {
    FeatureVector x;
    std::size_t y = 0;  // position in label_set
};

struct Gradient {
    std::vector<double> W;
    std::vector<double> b;
};

namespace detail {

inline void check_vector(const ModelParams& p, const FeatureVector& x) {
    for (const auto& [j, v] : x.entries) {
        if (j >= p.n_features) throw InvalidInput("feature index " + std::to_string(j) + " out of range");
        if (!std::isfinite(v)) throw InvalidInput("non-finite feature value at index " + std::to_string(j));
    }
}

inline void logits_into(const ModelParams& p, const FeatureVector& x, std::vector<double>& z) {
    z.assign(p.b.begin(), p.b.end());
    for (std::size_t k = 0; k < p.n_classes(); ++k) {
        const double* row = &p.W[k * p.n_features];
        double s = 0;
        for (const auto& [j, v] : x.entries) s += row[j] * v;
        z[k] += s;
    }
}

// In place: z becomes softmax(z); returns log-sum-exp of the input.
inline double softmax_inplace(std::vector<double>& z) {
    double m = *std::max_element(z.begin(), z.end());
    double sum = 0;
    for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : z) v /= sum;
    return m + std::log(sum);
}

}  // namespace detail

// Mean cross-entropy over the batch plus (l2 / 2) * ||W||_F^2 (the bias is
// not regularized), and its exact gradient.
inline double loss_and_grad(const ModelParams& p, std::span<const Example> batch, double l2, Gradient* grad) {
    if (batch.empty()) throw InvalidInput("loss_and_grad needs a non-empty batch");
    const std::size_t K = p.n_classes();
    if (grad) {
        grad->W.assign(p.W.size(), 0.0);
        grad->b.assign(K, 0.0);
    }
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double loss = 0;
    std::vector<double> z;
    for (const auto& ex : batch) {
        detail::check_vector(p, ex.x);
        if (ex.y >= K) throw InvalidInput("label index " + std::to_string(ex.y) + " out of range");
        detail::logits_into(p, ex.x, z);
        double zy = z[ex.y];
        loss += detail::softmax_inplace(z) - zy;
        if (!grad) continue;
        for (std::size_t k = 0; k < K; ++k) {
            double d = (z[k] - (k == ex.y ? 1.0 : 0.0)) * inv_n;
            grad->b[k] += d;
            double* row = &grad->W[k * p.n_features];
            for (const auto& [j, v] : ex.x.entries) row[j] += d * v;
        }
    }
    loss *= inv_n;
    double sq = 0;
    for (double v : p.W) sq += v * v;
    loss += 0.5 * l2 * sq;
    if (grad)
        for (std::size_t i = 0; i < p.W.size(); ++i) grad->W[i] += l2 * p.W[i];
    return loss;
}

inline std::vector<double> predict_proba(const ModelParams& p, const FeatureVector& x) {
    if (x.vocab_fingerprint != p.vocab_fingerprint)
        throw InvalidInput("feature vector was built with vocabulary " + x.vocab_fingerprint + ", model expects " +
                           p.vocab_fingerprint);
    detail::check_vector(p, x);
    std::vector<double> z;
    detail::logits_into(p, x, z);
    detail::softmax_inplace(z);
    return z;
}

// Index of the largest entry; ties go to the lowest index.
inline std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] > v[best]) best = k;
    return best;
}

inline std::size_t predict_index(const ModelParams& p, const FeatureVector& x) { return argmax(predict_proba(p, x)); }

inline WorkingGroup predict(const ModelParams& p, const FeatureVector& x) { return p.label_set[predict_index(p, x)]; }

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::ordered_json hyperparams_json(const Hyperparams& hp) {
    return {{"batch_size", hp.batch_size}, {"learning_rate", hp.learning_rate}, {"l2", hp.l2},
            {"epochs", hp.epochs},         {"seed", hp.seed},                   {"early_stop_patience", hp.early_stop_patience},
            {"optimizer", hp.optimizer}};
}

inline Hyperparams hyperparams_from_json(const nlohmann::json& j) {
    Hyperparams hp;
    hp.batch_size = j.value("batch_size", hp.batch_size);
    hp.learning_rate = j.value("learning_rate", hp.learning_rate);
    hp.l2 = j.value("l2", hp.l2);
    hp.epochs = j.value("epochs", hp.epochs);
    hp.seed = j.value("seed", hp.seed);
    hp.early_stop_patience = j.value("early_stop_patience", hp.early_stop_patience);
    hp.optimizer = j.value("optimizer", hp.optimizer);
    return hp;
}

// Dense rows of W; doubles are written in shortest round-trip form.
inline nlohmann::ordered_json model_to_json(const ModelParams& p) {
    nlohmann::ordered_json j;
    j["format_version"] = kModelFormatVersion;
    j["label_set"] = wg_names(p.label_set);
    j["n_features"] = p.n_features;
    j["vocab_fingerprint"] = p.vocab_fingerprint;
    j["config"] = hyperparams_json(p.trained_config);
    j["b"] = p.b;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < p.n_classes(); ++k)
        rows.push_back(std::vector<double>(p.W.begin() + static_cast<std::ptrdiff_t>(k * p.n_features),
                                           p.W.begin() + static_cast<std::ptrdiff_t>((k + 1) * p.n_features)));
    j["W"] = std::move(rows);
    return j;
}

inline ModelParams model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format_version").get<int>() != kModelFormatVersion) throw SchemaError("unsupported model format_version");
        std::vector<WorkingGroup> labels;
        for (const auto& name : j.at("label_set")) labels.push_back(wg_from_name(name.get<std::string>()));
        ModelParams p(labels, j.at("n_features").get<std::size_t>(), j.at("vocab_fingerprint").get<std::string>());
        p.trained_config = hyperparams_from_json(j.at("config"));
        p.b = j.at("b").get<std::vector<double>>();
        const auto& rows = j.at("W");
        if (p.b.size() != p.n_classes() || rows.size() != p.n_classes())
            throw SchemaError("model has " + std::to_string(rows.size()) + " weight rows for " +
                              std::to_string(p.n_classes()) + " labels");
        for (std::size_t k = 0; k < rows.size(); ++k) {
            auto row = rows[k].get<std::vector<double>>();
            if (row.size() != p.n_features) throw SchemaError("weight row " + std::to_string(k) + " has wrong length");
            std::copy(row.begin(), row.end(), p.W.begin() + static_cast<std::ptrdiff_t>(k * p.n_features));
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("model: ") + e.what());
    } catch (const InvalidInput& e) {
        throw SchemaError(std::string("model: ") + e.what());
    }
}

}  // namespace tdoc::classifier
