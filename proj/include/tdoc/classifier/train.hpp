#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdoc/classifier/model.hpp"
#include "tdoc/error.hpp"
#include "tdoc/util/parallel.hpp"
#include "tdoc/util/random.hpp"

namespace tdoc::classifier {

struct EpochLog {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0;  // mean objective over the epoch's batches
    double validation_accuracy = 0;
    double validation_loss = 0;  // cross-entropy only
    bool improved = false;
};

struct TrainResult {
    ModelParams params;  // best-validation parameters
    std::vector<EpochLog> log;
    std::size_t best_epoch = 0;
    double best_validation_accuracy = 0;
};

inline nlohmann::ordered_json training_log_json(const TrainResult& r) {
    nlohmann::ordered_json j;
    j["best_epoch"] = r.best_epoch;
    j["best_validation_accuracy"] = r.best_validation_accuracy;
    j["epochs"] = nlohmann::ordered_json::array();
    for (const auto& e : r.log)
        j["epochs"].push_back({{"epoch", e.epoch},
                               {"train_loss", e.train_loss},
                               {"validation_accuracy", e.validation_accuracy},
                               {"validation_loss", e.validation_loss},
                               {"improved", e.improved}});
    return j;
}

// Accuracy and mean cross-entropy of params on examples. Predictions are
// computed in parallel into fixed slots and summed in index order.
inline std::pair<double, double> accuracy_and_loss(const ModelParams& p, const std::vector<Example>& examples,
                                                   std::size_t threads = 1) {
    std::vector<double> losses(examples.size());
    std::vector<char> correct(examples.size());
    parallel_for(examples.size(), threads, [&](std::size_t i) {
        std::vector<double> z;
        detail::check_vector(p, examples[i].x);
        detail::logits_into(p, examples[i].x, z);
        double zy = z[examples[i].y];
        losses[i] = detail::softmax_inplace(z) - zy;
        correct[i] = argmax(z) == examples[i].y;
    });
    double loss = 0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        loss += losses[i];
        hits += correct[i] ? 1 : 0;
    }
    double n = static_cast<double>(examples.size());
    return {static_cast<double>(hits) / n, loss / n};
}

namespace detail {

// One plain gradient step on the batch: W <- (1 - lr*l2) W - lr * dCE/dW,
// b <- b - lr * dCE/db, touching only the batch's feature columns for the
// data term. Returns the batch objective before the step.
inline double sgd_step(ModelParams& p, const std::vector<const Example*>& batch, double lr, double l2) {
    const std::size_t K = p.n_classes();
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double sq = 0;
    for (double v : p.W) sq += v * v;
    double loss = 0.5 * l2 * sq;

    std::vector<std::vector<double>> deltas(batch.size());
    std::vector<double> z;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& ex = *batch[i];
        logits_into(p, ex.x, z);
        double zy = z[ex.y];
        loss += (softmax_inplace(z) - zy) * inv_n;
        for (std::size_t k = 0; k < K; ++k) z[k] = (z[k] - (k == ex.y ? 1.0 : 0.0)) * inv_n;
        deltas[i] = z;
    }
    if (l2 > 0) {
        const double decay = 1.0 - lr * l2;
        for (double& v : p.W) v *= decay;
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
        for (std::size_t k = 0; k < K; ++k) {
            double d = lr * deltas[i][k];
            p.b[k] -= d;
            double* row = &p.W[k * p.n_features];
            for (const auto& [j, v] : batch[i]->x.entries) row[j] -= d * v;
        }
    }
    return loss;
}

class Adagrad {
public:
    explicit Adagrad(const ModelParams& p) : gW_(p.W.size(), 0.0), gb_(p.b.size(), 0.0) {}

    double step(ModelParams& p, const std::vector<const Example*>& batch, double lr, double l2) {
        std::vector<Example> copy;
        copy.reserve(batch.size());
        for (const Example* ex : batch) copy.push_back(*ex);
        Gradient g;
        double loss = loss_and_grad(p, copy, l2, &g);
        apply(p.W, gW_, g.W, lr);
        apply(p.b, gb_, g.b, lr);
        return loss;
    }

private:
    static void apply(std::vector<double>& w, std::vector<double>& acc, const std::vector<double>& g, double lr) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc[i] += g[i] * g[i];
            w[i] -= lr * g[i] / (std::sqrt(acc[i]) + 1e-10);
        }
    }
    std::vector<double> gW_, gb_;
};

}  // namespace detail

// Mini-batch training from zero weights. Each epoch visits the training set
// in a fresh seeded permutation; the parameters with the best validation
// accuracy so far are kept, and training stops after early_stop_patience
// epochs without improvement (0 disables early stopping).
inline TrainResult train(const std::vector<Example>& train_set, const std::vector<Example>& validation_set,
                         const std::vector<WorkingGroup>& label_set, std::size_t n_features,
                         const std::string& vocab_fingerprint, const Hyperparams& hp, std::size_t threads = 1,
                         const std::function<void(const EpochLog&)>& on_epoch = {}) {
    hp.check();
    if (train_set.empty()) throw InvalidInput("training set is empty");
    if (validation_set.empty()) throw InvalidInput("validation set is empty");
    ModelParams p(label_set, n_features, vocab_fingerprint);
    p.trained_config = hp;
    for (const auto* set : {&train_set, &validation_set})
        for (const auto& ex : *set) {
            if (ex.y >= p.n_classes()) throw InvalidInput("label index " + std::to_string(ex.y) + " outside label_set");
            if (ex.x.vocab_fingerprint != vocab_fingerprint) throw InvalidInput("example built with a different vocabulary");
            detail::check_vector(p, ex.x);
        }

    TrainResult result;
    result.params = p;
    result.best_validation_accuracy = -1;
    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(hp.seed, 10));
    detail::Adagrad adagrad(p);
    std::vector<const Example*> batch;
    std::size_t stale = 0;

    for (std::size_t epoch = 1; epoch <= hp.epochs; ++epoch) {
        rng.shuffle(order);
        double total = 0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
            std::size_t end = std::min(start + hp.batch_size, order.size());
            batch.clear();
            for (std::size_t i = start; i < end; ++i) batch.push_back(&train_set[order[i]]);
            double loss = (hp.optimizer == "adagrad") ? adagrad.step(p, batch, hp.learning_rate, hp.l2)
                                                      : detail::sgd_step(p, batch, hp.learning_rate, hp.l2);
            ++batches;
            if (!std::isfinite(loss))
                throw TrainingError("loss became non-finite at epoch " + std::to_string(epoch) + ", batch " +
                                    std::to_string(batches));
            total += loss;
        }
        for (double v : p.b)
            if (!std::isfinite(v)) throw TrainingError("parameters became non-finite at epoch " + std::to_string(epoch));

        EpochLog log;
        log.epoch = epoch;
        log.train_loss = total / static_cast<double>(batches);
        std::tie(log.validation_accuracy, log.validation_loss) = accuracy_and_loss(p, validation_set, threads);
        if (log.validation_accuracy > result.best_validation_accuracy) {
            log.improved = true;
            result.params = p;
            result.best_epoch = epoch;
            result.best_validation_accuracy = log.validation_accuracy;
            stale = 0;
        } else {
            ++stale;
        }
        result.log.push_back(log);
        if (on_epoch) on_epoch(log);
        if (hp.early_stop_patience > 0 && stale >= hp.early_stop_patience) break;
    }
    if (result.best_epoch == 0) result.best_validation_accuracy = accuracy_and_loss(p, validation_set, threads).first;
    return result;
}

}  // namespace tdoc::classifier
