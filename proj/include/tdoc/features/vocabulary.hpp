#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdoc/error.hpp"
#include "tdoc/preprocess/words.hpp"
#include "tdoc/util/hash.hpp"
#include "tdoc/util/parallel.hpp"
#include "tdoc/util/text.hpp"

namespace tdoc::features {

struct VocabConfig {
    std::size_t min_df = 2;
    std::size_t max_features = 50000;  // 0: no cap
    bool lowercase = true;
    bool bigrams = false;
    friend bool operator==(const VocabConfig&, const VocabConfig&) = default;
};

// Terms of one text: the count_words tokens, optionally lowercased, followed
// by adjacent pairs joined with a space when bigrams are enabled.
inline std::vector<std::string> terms_of(std::string_view text, const VocabConfig& config) {
    std::vector<std::string> terms = preprocess::words(text);
    if (config.lowercase)
        for (auto& t : terms) t = text::to_lower(t);
    if (config.bigrams) {
        std::size_t n = terms.size();
        for (std::size_t i = 0; i + 1 < n; ++i) terms.push_back(terms[i] + " " + terms[i + 1]);
    }
    return terms;
}

class Vocabulary {
public:
    struct Term {
        std::string text;
        std::size_t df = 0;
    };

    Vocabulary() = default;

    // Terms must already be in index order.
    Vocabulary(VocabConfig config, std::size_t n_docs_fitted, std::vector<Term> terms)
        : config_(config), n_docs_(n_docs_fitted), terms_(std::move(terms)) {
        index_.reserve(terms_.size());
        idf_.reserve(terms_.size());
        Fnv1a h;
        h.field(std::to_string(config_.min_df)).field(std::to_string(config_.max_features));
        h.field(config_.lowercase ? "1" : "0").field(config_.bigrams ? "1" : "0");
        h.field(std::to_string(n_docs_));
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            const auto& t = terms_[i];
            if (t.df == 0 || t.df > n_docs_) throw InvalidInput("term '" + t.text + "' has document frequency outside [1, n_docs]");
            if (!index_.emplace(t.text, i).second) throw InvalidInput("duplicate vocabulary term '" + t.text + "'");
            idf_.push_back(std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + static_cast<double>(t.df))) + 1.0);
            h.field(t.text).field(std::to_string(t.df));
        }
        fingerprint_ = h.hex();
    }

    const VocabConfig& config() const { return config_; }
    std::size_t n_docs_fitted() const { return n_docs_; }
    std::size_t size() const { return terms_.size(); }
    const std::vector<Term>& terms() const { return terms_; }
    const std::string& fingerprint() const { return fingerprint_; }
    double idf(std::size_t index) const { return idf_.at(index); }

    std::optional<std::size_t> index_of(const std::string& term) const {
        auto it = index_.find(term);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    VocabConfig config_;
    std::size_t n_docs_ = 0;
    std::vector<Term> terms_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> idf_;
    std::string fingerprint_;
};

// Document frequency over the given texts (training segments only), then
// min_df, then the max_features cut in (df descending, term ascending) order.
inline Vocabulary fit_vocabulary(const std::vector<std::string_view>& texts, const VocabConfig& config,
                                 std::size_t threads = 1) {
    if (texts.empty()) throw InvalidInput("cannot fit a vocabulary on zero segments");
    const std::size_t n = texts.size();
    const std::size_t chunks = std::min<std::size_t>(n, 4 * resolve_threads(threads));
    std::vector<std::unordered_map<std::string, std::size_t>> partial(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        for (std::size_t i = c * n / chunks; i < (c + 1) * n / chunks; ++i) {
            auto terms = terms_of(texts[i], config);
            std::unordered_set<std::string> unique(terms.begin(), terms.end());
            for (const auto& t : unique) ++partial[c][t];
        }
    });
    std::unordered_map<std::string, std::size_t> df;
    for (auto& p : partial)
        for (auto& [t, c] : p) df[t] += c;

    std::vector<Vocabulary::Term> kept;
    for (auto& [t, c] : df)
        if (c >= config.min_df) kept.push_back({t, c});
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return a.df != b.df ? a.df > b.df : a.text < b.text;
    });
    if (config.max_features > 0 && kept.size() > config.max_features) kept.resize(config.max_features);
    return Vocabulary(config, n, std::move(kept));
}

inline Vocabulary fit_vocabulary(const std::vector<std::string>& texts, const VocabConfig& config, std::size_t threads = 1) {
    return fit_vocabulary(std::vector<std::string_view>(texts.begin(), texts.end()), config, threads);
}

// Sparse, sorted by index, L2-normalized (or empty).
struct FeatureVector {
    std::vector<std::pair<std::uint32_t, double>> entries;
    std::string vocab_fingerprint;

    double norm() const {
        double s = 0;
        for (const auto& [_, w] : entries) s += w * w;
        return std::sqrt(s);
    }
    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// tf * (ln((1 + n) / (1 + df)) + 1), then L2 normalization. Terms outside
// the vocabulary are ignored; no in-vocabulary term gives the zero vector.
inline FeatureVector transform(std::string_view text, const Vocabulary& vocab) {
    std::unordered_map<std::size_t, std::size_t> tf;
    for (const auto& t : terms_of(text, vocab.config()))
        if (auto idx = vocab.index_of(t)) ++tf[*idx];
    FeatureVector v;
    v.vocab_fingerprint = vocab.fingerprint();
    v.entries.reserve(tf.size());
    for (const auto& [idx, count] : tf)
        v.entries.emplace_back(static_cast<std::uint32_t>(idx), static_cast<double>(count) * vocab.idf(idx));
    std::sort(v.entries.begin(), v.entries.end());
    double norm = v.norm();
    if (norm > 0)
        for (auto& [_, w] : v.entries) w /= norm;
    return v;
}

inline std::vector<FeatureVector> transform_all(const std::vector<std::string_view>& texts, const Vocabulary& vocab,
                                                std::size_t threads = 1) {
    std::vector<FeatureVector> out(texts.size());
    parallel_for(texts.size(), threads, [&](std::size_t i) { out[i] = transform(texts[i], vocab); });
    return out;
}

inline nlohmann::ordered_json vocab_config_json(const VocabConfig& c) {
    return {{"min_df", c.min_df}, {"max_features", c.max_features}, {"lowercase", c.lowercase}, {"bigrams", c.bigrams}};
}

inline VocabConfig vocab_config_from_json(const nlohmann::json& j) {
    VocabConfig c;
    c.min_df = j.value("min_df", c.min_df);
    c.max_features = j.value("max_features", c.max_features);
    c.lowercase = j.value("lowercase", c.lowercase);
    c.bigrams = j.value("bigrams", c.bigrams);
    return c;
}

// {config, n_docs_fitted, terms: [[term, index, df], ...]} in index order.
inline nlohmann::ordered_json vocabulary_to_json(const Vocabulary& v) {
    nlohmann::ordered_json j;
    j["config"] = vocab_config_json(v.config());
    j["n_docs_fitted"] = v.n_docs_fitted();
    j["fingerprint"] = v.fingerprint();
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < v.size(); ++i) terms.push_back({v.terms()[i].text, i, v.terms()[i].df});
    j["terms"] = std::move(terms);
    return j;
}

inline Vocabulary vocabulary_from_json(const nlohmann::json& j) {
    try {
        std::vector<Vocabulary::Term> terms;
        const auto& arr = j.at("terms");
        terms.reserve(arr.size());
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto& row = arr[i];
            if (!row.is_array() || row.size() != 3 || row[1].get<std::size_t>() != i)
                throw SchemaError("vocabulary term " + std::to_string(i) + " is not [term, " + std::to_string(i) + ", df]");
            terms.push_back({row[0].get<std::string>(), row[2].get<std::size_t>()});
        }
        Vocabulary v(vocab_config_from_json(j.at("config")), j.at("n_docs_fitted").get<std::size_t>(), std::move(terms));
        if (j.contains("fingerprint") && j["fingerprint"].get<std::string>() != v.fingerprint())
            throw SchemaError("vocabulary fingerprint does not match its contents");
        return v;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("vocabulary: ") + e.what());
    } catch (const InvalidInput& e) {
        throw SchemaError(std::string("vocabulary: ") + e.what());
    }
}

}  // namespace tdoc::features
