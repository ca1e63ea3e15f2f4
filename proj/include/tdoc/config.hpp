#pragma once

// The master JSON configuration: one document with a section per pipeline
// stage. Missing keys take their defaults; unknown keys are a ConfigError so
// that typos do not silently fall back to defaults.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdoc/classifier/model.hpp"
#include "tdoc/dataset/manifest.hpp"
#include "tdoc/dataset/synthetic.hpp"
#include "tdoc/error.hpp"
#include "tdoc/evaluate/experiment.hpp"
#include "tdoc/features/vocabulary.hpp"
#include "tdoc/ingest/types.hpp"
#include "tdoc/preprocess/clean.hpp"

namespace tdoc::config {

using Json = nlohmann::ordered_json;

struct SweepConfig {
    std::vector<double> fractions{0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::vector<std::size_t> caps{25, 50, 100, 150, 200};
    std::vector<std::vector<WorkingGroup>> combos = evaluate::default_wg_combos();
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::size_t threads = 0;  // 0: all cores
    ingest::IngestConfig ingest;
    preprocess::PreprocessConfig preprocess;
    dataset::SplitPolicy split;
    dataset::SyntheticCorpusSpec synthetic;
    features::VocabConfig features;
    classifier::Hyperparams classifier;
    SweepConfig sweep;

    // The global seed feeds every seeded stage.
    dataset::SplitPolicy split_policy() const {
        auto p = split;
        p.seed = seed;
        p.max_words = preprocess.max_words;
        return p;
    }
    dataset::SyntheticCorpusSpec synthetic_spec() const {
        auto s = synthetic;
        s.seed = seed;
        return s;
    }
    evaluate::FitConfig fit_config() const {
        evaluate::FitConfig f;
        f.vocab = features;
        f.hp = classifier;
        f.hp.seed = seed;
        f.threads = threads;
        return f;
    }
};

namespace detail {

// Reads keys from one JSON object and rejects keys nobody asked for.
class Section {
public:
    Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + "must be an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(path_ + "." + key + " has the wrong type");
        }
    }
    bool has(const char* key) {
        seen_.insert(key);
        return j_.contains(key);
    }
    const nlohmann::json& at(const char* key) const { return j_.at(key); }
    std::string child(const char* key) const { return path_ + "." + key; }

    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!seen_.count(key)) throw ConfigError("unknown config key " + path_ + "." + key);
    }

private:
    std::string where() const { return path_ + " "; }
    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline WorkingGroup wg_value(const nlohmann::json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path + " must be a working group name");
    auto wg = parse_wg(v.get<std::string>());
    if (!wg) throw ConfigError(path + ": unknown working group " + v.get<std::string>());
    return *wg;
}

inline std::vector<WorkingGroup> wg_list(const nlohmann::json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path + " must be an array of working group names");
    std::vector<WorkingGroup> out;
    for (const auto& e : v) out.push_back(wg_value(e, path));
    return out;
}

inline dataset::YearRange year_range(const nlohmann::json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw ConfigError(path + " must be [first_year, last_year]");
    return {v[0].get<int>(), v[1].get<int>()};
}

inline void read_ingest(const nlohmann::json& j, ingest::IngestConfig& c) {
    Section s(j, "ingest");
    std::string root = c.root.string();
    s.get("root", root);
    c.root = root;
    if (s.has("prefix_map")) {
        const auto& m = s.at("prefix_map");
        if (!m.is_object()) throw ConfigError("ingest.prefix_map must be an object");
        c.prefix_map.clear();
        for (const auto& [prefix, wg] : m.items()) c.prefix_map[prefix] = wg_value(wg, "ingest.prefix_map." + prefix);
    }
    if (s.has("year_bounds")) {
        Section y(s.at("year_bounds"), s.child("year_bounds"));
        y.get("min", c.year_bounds.min);
        y.get("max", c.year_bounds.max);
        y.finish();
        if (c.year_bounds.min > c.year_bounds.max) throw ConfigError("ingest.year_bounds has min > max");
    }
    s.get("nested_zip_depth", c.nested_zip_depth);
    if (c.nested_zip_depth < 0) throw ConfigError("ingest.nested_zip_depth must be non-negative");
    s.get("external_doc_converter", c.external_doc_converter);
    s.get("template_patterns", c.template_patterns);
    s.get("cr_filename_markers", c.cr_filename_markers);
    s.get("draft_markers", c.draft_markers);
    s.get("year_from_digits", c.year_from_digits);
    s.finish();
}

inline void read_preprocess(const nlohmann::json& j, preprocess::PreprocessConfig& c) {
    Section s(j, "preprocess");
    s.get("min_doc_words", c.min_doc_words);
    s.get("max_words", c.max_words);
    s.get("min_tail_words", c.min_tail_words);
    if (s.has("boilerplate")) {
        Section b(s.at("boilerplate"), s.child("boilerplate"));
        b.get("caption_prefixes", c.boilerplate.caption_prefixes);
        b.get("repeated_line_threshold", c.boilerplate.repeated_line_threshold);
        b.get("pseudo_code_min_lines", c.boilerplate.pseudo_code_min_lines);
        b.get("max_paragraph_words", c.boilerplate.max_paragraph_words);
        b.finish();
    }
    s.finish();
    if (c.max_words < 1) throw ConfigError("preprocess.max_words must be at least 1");
}

inline void read_split(const nlohmann::json& j, dataset::SplitPolicy& p) {
    Section s(j, "dataset.split");
    if (s.has("train_years")) p.train_years = year_range(s.at("train_years"), s.child("train_years"));
    if (s.has("test_years")) p.test_years = year_range(s.at("test_years"), s.child("test_years"));
    s.get("validation_fraction", p.validation_fraction);
    s.get("balance", p.balance);
    s.finish();
    p.check();
}

inline void read_synthetic(const nlohmann::json& j, dataset::SyntheticCorpusSpec& c) {
    Section s(j, "dataset.synthetic");
    if (s.has("wgs")) c.wgs = wg_list(s.at("wgs"), s.child("wgs"));
    s.get("alpha", c.alpha);
    s.get("tsg_overlap", c.tsg_overlap);
    s.get("core_vocab_size", c.core_vocab_size);
    s.get("shared_vocab_size", c.shared_vocab_size);
    s.get("tsg_vocab_size", c.tsg_vocab_size);
    if (s.has("core_vocab")) {
        const auto& m = s.at("core_vocab");
        if (!m.is_object()) throw ConfigError("dataset.synthetic.core_vocab must be an object");
        c.core_vocab.clear();
        for (const auto& [name, words] : m.items()) {
            if (!words.is_array()) throw ConfigError("dataset.synthetic.core_vocab." + name + " must be a word list");
            c.core_vocab[wg_value(name, "dataset.synthetic.core_vocab")] = words.get<std::vector<std::string>>();
        }
    }
    s.get("shared_vocab", c.shared_vocab);
    s.get("docs_per_wg", c.docs_per_wg);
    s.get("words_per_doc", c.words_per_doc);
    s.get("years", c.years);
    if (s.has("noise")) {
        Section n(s.at("noise"), s.child("noise"));
        n.get("url", c.noise.url);
        n.get("html", c.noise.html);
        n.get("table", c.noise.table);
        n.get("references", c.noise.references);
        n.get("header_repeats", c.noise.header_repeats);
        n.finish();
    }
    s.get("zip", c.zip);
    s.get("docx_fraction", c.docx_fraction);
    s.get("html_fraction", c.html_fraction);
    s.get("change_request_fraction", c.change_request_fraction);
    s.finish();
    c.check();
}

inline void read_features(const nlohmann::json& j, features::VocabConfig& c) {
    Section s(j, "features");
    s.get("min_df", c.min_df);
    s.get("max_features", c.max_features);
    s.get("lowercase", c.lowercase);
    s.get("bigrams", c.bigrams);
    s.finish();
    if (c.min_df < 1) throw ConfigError("features.min_df must be at least 1");
}

inline void read_classifier(const nlohmann::json& j, classifier::Hyperparams& hp) {
    Section s(j, "classifier");
    s.get("batch_size", hp.batch_size);
    s.get("learning_rate", hp.learning_rate);
    s.get("l2", hp.l2);
    s.get("epochs", hp.epochs);
    s.get("early_stop_patience", hp.early_stop_patience);
    s.get("optimizer", hp.optimizer);
    s.finish();
    hp.check();
}

inline void read_sweep(const nlohmann::json& j, SweepConfig& c) {
    Section s(j, "sweep");
    s.get("fractions", c.fractions);
    s.get("seeds", c.seeds);
    s.get("caps", c.caps);
    if (s.has("combos")) {
        const auto& v = s.at("combos");
        if (!v.is_array()) throw ConfigError("sweep.combos must be an array of working group lists");
        c.combos.clear();
        for (const auto& combo : v) c.combos.push_back(wg_list(combo, "sweep.combos"));
    }
    s.finish();
    for (double f : c.fractions)
        if (!(f > 0.0 && f <= 1.0)) throw ConfigError("sweep.fractions must lie in (0, 1]");
    for (std::size_t cap : c.caps)
        if (cap < 1) throw ConfigError("sweep.caps must be at least 1");
    if (c.fractions.empty() || c.seeds.empty() || c.caps.empty() || c.combos.empty())
        throw ConfigError("sweep lists must not be empty");
}

}  // namespace detail

inline RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    detail::Section s(j, "config");
    s.get("seed", c.seed);
    s.get("threads", c.threads);
    if (s.has("ingest")) detail::read_ingest(s.at("ingest"), c.ingest);
    if (s.has("preprocess")) detail::read_preprocess(s.at("preprocess"), c.preprocess);
    if (s.has("dataset")) {
        detail::Section d(s.at("dataset"), "dataset");
        if (d.has("split")) detail::read_split(d.at("split"), c.split);
        if (d.has("synthetic")) detail::read_synthetic(d.at("synthetic"), c.synthetic);
        d.finish();
    }
    if (s.has("features")) detail::read_features(s.at("features"), c.features);
    if (s.has("classifier")) detail::read_classifier(s.at("classifier"), c.classifier);
    if (s.has("sweep")) detail::read_sweep(s.at("sweep"), c.sweep);
    s.finish();
    return c;
}

inline RunConfig load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return from_json(j);
}

// The fully resolved configuration; from_json(to_json(c)) reproduces c.
inline Json to_json(const RunConfig& c) {
    Json j;
    j["seed"] = c.seed;
    j["threads"] = c.threads;

    Json in;
    in["root"] = c.ingest.root.string();
    Json prefixes = Json::object();
    for (const auto& [prefix, wg] : c.ingest.prefix_map) prefixes[prefix] = std::string(wg_name(wg));
    in["prefix_map"] = prefixes;
    in["year_bounds"] = {{"min", c.ingest.year_bounds.min}, {"max", c.ingest.year_bounds.max}};
    in["nested_zip_depth"] = c.ingest.nested_zip_depth;
    in["external_doc_converter"] = c.ingest.external_doc_converter;
    in["template_patterns"] = c.ingest.template_patterns;
    in["cr_filename_markers"] = c.ingest.cr_filename_markers;
    in["draft_markers"] = c.ingest.draft_markers;
    in["year_from_digits"] = c.ingest.year_from_digits;
    j["ingest"] = in;

    const auto& bp = c.preprocess.boilerplate;
    j["preprocess"] = {{"min_doc_words", c.preprocess.min_doc_words},
                       {"max_words", c.preprocess.max_words},
                       {"min_tail_words", c.preprocess.min_tail_words},
                       {"boilerplate",
                        {{"caption_prefixes", bp.caption_prefixes},
                         {"repeated_line_threshold", bp.repeated_line_threshold},
                         {"pseudo_code_min_lines", bp.pseudo_code_min_lines},
                         {"max_paragraph_words", bp.max_paragraph_words}}}};

    Json split = {{"train_years", {c.split.train_years.first, c.split.train_years.last}},
                  {"test_years", {c.split.test_years.first, c.split.test_years.last}},
                  {"validation_fraction", c.split.validation_fraction},
                  {"balance", c.split.balance}};
    const auto& sy = c.synthetic;
    Json core = Json::object();
    for (const auto& [wg, words] : sy.core_vocab) core[std::string(wg_name(wg))] = words;
    Json synth = {{"wgs", wg_names(sy.wgs)},
                  {"alpha", sy.alpha},
                  {"tsg_overlap", sy.tsg_overlap},
                  {"core_vocab_size", sy.core_vocab_size},
                  {"shared_vocab_size", sy.shared_vocab_size},
                  {"tsg_vocab_size", sy.tsg_vocab_size},
                  {"core_vocab", core},
                  {"shared_vocab", sy.shared_vocab},
                  {"docs_per_wg", sy.docs_per_wg},
                  {"words_per_doc", sy.words_per_doc},
                  {"years", sy.years},
                  {"noise",
                   {{"url", sy.noise.url},
                    {"html", sy.noise.html},
                    {"table", sy.noise.table},
                    {"references", sy.noise.references},
                    {"header_repeats", sy.noise.header_repeats}}},
                  {"zip", sy.zip},
                  {"docx_fraction", sy.docx_fraction},
                  {"html_fraction", sy.html_fraction},
                  {"change_request_fraction", sy.change_request_fraction}};
    j["dataset"] = {{"split", split}, {"synthetic", synth}};

    j["features"] = features::vocab_config_json(c.features);
    auto hp = classifier::hyperparams_json(c.classifier);
    hp.erase("seed");
    j["classifier"] = hp;

    Json combos = Json::array();
    for (const auto& combo : c.sweep.combos) combos.push_back(wg_names(combo));
    j["sweep"] = {{"fractions", c.sweep.fractions},
                  {"seeds", c.sweep.seeds},
                  {"caps", c.sweep.caps},
                  {"combos", combos}};
    return j;
}

}  // namespace tdoc::config
