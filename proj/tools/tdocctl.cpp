// tdocctl: synth, ingest, build-dataset, train, evaluate, sweep and
// validate-predictions behind one executable driven by the master config.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tdoc/classifier/train.hpp"
#include "tdoc/config.hpp"
#include "tdoc/dataset/build.hpp"
#include "tdoc/dataset/export.hpp"
#include "tdoc/dataset/synthetic.hpp"
#include "tdoc/evaluate/experiment.hpp"
#include "tdoc/evaluate/predictions_io.hpp"
#include "tdoc/features/vocabulary.hpp"
#include "tdoc/ingest/pipeline.hpp"
#include "tdoc/preprocess/cleandoc_io.hpp"
#include "tdoc/util/hash.hpp"
#include "tdoc/util/log.hpp"

namespace fs = std::filesystem;
using namespace tdoc;
using Json = nlohmann::ordered_json;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    bool force = false;
    bool quiet = false;
};

class UsageError : public Error {
public:
    using Error::Error;
};

config::RunConfig resolve_config(const Globals& g) {
    config::RunConfig c = g.config_path.empty() ? config::RunConfig{} : config::load(g.config_path);
    if (g.seed) c.seed = *g.seed;
    if (g.threads) c.threads = *g.threads;
    return c;
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string file_fingerprint(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    Fnv1a h;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        h.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
    }
    return h.hex();
}

// Relative paths and contents of every regular file under root, in path order.
std::string tree_fingerprint(const fs::path& root, const std::set<std::string>& skip = {}) {
    std::vector<std::string> rels;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) {
            auto rel = fs::relative(e.path(), root).generic_string();
            if (!skip.count(rel)) rels.push_back(rel);
        }
    std::sort(rels.begin(), rels.end());
    Fnv1a h;
    for (const auto& rel : rels) h.field(rel).field(file_fingerprint(root / rel));
    return h.hex();
}

std::string dataset_fingerprint(const fs::path& dir) {
    Fnv1a h;
    h.field(file_fingerprint(dir / dataset::kSidecarName));
    for (const auto& name : dataset::split_names()) h.field(file_fingerprint(dir / dataset::split_file_name(name)));
    return h.hex();
}

// An output directory that refuses to replace existing artifacts unless
// forced. Every artifact is checked before anything is written.
class OutDir {
public:
    OutDir(fs::path dir, std::vector<std::string> artifacts, bool force)
        : dir_(std::move(dir)), artifacts_(std::move(artifacts)) {
        artifacts_.push_back("run_manifest.json");
        if (fs::exists(dir_) && !fs::is_directory(dir_)) throw Error(dir_.string() + " exists and is not a directory");
        if (!force)
            for (const auto& a : artifacts_)
                if (fs::exists(dir_ / a))
                    throw Error("refusing to overwrite " + (dir_ / a).string() + " (pass --force)");
        fs::create_directories(dir_);
    }

    fs::path path(const std::string& name) const { return dir_ / name; }
    const fs::path& dir() const { return dir_; }

    // Registers every file already under the directory as an artifact.
    void adopt_tree() {
        std::vector<std::string> found;
        for (const auto& e : fs::recursive_directory_iterator(dir_))
            if (e.is_regular_file()) found.push_back(fs::relative(e.path(), dir_).generic_string());
        std::sort(found.begin(), found.end());
        for (auto& rel : found)
            if (std::find(artifacts_.begin(), artifacts_.end(), rel) == artifacts_.end()) artifacts_.push_back(std::move(rel));
    }

    void write(const std::string& name, const std::string& content) const {
        auto tmp = dir_ / (name + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << content;
            if (!out) throw Error("cannot write " + tmp.string());
        }
        fs::rename(tmp, dir_ / name);
    }

    // Written last, so its presence marks a complete run.
    void finish(const std::string& command, const config::RunConfig& cfg, const Json& inputs) const {
        Json snapshot = config::to_json(cfg);
        std::time_t now = std::time(nullptr);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", std::gmtime(&now));
        Json m;
        m["run_id"] = std::string(stamp) + "-" + fingerprint(snapshot.dump()).substr(0, 8);
        m["command"] = command;
        m["created_utc"] = stamp;
        m["config"] = snapshot;
        m["inputs"] = inputs;
        Json arts = Json::object();
        for (const auto& a : artifacts_) {
            if (a == "run_manifest.json") continue;
            if (!fs::exists(dir_ / a)) throw Error("expected artifact " + (dir_ / a).string() + " was not written");
            arts[a] = file_fingerprint(dir_ / a);
        }
        m["artifacts"] = arts;
        write("run_manifest.json", m.dump(2) + "\n");
    }

private:
    fs::path dir_;
    std::vector<std::string> artifacts_;
};

dataset::YearRange parse_years(const std::string& text, const char* flag) {
    int a = 0, b = 0;
    char dash = 0;
    std::istringstream in(text);
    if (!(in >> a >> dash >> b) || dash != '-' || !in.eof())
        throw UsageError(std::string(flag) + " expects FIRST-LAST, got \"" + text + "\"");
    return {a, b};
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
    std::string spec;
    std::string out;
    std::optional<double> alpha;
    std::optional<std::size_t> docs_per_wg;
};

int cmd_synth(const Globals& g, const SynthArgs& a) {
    auto cfg = resolve_config(g);
    if (!a.spec.empty()) {
        auto j = nlohmann::json::parse(read_all(a.spec));
        if (j.contains("seed")) {
            if (!g.seed) cfg.seed = j["seed"].get<std::uint64_t>();
            j.erase("seed");
        }
        cfg.synthetic = {};
        config::detail::read_synthetic(j, cfg.synthetic);
    }
    if (a.alpha) cfg.synthetic.alpha = *a.alpha;
    if (a.docs_per_wg) cfg.synthetic.docs_per_wg = *a.docs_per_wg;
    auto spec = cfg.synthetic_spec();
    spec.check();
    fs::path out = a.out;
    if (fs::exists(out) && !fs::is_empty(out) && !g.force)
        throw Error("refusing to write into non-empty " + out.string() + " (pass --force)");
    OutDir dir(out, {}, true);
    auto summary = dataset::generate_synthetic_corpus(spec, out);
    dir.adopt_tree();
    log::info("wrote " + std::to_string(summary.files_written) + " synthetic documents to " + out.string());
    dir.finish("synth", cfg, Json{{"corpus_tree", tree_fingerprint(out, {"run_manifest.json"})}});
    std::cout << "synthetic corpus: " << summary.files_written << " files in " << out.string() << "\n";
    return 0;
}

// ---- ingest ----------------------------------------------------------------

struct IngestArgs {
    std::string root;
    std::string out;
};

int cmd_ingest(const Globals& g, const IngestArgs& a) {
    auto cfg = resolve_config(g);
    if (!a.root.empty()) cfg.ingest.root = a.root;
    if (cfg.ingest.root.empty()) throw UsageError("ingest needs --root or ingest.root in the config");
    OutDir dir(a.out, {"cleandocs.jsonl", "ingest_report.json"}, g.force);
    auto tmp = dir.path("cleandocs.jsonl.tmp");
    std::ofstream spool(tmp, std::ios::binary | std::ios::trunc);
    if (!spool) throw Error("cannot write " + tmp.string());
    auto report = ingest::run_ingest(cfg.ingest, cfg.preprocess, cfg.threads,
                                     [&](preprocess::CleanDoc&& d) { spool << preprocess::cleandoc_to_jsonl(d) << '\n'; });
    spool.close();
    if (!spool) throw Error("write failed for " + tmp.string());
    fs::rename(tmp, dir.path("cleandocs.jsonl"));
    dir.write("ingest_report.json", ingest::report_to_json(report).dump(2) + "\n");
    dir.finish("ingest", cfg, Json{{"corpus_tree", tree_fingerprint(cfg.ingest.root, {"run_manifest.json"})}});
    std::size_t dropped = 0;
    for (const auto& [_, n] : report.dropped) dropped += n;
    std::cout << "ingested " << report.clean_docs << " clean documents (" << dropped << " dropped, "
              << report.skipped_total() << " skipped)\n";
    return 0;
}

// ---- build-dataset ---------------------------------------------------------

struct BuildArgs {
    std::string cleandocs;
    std::string out;
    std::string train_years;
    std::string test_years;
    std::optional<double> validation_fraction;
    std::optional<std::size_t> max_words;
    bool balance = false;
};

std::string counts_table(const dataset::DatasetManifest& m) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-6s %10s %10s %10s %10s %10s %10s\n", "WG", "train_docs", "train_segs", "val_docs",
                  "val_segs", "test_docs", "test_segs");
    out << line;
    std::map<std::string, std::size_t> totals;
    for (WorkingGroup wg : m.label_set) {
        std::vector<std::size_t> cols;
        for (const auto& split : dataset::split_names()) {
            std::vector<dataset::SegmentRef> refs;
            for (const auto& r : m.split(split))
                if (r.label == wg) refs.push_back(r);
            cols.push_back(dataset::doc_ids(refs).size());
            cols.push_back(refs.size());
        }
        std::snprintf(line, sizeof line, "%-6s %10zu %10zu %10zu %10zu %10zu %10zu\n", std::string(wg_name(wg)).c_str(),
                      cols[0], cols[1], cols[2], cols[3], cols[4], cols[5]);
        out << line;
    }
    std::vector<std::size_t> cols;
    for (const auto& split : dataset::split_names()) {
        cols.push_back(dataset::doc_ids(m.split(split)).size());
        cols.push_back(m.split(split).size());
    }
    std::snprintf(line, sizeof line, "%-6s %10zu %10zu %10zu %10zu %10zu %10zu\n", "total", cols[0], cols[1], cols[2],
                  cols[3], cols[4], cols[5]);
    out << line;
    return out.str();
}

int cmd_build(const Globals& g, const BuildArgs& a) {
    auto cfg = resolve_config(g);
    if (!a.train_years.empty()) cfg.split.train_years = parse_years(a.train_years, "--train-years");
    if (!a.test_years.empty()) cfg.split.test_years = parse_years(a.test_years, "--test-years");
    if (a.validation_fraction) cfg.split.validation_fraction = *a.validation_fraction;
    if (a.max_words) cfg.preprocess.max_words = *a.max_words;
    if (a.balance) cfg.split.balance = true;
    auto policy = cfg.split_policy();
    policy.check();
    std::vector<std::string> names;
    for (const auto& s : dataset::split_names()) names.push_back(dataset::split_file_name(s));
    names.push_back(dataset::kSidecarName);
    names.push_back("build_report.json");
    OutDir dir(a.out, names, g.force);

    std::vector<preprocess::CleanDoc> docs;
    preprocess::read_cleandocs(a.cleandocs, [&](preprocess::CleanDoc&& d) { docs.push_back(std::move(d)); });
    auto built = dataset::build_dataset(docs, policy, cfg.preprocess.min_tail_words);
    dataset::export_dataset(built.manifest, built.store, dir.dir());
    Json report;
    report["documents"] = built.documents;
    report["dropped_documents"] = built.dropped_documents;
    report["duplicate_documents"] = built.duplicate_documents;
    report["segments"] = built.segments;
    report["discarded_tail_words"] = built.discarded_tail_words;
    report["excluded_segments"] = built.manifest.excluded_segments;
    report["label_set"] = wg_names(built.manifest.label_set);
    dir.write("build_report.json", report.dump(2) + "\n");
    dir.finish("build-dataset", cfg,
               Json{{"cleandocs", file_fingerprint(a.cleandocs)}, {"dataset", dataset_fingerprint(dir.dir())}});
    std::cout << counts_table(built.manifest);
    return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
    std::string dataset;
    std::string out;
    std::optional<double> learning_rate;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch_size;
    std::optional<double> l2;
    std::optional<std::string> optimizer;
    std::optional<std::size_t> patience;
    std::optional<std::size_t> min_df;
    std::optional<std::size_t> max_features;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
    auto cfg = resolve_config(g);
    auto& hp = cfg.classifier;
    if (a.learning_rate) hp.learning_rate = *a.learning_rate;
    if (a.epochs) hp.epochs = *a.epochs;
    if (a.batch_size) hp.batch_size = *a.batch_size;
    if (a.l2) hp.l2 = *a.l2;
    if (a.optimizer) hp.optimizer = *a.optimizer;
    if (a.patience) hp.early_stop_patience = *a.patience;
    if (a.min_df) cfg.features.min_df = *a.min_df;
    if (a.max_features) cfg.features.max_features = *a.max_features;
    hp.check();
    OutDir dir(a.out, {"model.json", "vocab.json", "training_log.json"}, g.force);
    auto data = dataset::import_dataset(a.dataset);
    auto fit = cfg.fit_config();
    auto fitted = evaluate::fit_on_manifest(data.manifest, data.store, fit, [](const classifier::EpochLog& e) {
        char line[160];
        std::snprintf(line, sizeof line, "epoch %zu: train loss %.6f, validation accuracy %.4f", e.epoch, e.train_loss,
                      e.validation_accuracy);
        log::info(line);
    });
    dir.write("model.json", classifier::model_to_json(fitted.trained.params).dump() + "\n");
    dir.write("vocab.json", features::vocabulary_to_json(fitted.vocab).dump() + "\n");
    auto log_json = classifier::training_log_json(fitted.trained);
    log_json["model_id"] = fitted.model_id;
    dir.write("training_log.json", log_json.dump(2) + "\n");
    dir.finish("train", cfg,
               Json{{"dataset", dataset_fingerprint(a.dataset)}, {"vocab_fingerprint", fitted.vocab.fingerprint()}});
    std::printf("model %s: best epoch %zu, validation accuracy %.4f, %zu features\n", fitted.model_id.c_str(),
                fitted.trained.best_epoch, fitted.trained.best_validation_accuracy, fitted.vocab.size());
    return 0;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
    std::string dataset;
    std::string model;
    std::string predictions;
    std::string out;
    std::string split = dataset::kTest;
    std::size_t cap = 0;
};

// Every external prediction must name a segment of the split with the same
// true label.
void cross_check(const evaluate::PredictionsFile& file, const dataset::DatasetManifest& m, const std::string& split,
                 const std::string& path) {
    std::map<std::pair<std::string, std::size_t>, std::size_t> expected;
    for (const auto& r : m.split(split)) expected[{r.doc_id, r.seg_index}] = m.label_position(r.label);
    for (std::size_t i = 0; i < file.predictions.size(); ++i) {
        const auto& p = file.predictions[i];
        auto it = expected.find({p.doc_id, p.seg_index});
        std::string where = path + ":" + std::to_string(i + 1) + ": ";
        if (it == expected.end())
            throw SchemaError(where + p.doc_id + "#" + std::to_string(p.seg_index) + " is not in the " + split + " split");
        if (it->second != p.true_label) throw SchemaError(where + "true_label disagrees with the dataset");
    }
    if (file.predictions.size() != expected.size())
        log::warn("predictions cover " + std::to_string(file.predictions.size()) + " of " +
                  std::to_string(expected.size()) + " " + split + " segments");
}

int cmd_evaluate(const Globals& g, const EvaluateArgs& a) {
    auto cfg = resolve_config(g);
    if (a.model.empty() == a.predictions.empty()) throw UsageError("evaluate needs exactly one of --model or --predictions");
    if (a.cap && !a.predictions.empty()) throw UsageError("--cap applies to native models only");
    const auto& splits = dataset::split_names();
    if (std::find(splits.begin(), splits.end(), a.split) == splits.end())
        throw UsageError("--split must be train, validation or test");
    bool native = !a.model.empty();
    std::vector<std::string> names = {"report.json", "report.txt"};
    if (native) names.push_back("predictions.jsonl");
    OutDir dir(a.out, names, g.force);
    auto data = dataset::import_dataset(a.dataset);
    Json inputs = {{"dataset", dataset_fingerprint(a.dataset)}};
    evaluate::EvalReport report;
    if (native) {
        fs::path mdir = a.model;
        auto params = classifier::model_from_json(nlohmann::json::parse(read_all(mdir / "model.json")));
        auto vocab = features::vocabulary_from_json(nlohmann::json::parse(read_all(mdir / "vocab.json")));
        if (params.vocab_fingerprint != vocab.fingerprint())
            throw SchemaError("model " + mdir.string() + " was trained with a different vocabulary");
        evaluate::FitConfig fit;
        fit.vocab = vocab.config();
        fit.hp = params.trained_config;
        std::string model_id = "native-softmax-" + fingerprint(classifier::model_to_json(params).dump()).substr(0, 12);
        auto preds = evaluate::predict_split(params, vocab, data.manifest, data.store, a.split, cfg.threads, a.cap);
        report = evaluate::make_report(preds, data.manifest.label_set, model_id, evaluate::config_fingerprint(fit));
        std::string body;
        for (const auto& p : preds) body += evaluate::prediction_to_jsonl(p, data.manifest.label_set, model_id) + "\n";
        dir.write("predictions.jsonl", body);
        inputs["model"] = file_fingerprint(mdir / "model.json");
        inputs["vocab_fingerprint"] = vocab.fingerprint();
    } else {
        auto file = evaluate::read_predictions(a.predictions, data.manifest.label_set);
        cross_check(file, data.manifest, a.split, a.predictions);
        report = evaluate::make_report(file.predictions, data.manifest.label_set, file.model_id);
        inputs["predictions"] = file_fingerprint(a.predictions);
    }
    dir.write("report.json", evaluate::report_to_json(report).dump(2) + "\n");
    auto text = evaluate::report_to_text(report);
    dir.write("report.txt", text);
    dir.finish("evaluate", cfg, inputs);
    std::cout << text;
    return 0;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
    std::string kind;
    std::string dataset;
    std::string out;
    std::vector<double> fractions;
    std::vector<std::uint64_t> seeds;
    std::vector<std::size_t> caps;
};

int cmd_sweep(const Globals& g, const SweepArgs& a) {
    auto cfg = resolve_config(g);
    if (!a.fractions.empty()) cfg.sweep.fractions = a.fractions;
    if (!a.seeds.empty()) cfg.sweep.seeds = a.seeds;
    if (!a.caps.empty()) cfg.sweep.caps = a.caps;
    std::vector<std::string> names = {"sweep.csv", "sweep.json"};
    if (a.kind == "wg-combos") names.push_back("combo_table.txt");
    OutDir dir(a.out, names, g.force);
    auto data = dataset::import_dataset(a.dataset);
    auto fit = cfg.fit_config();
    evaluate::SweepReport r;
    if (a.kind == "portion")
        r = evaluate::run_portion_sweep(data.manifest, data.store, cfg.sweep.fractions, cfg.sweep.seeds, fit);
    else if (a.kind == "wg-combos")
        r = evaluate::run_wg_combination_suite(data.manifest, data.store, cfg.sweep.combos, cfg.sweep.seeds, fit);
    else
        r = evaluate::run_segment_length_sweep(data.manifest, data.store, cfg.sweep.caps, cfg.sweep.seeds, fit);
    dir.write("sweep.csv", evaluate::sweep_to_csv(r));
    dir.write("sweep.json", evaluate::sweep_to_json(r).dump(2) + "\n");
    if (a.kind == "wg-combos") dir.write("combo_table.txt", evaluate::combo_table_text(r));
    dir.finish("sweep " + a.kind, cfg, Json{{"dataset", dataset_fingerprint(a.dataset)}});
    for (const auto& s : r.summary) {
        std::printf("%-40s accuracy %.4f +/- %.4f", s.key.c_str(), s.mean_accuracy, s.std_accuracy);
        if (s.mean_roc_auc) std::printf("  roc_auc %.4f", *s.mean_roc_auc);
        std::printf("\n");
    }
    return 0;
}

// ---- validate-predictions --------------------------------------------------

struct ValidateArgs {
    std::string predictions;
    std::string dataset;
    std::string split = dataset::kTest;
};

int cmd_validate(const ValidateArgs& a) {
    auto data = dataset::import_dataset(a.dataset);
    auto file = evaluate::read_predictions(a.predictions, data.manifest.label_set);
    cross_check(file, data.manifest, a.split, a.predictions);
    std::cout << "ok: " << file.predictions.size() << " predictions from " << file.model_id << "\n";
    return 0;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Working-group classification of 3GPP TDoc corpora"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "Master JSON config")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Seed for every seeded stage");
    app.add_option("--threads", g.threads, "Worker cap (default: all cores)");
    app.add_flag("--force", g.force, "Overwrite existing artifacts");
    app.add_flag("-q,--quiet", g.quiet, "Suppress info diagnostics");

    SynthArgs synth;
    auto* s_synth = app.add_subcommand("synth", "Write a synthetic corpus tree");
    s_synth->add_option("--spec", synth.spec, "Synthetic corpus spec (JSON)")->check(CLI::ExistingFile);
    s_synth->add_option("--out", synth.out, "Corpus root to create")->required();
    s_synth->add_option("--alpha", synth.alpha, "Shared-vocabulary probability");
    s_synth->add_option("--docs-per-wg", synth.docs_per_wg, "Documents per working group");

    IngestArgs ing;
    auto* s_ingest = app.add_subcommand("ingest", "Scan, extract and clean a corpus into clean-document JSON Lines");
    s_ingest->add_option("--root", ing.root, "Corpus root")->check(CLI::ExistingDirectory);
    s_ingest->add_option("--out", ing.out, "Output directory")->required();

    BuildArgs build;
    auto* s_build = app.add_subcommand("build-dataset", "Segment, split and export the dataset");
    s_build->add_option("--cleandocs", build.cleandocs, "cleandocs.jsonl from ingest")->required()->check(CLI::ExistingFile);
    s_build->add_option("--out", build.out, "Dataset directory")->required();
    s_build->add_option("--train-years", build.train_years, "Train era, FIRST-LAST");
    s_build->add_option("--test-years", build.test_years, "Test era, FIRST-LAST");
    s_build->add_option("--validation-fraction", build.validation_fraction, "Share of train-era documents held out");
    s_build->add_option("--max-words", build.max_words, "Segment length in words");
    s_build->add_flag("--balance", build.balance, "Downsample train-era classes to the smallest");

    TrainArgs tr;
    auto* s_train = app.add_subcommand("train", "Fit the vocabulary and train the classifier");
    s_train->add_option("--dataset", tr.dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    s_train->add_option("--out", tr.out, "Model directory")->required();
    s_train->add_option("--learning-rate", tr.learning_rate);
    s_train->add_option("--epochs", tr.epochs);
    s_train->add_option("--batch-size", tr.batch_size);
    s_train->add_option("--l2", tr.l2);
    s_train->add_option("--optimizer", tr.optimizer)->check(CLI::IsMember({"sgd", "adagrad"}));
    s_train->add_option("--patience", tr.patience, "Early-stopping patience in epochs (0 disables)");
    s_train->add_option("--min-df", tr.min_df);
    s_train->add_option("--max-features", tr.max_features);

    EvaluateArgs ev;
    auto* s_eval = app.add_subcommand("evaluate", "Score a native model or an external predictions file");
    s_eval->add_option("--dataset", ev.dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    auto* o_model = s_eval->add_option("--model", ev.model, "Model directory from train")->check(CLI::ExistingDirectory);
    auto* o_pred = s_eval->add_option("--predictions", ev.predictions, "Predictions JSON Lines")->check(CLI::ExistingFile);
    o_model->excludes(o_pred);
    s_eval->add_option("--out", ev.out, "Report directory")->required();
    s_eval->add_option("--split", ev.split, "Split to score");
    s_eval->add_option("--cap", ev.cap, "Truncate segments to their first N words");

    SweepArgs sw;
    auto* s_sweep = app.add_subcommand("sweep", "Run an experiment grid");
    s_sweep->add_option("--kind", sw.kind)->required()->check(CLI::IsMember({"portion", "wg-combos", "segment-length"}));
    s_sweep->add_option("--dataset", sw.dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    s_sweep->add_option("--out", sw.out, "Report directory")->required();
    s_sweep->add_option("--fractions", sw.fractions)->delimiter(',');
    s_sweep->add_option("--seeds", sw.seeds)->delimiter(',');
    s_sweep->add_option("--caps", sw.caps)->delimiter(',');

    ValidateArgs va;
    auto* s_validate = app.add_subcommand("validate-predictions", "Check a predictions file against a dataset");
    s_validate->add_option("--predictions", va.predictions)->required()->check(CLI::ExistingFile);
    s_validate->add_option("--dataset", va.dataset)->required()->check(CLI::ExistingDirectory);
    s_validate->add_option("--split", va.split, "Split the predictions refer to");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return 2;
    }
    log::set_quiet(g.quiet);

    try {
        if (*s_synth) return cmd_synth(g, synth);
        if (*s_ingest) return cmd_ingest(g, ing);
        if (*s_build) return cmd_build(g, build);
        if (*s_train) return cmd_train(g, tr);
        if (*s_eval) return cmd_evaluate(g, ev);
        if (*s_sweep) return cmd_sweep(g, sw);
        if (*s_validate) return cmd_validate(va);
    } catch (const UsageError& e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 1;
}
