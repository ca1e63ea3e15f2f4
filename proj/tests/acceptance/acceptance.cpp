// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and time limits are pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "../support/cli_runner.hpp"
#include "../support/generators.hpp"
#include "../support/oracles.hpp"
#include "../support/text_oracles.hpp"
#include "tdoc/classifier/model.hpp"
#include "tdoc/dataset/manifest.hpp"
#include "tdoc/evaluate/metrics.hpp"
#include "tdoc/preprocess/clean.hpp"
#include "tdoc/preprocess/segment.hpp"
#include "tdoc/util/log.hpp"

using namespace tdoc;
using fixtures::read_file;
using fixtures::TempDir;
using fixtures::write_file;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kGradientRelTol = 1e-6;
constexpr double kGradientFloor = 1e-6;
constexpr long double kGradientStep = 1e-6L;
constexpr double kAucTol = 1e-9;
constexpr double kMetricTol = 1e-12;
constexpr double kSeparableAccuracy = 1.0;
constexpr double kWeakAccuracy = 0.90;
constexpr double kWeakChanceMultiple = 10;
constexpr double kChanceTol = 0.05;

// Time limits in seconds.
constexpr double kLimitPurity = 30;
constexpr double kLimitSegmentation = 10;
constexpr double kLimitSplits = 30;
constexpr double kLimitGradient = 10;
constexpr double kLimitMetrics = 10;
constexpr double kLimitEndToEnd = 180;
constexpr double kLimitTrends = 600;
constexpr double kLimitDeterminism = 300;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Check {
    bool ok = true;
    std::ostringstream notes;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            if (ok) notes << "failed: ";
            else notes << "; ";
            notes << what;
            ok = false;
        }
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Cleaned text carries no markup or URLs, and each stage is idempotent.

Outcome preprocessing_purity() {
    Rng rng(11);
    preprocess::PreprocessConfig cfg;
    std::size_t kept = 0, dirty = 0;
    for (int i = 0; i < 1000; ++i) {
        ingest::RawDoc raw;
        raw.meta.tdoc_id = "R1-" + std::to_string(i);
        raw.meta.doc_kind = ingest::DocKind::Contribution;
        raw.meta.year = 2020;
        raw.text = fixtures::random_noisy_document(rng, 2 + rng.index(12));
        auto doc = preprocess::clean_document(raw, cfg);
        if (doc.dropped) continue;
        ++kept;
        if (std::regex_search(doc.text, fixtures::tag_pattern()) || std::regex_search(doc.text, fixtures::url_pattern()))
            ++dirty;
    }
    std::size_t not_idempotent = 0;
    for (int i = 0; i < 10000; ++i) {
        std::string s = fixtures::random_markupish(rng, 1 + rng.index(12));
        auto a = preprocess::strip_markup(s);
        auto b = preprocess::remove_urls(s);
        auto c = preprocess::truncate_references(s);
        if (preprocess::strip_markup(a) != a || preprocess::remove_urls(b) != b || preprocess::truncate_references(c) != c)
            ++not_idempotent;
    }
    Check chk;
    chk.require(kept >= 900, std::to_string(kept) + " of 1000 documents survived cleaning");
    chk.require(dirty == 0, std::to_string(dirty) + " cleaned documents still match a tag or URL pattern");
    chk.require(not_idempotent == 0, std::to_string(not_idempotent) + " strings changed on a second pass");
    if (chk.ok) chk.notes << kept << " cleaned docs without residue, 10000 strings idempotent";
    return {chk.ok, chk.notes.str()};
}

// ---------------------------------------------------------------------------
// 2. Segmentation conserves words and preserves their order.

Outcome segmentation_conservation() {
    Rng rng(12);
    const std::size_t caps[] = {1, 7, 200};
    std::size_t checked = 0, broken = 0;
    for (int i = 0; i < 1000; ++i) {
        preprocess::CleanDoc doc;
        doc.meta.tdoc_id = "S2-" + std::to_string(i);
        doc.meta.year = 2018;
        doc.text = fixtures::random_prose(rng, rng.index(1200));
        auto expected = fixtures::regex_words(doc.text);
        for (std::size_t cap : caps) {
            auto res = preprocess::segment_document(doc, cap, 20);
            std::size_t total = res.discarded_tail_words;
            std::vector<std::string> seen;
            for (const auto& s : res.segments) {
                total += s.word_count;
                auto w = fixtures::regex_words(s.text);
                if (w.size() != s.word_count) ++broken;
                seen.insert(seen.end(), w.begin(), w.end());
            }
            bool prefix = seen.size() + res.discarded_tail_words == expected.size() &&
                          std::equal(seen.begin(), seen.end(), expected.begin());
            if (total != preprocess::count_words(doc.text) || !prefix) ++broken;
            ++checked;
        }
    }
    Check chk;
    chk.require(broken == 0, std::to_string(broken) + " of " + std::to_string(checked) + " segmentations lost or reordered words");
    if (chk.ok) chk.notes << checked << " segmentations conserve word counts and order";
    return {chk.ok, chk.notes.str()};
}

// ---------------------------------------------------------------------------
// 3. Manifests never leak documents across splits and stay consistent under
// filtering and nested subsampling.

std::vector<dataset::SegmentRef> random_refs(Rng& rng) {
    std::vector<dataset::SegmentRef> refs;
    std::size_t n_wgs = 2 + rng.index(6);
    std::vector<WorkingGroup> wgs(kAllWorkingGroups.begin(), kAllWorkingGroups.end());
    rng.shuffle(wgs);
    wgs.resize(n_wgs);
    std::size_t n_docs = 5 + rng.index(120);
    for (std::size_t d = 0; d < n_docs; ++d) {
        WorkingGroup wg = wgs[rng.index(n_wgs)];
        int year = 2008 + static_cast<int>(rng.index(17));
        std::string id = std::string(wg_tdoc_prefix(wg)) + "-" + std::to_string(year) + "-" + std::to_string(d);
        std::size_t segs = 1 + rng.index(6);
        for (std::size_t s = 0; s < segs; ++s) refs.push_back({id, s, wg, year});
    }
    rng.shuffle(refs);
    return refs;
}

dataset::SplitPolicy random_policy(Rng& rng) {
    dataset::SplitPolicy p;
    int a = 2008 + static_cast<int>(rng.index(10));
    int b = a + static_cast<int>(rng.index(5));
    int c = b + 1 + static_cast<int>(rng.index(3));
    int d = c + static_cast<int>(rng.index(4));
    p.train_years = {a, b};
    p.test_years = {c, d};
    p.validation_fraction = rng.uniform() * 0.5;
    p.seed = rng.next();
    p.balance = rng.bernoulli(0.3);
    return p;
}

void check_leakage(const dataset::DatasetManifest& m, const dataset::SplitPolicy& p, Check& chk, const std::string& where) {
    auto train = dataset::doc_ids(m.split("train"));
    auto val = dataset::doc_ids(m.split("validation"));
    auto test = dataset::doc_ids(m.split("test"));
    auto era = dataset::doc_ids(dataset::train_era(m));
    for (const auto& id : val) chk.require(!train.count(id), where + ": " + id + " in train and validation");
    for (const auto& id : test) chk.require(!era.count(id), where + ": " + id + " in train era and test");
    for (const auto& r : dataset::train_era(m))
        chk.require(p.train_years.contains(r.year), where + ": train-era year " + std::to_string(r.year));
    for (const auto& r : m.split("test")) chk.require(p.test_years.contains(r.year), where + ": test year " + std::to_string(r.year));
    for (const auto& problem : dataset::check_manifest(m)) chk.require(false, where + ": " + problem);
}

Outcome split_integrity() {
    Rng rng(13);
    Check chk;
    std::size_t built = 0, rejected = 0, filtered = 0, nested = 0;
    for (int t = 0; t < 200; ++t) {
        auto refs = random_refs(rng);
        auto policy = random_policy(rng);
        dataset::DatasetManifest m;
        try {
            m = dataset::build_manifest(refs, policy);
        } catch (const ManifestError&) {
            ++rejected;
            continue;
        }
        ++built;
        std::string where = "manifest " + std::to_string(t);
        check_leakage(m, policy, chk, where);

        std::vector<WorkingGroup> subset;
        for (WorkingGroup wg : m.label_set)
            if (rng.bernoulli(0.6)) subset.push_back(wg);
        if (subset.size() >= 2) {
            try {
                auto f = dataset::filter_wgs(m, subset);
                ++filtered;
                std::set<WorkingGroup> allowed(subset.begin(), subset.end());
                for (const auto& name : dataset::split_names())
                    for (const auto& r : f.split(name))
                        chk.require(allowed.count(r.label) > 0, where + ": filtered label " + std::string(wg_name(r.label)));
                for (WorkingGroup wg : f.label_set) chk.require(allowed.count(wg) > 0, where + ": label_set after filter");
                check_leakage(f, policy, chk, where + " filtered");
            } catch (const ManifestError&) {
            }
        }

        double f1 = 0.05 + rng.uniform() * 0.9;
        double f2 = f1 + rng.uniform() * (1.0 - f1);
        std::uint64_t seed = rng.next();
        try {
            auto small = dataset::subsample(m, f1, seed);
            auto large = dataset::subsample(m, f2, seed);
            ++nested;
            auto small_docs = dataset::doc_ids(dataset::train_era(small));
            auto large_docs = dataset::doc_ids(dataset::train_era(large));
            auto all_docs = static_cast<double>(dataset::doc_ids(dataset::train_era(m)).size());
            chk.require(small_docs.size() == std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(f1 * all_docs - 1e-9))),
                        where + ": subsample kept " + std::to_string(small_docs.size()) + " documents");
            for (const auto& id : small_docs) chk.require(large_docs.count(id) > 0, where + ": subsample not nested at " + id);
            chk.require(small.split("test") == m.split("test"), where + ": subsample changed test");
            check_leakage(small, policy, chk, where + " subsampled");
        } catch (const ManifestError&) {
        }
    }
    chk.require(built >= 100, "only " + std::to_string(built) + " of 200 random manifests were buildable");
    if (chk.ok)
        chk.notes << built << " manifests clean (" << rejected << " rejected as empty), " << filtered << " filtered, " << nested
                  << " nested subsample pairs";
    return {chk.ok, chk.notes.str()};
}

// ---------------------------------------------------------------------------
// 4. Analytic gradient agrees with central differences.

Outcome gradient_check() {
    Rng rng(14);
    double worst_rel = 0, worst_abs = 0;
    for (int t = 0; t < 100; ++t) {
        auto c = fixtures::random_gradient_case(rng);
        classifier::Gradient g;
        classifier::loss_and_grad(c.params, c.batch, c.l2, &g);
        auto num = fixtures::numeric_gradient(c.dense, kGradientStep);
        worst_rel = std::max(worst_rel, fixtures::max_relative_error(g, num, kGradientFloor));
        for (std::size_t i = 0; i < g.W.size(); ++i)
            worst_abs = std::max(worst_abs, std::abs(g.W[i] - static_cast<double>(num.W[i])));
        for (std::size_t i = 0; i < g.b.size(); ++i)
            worst_abs = std::max(worst_abs, std::abs(g.b[i] - static_cast<double>(num.b[i])));
    }
    bool ok = worst_rel <= kGradientRelTol;
    return {ok, "100 instances, max rel err " + fmt("%.3g", worst_rel) + " (tol " + fmt("%.0e", kGradientRelTol) +
                    ", floor " + fmt("%.0e", kGradientFloor) + "), max abs err " + fmt("%.3g", worst_abs)};
}

// ---------------------------------------------------------------------------
// 5. Metrics match a brute-force oracle and pinned hand-computed values.

Outcome metric_check() {
    Check chk;
    using evaluate::Prediction;
    auto pred = [](std::size_t y, std::size_t yhat, std::vector<double> p) { return Prediction{"s", 0, y, yhat, std::move(p)}; };
    std::vector<Prediction> pinned = {pred(0, 0, {0.9, 0.1}), pred(0, 0, {0.6, 0.4}), pred(1, 0, {0.6, 0.4}),
                                      pred(1, 1, {0.2, 0.8})};
    double acc = evaluate::accuracy(pinned);
    double auc = evaluate::roc_auc_macro_ovr(pinned, 2);
    // TP = FP = FN = TN = 1.
    std::vector<Prediction> f1_case = {pred(1, 1, {0.2, 0.8}), pred(0, 1, {0.4, 0.6}), pred(1, 0, {0.7, 0.3}),
                                       pred(0, 0, {0.9, 0.1})};
    double f1 = evaluate::macro_f1(f1_case, 2);
    chk.require(std::abs(acc - 0.75) <= kMetricTol, "accuracy " + fmt("%.17g", acc) + " != 0.75");
    chk.require(std::abs(auc - 0.875) <= kMetricTol, "auc " + fmt("%.17g", auc) + " != 0.875");
    chk.require(std::abs(f1 - 0.5) <= kMetricTol, "macro F1 " + fmt("%.17g", f1) + " != 0.5");

    Rng rng(15);
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        std::size_t k = 2 + rng.index(14);
        auto preds = fixtures::random_predictions(rng, 2 + rng.index(199), k);
        std::set<std::size_t> present;
        for (const auto& p : preds) present.insert(p.true_label);
        if (present.size() < 2) continue;
        worst = std::max(worst, std::abs(evaluate::roc_auc_macro_ovr(preds, k) - fixtures::pairwise_auc(preds, k)));
    }
    chk.require(worst <= kAucTol, "AUC differs from pairwise oracle by " + fmt("%.3g", worst));
    if (chk.ok) chk.notes << "pinned accuracy/F1/AUC exact, AUC vs pairwise oracle max diff " << fmt("%.3g", worst);
    return {chk.ok, chk.notes.str()};
}

// ---------------------------------------------------------------------------
// 6-8 drive the command-line tool end to end.

const std::string kSplitConfig = R"("dataset": {"split": {"train_years": [2015, 2019], "test_years": [2020, 2023]}})";

struct Workspace {
    TempDir tmp;
    std::string cfg_default;
    std::string cfg_trend;

    Workspace() {
        write_file(tmp / "default.json", "{" + kSplitConfig + "}");
        write_file(tmp / "trend.json", "{" + kSplitConfig + R"(,
            "classifier": {"learning_rate": 0.5, "epochs": 10},
            "sweep": {"fractions": [0.1, 1.0], "seeds": [1, 2, 3], "caps": [25, 200],
                      "combos": [["RAN1", "SA1", "CT1"], ["RAN1", "RAN2", "RAN3"]]}})");
        cfg_default = (tmp / "default.json").string();
        cfg_trend = (tmp / "trend.json").string();
    }

    fs::path dir(const std::string& name) const { return tmp / name; }

    void run(const std::string& args) const {
        auto r = fixtures::run_cli(TDOCCTL_PATH, tmp, "-q " + args);
        if (r.code != 0) throw Error("tdocctl " + args + " exited " + std::to_string(r.code) + ": " + r.err);
    }

    // synth -> ingest -> build-dataset under <name>/{corpus,clean,dataset}.
    void prepare(const std::string& name, const std::string& spec, const std::string& cfg) const {
        fs::create_directories(dir(name));
        write_file(dir(name) / "spec.json", spec);
        auto d = dir(name).string();
        run("--config " + cfg + " synth --spec " + d + "/spec.json --out " + d + "/corpus");
        run("--config " + cfg + " ingest --root " + d + "/corpus --out " + d + "/clean");
        run("--config " + cfg + " build-dataset --cleandocs " + d + "/clean/cleandocs.jsonl --out " + d + "/dataset");
    }

    // train -> evaluate on the test split; returns report.json.
    nlohmann::json fit_and_score(const std::string& name, const std::string& cfg) const {
        auto d = dir(name).string();
        run("--config " + cfg + " train --dataset " + d + "/dataset --out " + d + "/model");
        run("--config " + cfg + " evaluate --dataset " + d + "/dataset --model " + d + "/model --out " + d + "/report");
        return nlohmann::json::parse(read_file(dir(name) / "report" / "report.json"));
    }

    nlohmann::json sweep(const std::string& name, const std::string& kind, const std::string& out) const {
        auto d = dir(name).string();
        run("--config " + cfg_trend + " sweep --kind " + kind + " --dataset " + d + "/dataset --out " + d + "/" + out);
        return nlohmann::json::parse(read_file(dir(name) / out / "sweep.json"));
    }
};

std::string spec_json(const std::vector<std::string>& wgs, double alpha, int docs, const std::string& extra = "") {
    nlohmann::json j;
    j["wgs"] = wgs;
    j["alpha"] = alpha;
    j["docs_per_wg"] = docs;
    j["seed"] = 1;
    std::string s = j.dump();
    if (!extra.empty()) s = s.substr(0, s.size() - 1) + "," + extra + "}";
    return s;
}

Outcome end_to_end(const Workspace& ws) {
    Check chk;
    std::vector<std::string> all;
    for (WorkingGroup wg : kAllWorkingGroups) all.emplace_back(wg_name(wg));
    const std::vector<std::string> three = {"RAN1", "SA1", "CT1"};

    ws.prepare("separable", spec_json(three, 0.0, 100), ws.cfg_default);
    double sep = ws.fit_and_score("separable", ws.cfg_default).at("accuracy");
    chk.require(sep >= kSeparableAccuracy, "alpha 0 accuracy " + fmt("%.4f", sep));

    ws.prepare("weak", spec_json(all, 0.7, 100), ws.cfg_default);
    double weak = ws.fit_and_score("weak", ws.cfg_default).at("accuracy");
    double weak_chance = 1.0 / static_cast<double>(all.size());
    chk.require(weak >= kWeakAccuracy, "alpha 0.7 accuracy " + fmt("%.4f", weak));
    chk.require(weak >= kWeakChanceMultiple * weak_chance, "alpha 0.7 accuracy below 10x chance");

    ws.prepare("noise", spec_json(three, 1.0, 300), ws.cfg_default);
    double noise = ws.fit_and_score("noise", ws.cfg_default).at("accuracy");
    chk.require(std::abs(noise - 1.0 / 3.0) <= kChanceTol, "alpha 1 accuracy " + fmt("%.4f", noise) + " not near 1/3");

    std::ostringstream d;
    d << "alpha 0: " << fmt("%.4f", sep) << ", alpha 0.7: " << fmt("%.4f", weak) << " (" << fmt("%.1f", weak / weak_chance)
      << "x chance), alpha 1: " << fmt("%.4f", noise);
    if (!chk.ok) d << "; " << chk.notes.str();
    return {chk.ok, d.str()};
}

double mean_at(const nlohmann::json& sweep, std::size_t index) { return sweep.at("summary").at(index).at("mean_accuracy"); }

Outcome trends(const Workspace& ws) {
    Check chk;
    ws.prepare("trend",
               spec_json({"RAN1", "RAN2", "RAN3", "SA1", "CT1"}, 0.3, 100, R"("tsg_overlap": 0.9, "words_per_doc": 400)"),
               ws.cfg_trend);
    auto portion = ws.sweep("trend", "portion", "portion");
    auto combos = ws.sweep("trend", "wg-combos", "combos");
    auto lengths = ws.sweep("trend", "segment-length", "lengths");

    double p_small = mean_at(portion, 0), p_full = mean_at(portion, 1);
    double c_cross = mean_at(combos, 0), c_within = mean_at(combos, 1);
    double l_short = mean_at(lengths, 0), l_long = mean_at(lengths, 1);
    chk.require(p_full > p_small, "portion 1.0 not above 0.1");
    chk.require(c_cross > c_within, "cross-TSG combination not above within-TSG");
    chk.require(l_long > l_short, "cap 200 not above cap 25");

    std::ostringstream d;
    d << "portion 0.1 " << fmt("%.4f", p_small) << " < 1.0 " << fmt("%.4f", p_full) << "; within-TSG " << fmt("%.4f", c_within)
      << " < cross-TSG " << fmt("%.4f", c_cross) << "; cap 25 " << fmt("%.4f", l_short) << " < cap 200 " << fmt("%.4f", l_long)
      << " (means over 3 seeds)";
    if (!chk.ok) d << "; " << chk.notes.str();
    return {chk.ok, d.str()};
}

// Regular files under root keyed by relative path, excluding run manifests
// (they carry a timestamp).
std::map<std::string, std::string> tree_bytes(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file() || e.path().filename() == "run_manifest.json") continue;
        files[fs::relative(e.path(), root).string()] = read_file(e.path());
    }
    return files;
}

Outcome determinism(const Workspace& ws) {
    Check chk;
    auto d = ws.dir("separable").string();
    auto r = ws.dir("rerun").string();
    fs::create_directories(ws.dir("rerun"));
    const std::string cfg = "--config " + ws.cfg_default;
    ws.run(cfg + " --threads 1 synth --spec " + d + "/spec.json --out " + r + "/corpus");
    ws.run(cfg + " --threads 1 ingest --root " + d + "/corpus --out " + r + "/clean");
    ws.run(cfg + " --threads 1 build-dataset --cleandocs " + d + "/clean/cleandocs.jsonl --out " + r + "/dataset");
    ws.run(cfg + " --threads 1 train --dataset " + d + "/dataset --out " + r + "/model");
    ws.run(cfg + " --threads 1 evaluate --dataset " + d + "/dataset --model " + d + "/model --out " + r + "/report");
    ws.run("--config " + ws.cfg_trend + " --threads 1 sweep --kind segment-length --dataset " + ws.dir("trend").string() +
           "/dataset --out " + r + "/lengths");

    const std::vector<std::pair<std::string, std::string>> stages = {
        {"corpus", d + "/corpus"}, {"clean", d + "/clean"},   {"dataset", d + "/dataset"},
        {"model", d + "/model"},   {"report", d + "/report"}, {"lengths", ws.dir("trend").string() + "/lengths"}};
    std::size_t files = 0;
    for (const auto& [stage, original] : stages) {
        auto a = tree_bytes(original);
        auto b = tree_bytes(r + "/" + stage);
        chk.require(!a.empty(), stage + " produced no files");
        chk.require(a == b, stage + " differs between runs");
        files += a.size();
    }
    if (chk.ok) chk.notes << files << " files across synth, ingest, build, train, evaluate and sweep are byte-identical";
    return {chk.ok, chk.notes.str()};
}

// ---------------------------------------------------------------------------

struct Criterion {
    int id;
    const char* name;
    double limit;
    std::function<Outcome()> body;
};

}  // namespace

int main() {
    log::set_quiet(true);
    Workspace ws;
    const std::vector<Criterion> criteria = {
        {1, "preprocessing purity", kLimitPurity, preprocessing_purity},
        {2, "segmentation conservation", kLimitSegmentation, segmentation_conservation},
        {3, "split integrity", kLimitSplits, split_integrity},
        {4, "gradient check", kLimitGradient, gradient_check},
        {5, "metric correctness", kLimitMetrics, metric_check},
        {6, "end-to-end synthetic", kLimitEndToEnd, [&] { return end_to_end(ws); }},
        {7, "experiment trends", kLimitTrends, [&] { return trends(ws); }},
        {8, "determinism", kLimitDeterminism, [&] { return determinism(ws); }},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit) {
            o.pass = false;
            o.detail += "; exceeded time limit";
        }
        if (!o.pass) ++failures;
        std::printf("%s [%d] %s: %s (%.1f s, limit %.0f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    c.limit);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
