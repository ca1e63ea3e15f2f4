#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include <nlohmann/json.hpp>

#include "../support/cli_runner.hpp"
#include "tdoc/config.hpp"

using namespace tdoc;
using fixtures::read_file;
using fixtures::TempDir;
using fixtures::write_file;
namespace fs = std::filesystem;

namespace {

using Result = fixtures::CliResult;

Result run(const TempDir& tmp, const std::string& args) { return fixtures::run_cli(TDOCCTL_PATH, tmp, args); }

nlohmann::json json_at(const fs::path& p) { return nlohmann::json::parse(read_file(p)); }

// Corpus, clean documents and exported dataset shared by the tests below.
class CliPipeline : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        tmp_ = new TempDir();
        write_file(*tmp_ / "spec.json", R"({"wgs": ["RAN1", "SA1", "CT1"], "alpha": 0.0, "docs_per_wg": 40, "seed": 3})");
        write_file(*tmp_ / "cfg.json", R"({"dataset": {"split": {"train_years": [2015, 2019], "test_years": [2020, 2023]}},
                                          "classifier": {"learning_rate": 0.5}})");
        auto d = [](const char* rel) { return (*tmp_ / rel).string(); };
        ASSERT_EQ(run(*tmp_, "-q synth --spec " + d("spec.json") + " --out " + d("corpus")).code, 0);
        ASSERT_EQ(run(*tmp_, "-q --config " + d("cfg.json") + " ingest --root " + d("corpus") + " --out " + d("ing")).code, 0);
        auto b = run(*tmp_, "-q --config " + d("cfg.json") + " build-dataset --cleandocs " + d("ing/cleandocs.jsonl") +
                                " --out " + d("ds"));
        ASSERT_EQ(b.code, 0) << b.err;
        build_stdout_ = new std::string(b.out);
    }
    static void TearDownTestSuite() {
        delete tmp_;
        delete build_stdout_;
    }

    static std::string p(const char* rel) { return (*tmp_ / rel).string(); }
    static std::string cfg() { return "-q --config " + p("cfg.json") + " "; }

    static TempDir* tmp_;
    static std::string* build_stdout_;
};

TempDir* CliPipeline::tmp_ = nullptr;
std::string* CliPipeline::build_stdout_ = nullptr;

}  // namespace

TEST_F(CliPipeline, DisjointVocabulariesClassifyPerfectly) {
    auto t = run(*tmp_, cfg() + "train --dataset " + p("ds") + " --out " + p("m1"));
    ASSERT_EQ(t.code, 0) << t.err;
    auto e = run(*tmp_, cfg() + "evaluate --dataset " + p("ds") + " --model " + p("m1") + " --out " + p("e1"));
    ASSERT_EQ(e.code, 0) << e.err;
    auto report = json_at(*tmp_ / "e1/report.json");
    EXPECT_EQ(report["accuracy"].get<double>(), 1.0);
    EXPECT_EQ(report["label_set"], nlohmann::json::parse(R"(["RAN1","SA1","CT1"])"));
    for (const char* f : {"report.txt", "predictions.jsonl", "run_manifest.json"}) EXPECT_TRUE(fs::exists(*tmp_ / "e1" / f)) << f;
    auto manifest = json_at(*tmp_ / "e1/run_manifest.json");
    EXPECT_EQ(manifest["command"], "evaluate");
    EXPECT_TRUE(manifest["artifacts"].contains("report.json"));
    EXPECT_EQ(manifest["config"]["classifier"]["learning_rate"], 0.5);
}

TEST_F(CliPipeline, SynthManifestListsEveryCorpusFile) {
    auto manifest = json_at(*tmp_ / "corpus/run_manifest.json");
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(*tmp_ / "corpus"))
        if (e.is_regular_file() && e.path().filename() != "run_manifest.json") {
            ++files;
            EXPECT_TRUE(manifest["artifacts"].contains(fs::relative(e.path(), *tmp_ / "corpus").generic_string())) << e.path();
        }
    EXPECT_EQ(manifest["artifacts"].size(), files);
    EXPECT_EQ(files, 120u);
}

TEST_F(CliPipeline, BuildPrintsPerWgCounts) {
    EXPECT_NE(build_stdout_->find("train_docs"), std::string::npos);
    for (const char* wg : {"RAN1", "SA1", "CT1", "total"}) EXPECT_NE(build_stdout_->find(wg), std::string::npos) << wg;
    for (const char* f : {"train.jsonl", "validation.jsonl", "test.jsonl", "dataset.json", "build_report.json"})
        EXPECT_TRUE(fs::exists(*tmp_ / "ds" / f)) << f;
}

TEST_F(CliPipeline, RerunsProduceByteIdenticalMetrics) {
    ASSERT_EQ(run(*tmp_, cfg() + "--threads 1 train --dataset " + p("ds") + " --out " + p("ma")).code, 0);
    ASSERT_EQ(run(*tmp_, cfg() + "--threads 3 train --dataset " + p("ds") + " --out " + p("mb")).code, 0);
    EXPECT_EQ(read_file(*tmp_ / "ma/model.json"), read_file(*tmp_ / "mb/model.json"));
    EXPECT_EQ(read_file(*tmp_ / "ma/training_log.json"), read_file(*tmp_ / "mb/training_log.json"));
    ASSERT_EQ(run(*tmp_, cfg() + "evaluate --dataset " + p("ds") + " --model " + p("ma") + " --out " + p("ea")).code, 0);
    ASSERT_EQ(run(*tmp_, cfg() + "evaluate --dataset " + p("ds") + " --model " + p("mb") + " --out " + p("eb")).code, 0);
    EXPECT_EQ(read_file(*tmp_ / "ea/report.json"), read_file(*tmp_ / "eb/report.json"));
    EXPECT_EQ(read_file(*tmp_ / "ea/predictions.jsonl"), read_file(*tmp_ / "eb/predictions.jsonl"));

    ASSERT_EQ(run(*tmp_, cfg() + "sweep --kind portion --fractions 0.5,1 --seeds 1,2 --dataset " + p("ds") + " --out " +
                             p("sa")).code,
              0);
    ASSERT_EQ(run(*tmp_, cfg() + "sweep --kind portion --fractions 0.5,1 --seeds 1,2 --dataset " + p("ds") + " --out " +
                             p("sb")).code,
              0);
    EXPECT_EQ(read_file(*tmp_ / "sa/sweep.json"), read_file(*tmp_ / "sb/sweep.json"));
    EXPECT_EQ(read_file(*tmp_ / "sa/sweep.csv"), read_file(*tmp_ / "sb/sweep.csv"));
    EXPECT_EQ(json_at(*tmp_ / "sa/sweep.json")["rows"].size(), 4u);
}

TEST_F(CliPipeline, ExternalPredictionsUseTheSameReportLayout) {
    ASSERT_EQ(run(*tmp_, cfg() + "train --dataset " + p("ds") + " --out " + p("mx")).code, 0);
    ASSERT_EQ(run(*tmp_, cfg() + "evaluate --dataset " + p("ds") + " --model " + p("mx") + " --out " + p("ex")).code, 0);
    auto r = run(*tmp_, cfg() + "evaluate --dataset " + p("ds") + " --predictions " + p("ex/predictions.jsonl") +
                            " --out " + p("ey"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto native = json_at(*tmp_ / "ex/report.json");
    auto external = json_at(*tmp_ / "ey/report.json");
    native.erase("config_fingerprint");
    external.erase("config_fingerprint");
    EXPECT_EQ(native, external);
    EXPECT_TRUE(fs::exists(*tmp_ / "ey/report.txt"));
    auto v = run(*tmp_, "validate-predictions --dataset " + p("ds") + " --predictions " + p("ex/predictions.jsonl"));
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(v.out.rfind("ok: ", 0), 0u);
}

TEST_F(CliPipeline, MalformedPredictionsFailWithLineNumber) {
    ASSERT_EQ(run(*tmp_, cfg() + "train --dataset " + p("ds") + " --out " + p("mz")).code, 0);
    ASSERT_EQ(run(*tmp_, cfg() + "evaluate --dataset " + p("ds") + " --model " + p("mz") + " --out " + p("ez")).code, 0);
    auto body = read_file(*tmp_ / "ez/predictions.jsonl");
    auto second = body.find('\n') + 1;
    auto third = body.find('\n', second);
    auto j = nlohmann::json::parse(body.substr(second, third - second));
    j["proba"] = {0.5, 0.5};
    write_file(*tmp_ / "bad.jsonl", body.substr(0, second) + j.dump() + body.substr(third));
    auto r = run(*tmp_, cfg() + "evaluate --dataset " + p("ds") + " --predictions " + p("bad.jsonl") + " --out " + p("eq"));
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
    EXPECT_NE(r.err.find("bad.jsonl:2:"), std::string::npos) << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
    EXPECT_FALSE(fs::exists(*tmp_ / "eq/report.json"));
}

TEST_F(CliPipeline, RefusesToOverwriteWithoutForce) {
    ASSERT_EQ(run(*tmp_, cfg() + "train --dataset " + p("ds") + " --out " + p("mo")).code, 0);
    auto again = run(*tmp_, cfg() + "train --dataset " + p("ds") + " --out " + p("mo"));
    EXPECT_EQ(again.code, 1);
    EXPECT_NE(again.err.find("--force"), std::string::npos);
    EXPECT_EQ(run(*tmp_, cfg() + "--force train --dataset " + p("ds") + " --out " + p("mo")).code, 0);
}

TEST_F(CliPipeline, UsageErrorsExitTwoWithOneLine) {
    auto both = run(*tmp_, "evaluate --dataset " + p("ds") + " --model " + p("ds") + " --predictions " +
                               p("ing/cleandocs.jsonl") + " --out " + p("u"));
    EXPECT_EQ(both.code, 2);
    auto neither = run(*tmp_, "evaluate --dataset " + p("ds") + " --out " + p("u"));
    EXPECT_EQ(neither.code, 2);
    EXPECT_EQ(neither.err, "error: evaluate needs exactly one of --model or --predictions\n");
    auto kind = run(*tmp_, "sweep --kind everything --dataset " + p("ds") + " --out " + p("u"));
    EXPECT_EQ(kind.code, 2);
    EXPECT_EQ(kind.err.rfind("error: ", 0), 0u);
    EXPECT_EQ(run(*tmp_, "").code, 2);
    EXPECT_EQ(run(*tmp_, "--help").code, 0);
}

TEST_F(CliPipeline, UnknownConfigKeyIsRejected) {
    write_file(*tmp_ / "typo.json", R"({"classifier": {"learning_rte": 0.1}})");
    auto r = run(*tmp_, "--config " + p("typo.json") + " train --dataset " + p("ds") + " --out " + p("mt"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("classifier.learning_rte"), std::string::npos) << r.err;
}

TEST(Config, DefaultsRoundTrip) {
    config::RunConfig c;
    auto j = config::to_json(c);
    EXPECT_EQ(config::to_json(config::from_json(nlohmann::json::parse(j.dump()))).dump(), j.dump());
    EXPECT_EQ(j["sweep"]["fractions"].size(), 6u);
    EXPECT_EQ(j["sweep"]["combos"].size(), 7u);
    EXPECT_EQ(j["dataset"]["split"]["train_years"][0], 2010);
}

TEST(Config, EditedValuesRoundTripAndFeedEveryStage) {
    auto j = nlohmann::json::parse(R"({
        "seed": 42, "threads": 2,
        "ingest": {"root": "/data", "year_bounds": {"min": 2010, "max": 2022}, "prefix_map": {"R1": "RAN1"}},
        "preprocess": {"max_words": 128, "boilerplate": {"max_paragraph_words": 300}},
        "dataset": {"split": {"train_years": [2011, 2018], "validation_fraction": 0.1},
                    "synthetic": {"wgs": ["SA2", "CT4"], "alpha": 0.4, "noise": {"url": 0.0}}},
        "features": {"min_df": 3, "bigrams": true},
        "classifier": {"learning_rate": 0.25, "optimizer": "adagrad"},
        "sweep": {"fractions": [0.5, 1.0], "combos": [["RAN1", "SA1"]]}
    })");
    auto c = config::from_json(j);
    EXPECT_EQ(c.split_policy().seed, 42u);
    EXPECT_EQ(c.split_policy().max_words, 128u);
    EXPECT_EQ(c.synthetic_spec().seed, 42u);
    EXPECT_EQ(c.fit_config().hp.seed, 42u);
    EXPECT_EQ(c.fit_config().threads, 2u);
    EXPECT_EQ(c.ingest.prefix_map.size(), 1u);
    EXPECT_EQ(c.split.train_years, (dataset::YearRange{2011, 2018}));
    EXPECT_EQ(c.synthetic.wgs, (std::vector<WorkingGroup>{WorkingGroup::SA2, WorkingGroup::CT4}));
    EXPECT_TRUE(c.features.bigrams);
    auto again = config::to_json(config::from_json(nlohmann::json::parse(config::to_json(c).dump())));
    EXPECT_EQ(again.dump(), config::to_json(c).dump());
}

TEST(Config, InvalidValuesAreConfigErrors) {
    for (const char* bad : {R"({"dataset": {"split": {"train_years": [2015, 2021]}}})",
                            R"({"dataset": {"split": {"validation_fraction": 1.0}}})",
                            R"({"classifier": {"optimizer": "adam"}})", R"({"classifier": {"learning_rate": "fast"}})",
                            R"({"sweep": {"fractions": [0.0]}})", R"({"sweep": {"combos": [["RAN9"]]}})",
                            R"({"ingest": {"prefix_map": {"R1": "XX"}}})", R"({"dataset": {"synthetic": {"alpha": 2}}})",
                            R"({"features": {"min_df": 0}})", R"({"preprocess": {"boilerplate": {"oops": 1}}})", R"([])"})
        EXPECT_THROW(config::from_json(nlohmann::json::parse(bad)), ConfigError) << bad;
}
