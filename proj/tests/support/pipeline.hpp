#pragma once

// Synthetic corpus to built dataset through the real ingest path.

#include <vector>

#include "fixtures.hpp"
#include "tdoc/dataset/build.hpp"
#include "tdoc/dataset/synthetic.hpp"
#include "tdoc/ingest/pipeline.hpp"

namespace tdoc::fixtures {

inline dataset::BuildResult synthetic_dataset(const dataset::SyntheticCorpusSpec& spec,
                                              const dataset::SplitPolicy& policy, std::size_t threads = 1) {
    TempDir tmp;
    dataset::generate_synthetic_corpus(spec, tmp.path());
    ingest::IngestConfig cfg;
    cfg.root = tmp.path();
    preprocess::PreprocessConfig pre;
    pre.max_words = policy.max_words;
    std::vector<preprocess::CleanDoc> clean;
    ingest::run_ingest(cfg, pre, threads, [&](preprocess::CleanDoc&& d) { clean.push_back(std::move(d)); });
    return dataset::build_dataset(clean, policy, pre.min_tail_words);
}

// Split policy matching the synthetic year range: 2015-2019 train era,
// 2020-2023 test.
inline dataset::SplitPolicy synthetic_policy(std::uint64_t seed = 1) {
    dataset::SplitPolicy p;
    p.train_years = {2015, 2019};
    p.test_years = {2020, 2023};
    p.seed = seed;
    return p;
}

}  // namespace tdoc::fixtures
