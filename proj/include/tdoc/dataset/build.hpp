#pragma once

#include <set>
#include <string>
#include <vector>

#include "tdoc/dataset/export.hpp"
#include "tdoc/dataset/manifest.hpp"
#include "tdoc/preprocess/clean.hpp"
#include "tdoc/preprocess/segment.hpp"
#include "tdoc/util/log.hpp"

namespace tdoc::dataset {

struct BuildResult {
    DatasetManifest manifest;
    SegmentStore store;
    std::size_t documents = 0;          // clean documents segmented
    std::size_t dropped_documents = 0;  // already dropped by cleaning
    std::size_t duplicate_documents = 0;
    std::size_t segments = 0;
    std::size_t discarded_tail_words = 0;
};

// Segments every kept document (first occurrence of each doc_id wins) and
// builds the manifest.
inline BuildResult build_dataset(const std::vector<preprocess::CleanDoc>& docs, const SplitPolicy& policy,
                                 std::size_t min_tail_words) {
    BuildResult r;
    std::set<std::string> seen;
    std::vector<SegmentRef> refs;
    for (const auto& doc : docs) {
        if (doc.dropped) {
            ++r.dropped_documents;
            continue;
        }
        if (!seen.insert(doc.meta.tdoc_id).second) {
            ++r.duplicate_documents;
            log::warn("duplicate document id " + doc.meta.tdoc_id + " (" + doc.meta.source_path + "), keeping the first");
            continue;
        }
        ++r.documents;
        auto seg = preprocess::segment_document(doc, policy.max_words, min_tail_words);
        r.discarded_tail_words += seg.discarded_tail_words;
        for (auto& s : seg.segments) {
            refs.push_back(ref_of(s));
            r.store.add(std::move(s));
        }
    }
    r.segments = refs.size();
    r.manifest = build_manifest(refs, policy);
    return r;
}

}  // namespace tdoc::dataset
