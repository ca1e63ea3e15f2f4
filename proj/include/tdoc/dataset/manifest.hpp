#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tdoc/error.hpp"
#include "tdoc/preprocess/segment.hpp"
#include "tdoc/util/random.hpp"
#include "tdoc/working_group.hpp"

namespace tdoc::dataset {

using preprocess::Segment;

inline constexpr const char* kTrain = "train";
inline constexpr const char* kValidation = "validation";
inline constexpr const char* kTest = "test";
inline const std::vector<std::string>& split_names() {
    static const std::vector<std::string> names = {kTrain, kValidation, kTest};
    return names;
}

struct SegmentRef {
    std::string doc_id;
    std::size_t seg_index = 0;
    WorkingGroup label = WorkingGroup::RAN1;
    int year = 0;

    auto key() const { return std::pair<const std::string&, std::size_t>(doc_id, seg_index); }
    friend bool operator==(const SegmentRef&, const SegmentRef&) = default;
};

inline SegmentRef ref_of(const Segment& s) { return {s.doc_id, s.seg_index, s.label, s.year}; }

struct YearRange {
    int first = 0;
    int last = 0;

    bool contains(int y) const { return y >= first && y <= last; }
    bool overlaps(const YearRange& o) const { return first <= o.last && o.first <= last; }
    friend bool operator==(const YearRange&, const YearRange&) = default;
};

struct SplitPolicy {
    YearRange train_years{2010, 2019};
    YearRange test_years{2020, 2023};
    double validation_fraction = 0.2;
    std::uint64_t seed = 0;
    // Downsample every class's train-era documents to the minority class.
    bool balance = false;
    // Recorded in the manifest; the cap the segments were produced with.
    std::size_t max_words = 200;

    void check() const {
        if (train_years.first > train_years.last || test_years.first > test_years.last)
            throw ConfigError("year range with first > last");
        if (train_years.overlaps(test_years)) throw ConfigError("train_years and test_years overlap");
        if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
            throw ConfigError("validation_fraction must be in [0, 1)");
    }
};

struct ManifestFilters {
    YearRange train_years;
    YearRange test_years;
    std::vector<WorkingGroup> wg_set;  // empty: no label filter applied
    double fraction = 1.0;
    std::size_t max_words = 200;
    double validation_fraction = 0.2;
    bool balance = false;
    friend bool operator==(const ManifestFilters&, const ManifestFilters&) = default;
};

using SplitStats = std::map<std::string, std::map<WorkingGroup, std::size_t>>;

struct DatasetManifest {
    std::vector<WorkingGroup> label_set;
    std::map<std::string, std::vector<SegmentRef>> splits;
    ManifestFilters filters;
    std::uint64_t seed = 0;
    SplitStats stats;
    std::size_t excluded_segments = 0;  // outside both year ranges at build time

    const std::vector<SegmentRef>& split(const std::string& name) const {
        static const std::vector<SegmentRef> empty;
        auto it = splits.find(name);
        return it == splits.end() ? empty : it->second;
    }

    std::size_t label_position(WorkingGroup wg) const {
        auto it = std::find(label_set.begin(), label_set.end(), wg);
        if (it == label_set.end()) throw InvalidInput("label " + std::string(wg_name(wg)) + " not in label_set");
        return static_cast<std::size_t>(it - label_set.begin());
    }

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

inline SplitStats compute_stats(const DatasetManifest& m) {
    SplitStats stats;
    for (const auto& name : split_names()) {
        auto& row = stats[name];
        for (WorkingGroup wg : m.label_set) row[wg] = 0;
        for (const auto& r : m.split(name)) ++row[r.label];
    }
    return stats;
}

inline std::set<std::string> doc_ids(const std::vector<SegmentRef>& refs) {
    std::set<std::string> ids;
    for (const auto& r : refs) ids.insert(r.doc_id);
    return ids;
}

// Every invariant the manifest promises. Returns human-readable violations;
// empty means consistent.
inline std::vector<std::string> check_manifest(const DatasetManifest& m) {
    std::vector<std::string> problems;
    std::set<WorkingGroup> labels(m.label_set.begin(), m.label_set.end());
    for (const auto& name : split_names()) {
        const YearRange& range = (name == kTest) ? m.filters.test_years : m.filters.train_years;
        for (const auto& r : m.split(name)) {
            if (!labels.count(r.label))
                problems.push_back(name + ": " + r.doc_id + " label " + std::string(wg_name(r.label)) + " not in label_set");
            if (!range.contains(r.year))
                problems.push_back(name + ": " + r.doc_id + " year " + std::to_string(r.year) + " outside range");
        }
    }
    auto train = doc_ids(m.split(kTrain));
    auto val = doc_ids(m.split(kValidation));
    auto test = doc_ids(m.split(kTest));
    for (const auto& id : val)
        if (train.count(id)) problems.push_back("doc " + id + " in both train and validation");
    for (const auto& id : test)
        if (train.count(id) || val.count(id)) problems.push_back("doc " + id + " in both train-era and test");
    if (compute_stats(m) != m.stats) problems.emplace_back("stats do not match splits");
    return problems;
}

// Train and validation together.
inline std::vector<SegmentRef> train_era(const DatasetManifest& m) {
    std::vector<SegmentRef> refs = m.split(kTrain);
    refs.insert(refs.end(), m.split(kValidation).begin(), m.split(kValidation).end());
    return refs;
}

namespace detail {

struct DocGroup {
    std::string doc_id;
    std::vector<SegmentRef> refs;
};

// Groups refs by doc_id in doc_id order; a document must carry one label and
// one year across all its segments.
inline std::vector<DocGroup> group_by_doc(std::vector<SegmentRef> refs) {
    std::sort(refs.begin(), refs.end(), [](const SegmentRef& a, const SegmentRef& b) { return a.key() < b.key(); });
    std::vector<DocGroup> groups;
    for (auto& r : refs) {
        if (groups.empty() || groups.back().doc_id != r.doc_id) {
            groups.push_back({r.doc_id, {}});
        } else {
            const SegmentRef& first = groups.back().refs.front();
            if (first.label != r.label || first.year != r.year)
                throw ManifestError("document " + r.doc_id + " has segments with different labels or years");
            if (groups.back().refs.back().seg_index == r.seg_index)
                throw ManifestError("duplicate segment " + r.doc_id + "#" + std::to_string(r.seg_index));
        }
        groups.back().refs.push_back(std::move(r));
    }
    return groups;
}

// Shuffles the documents and adds each one to validation when doing so moves
// the validation segment count closer to the target. The result is the
// greedy approximation of the closest achievable split; at least one
// document always stays in train.
inline void assign_validation(const std::vector<DocGroup>& docs, double fraction, std::uint64_t seed,
                              std::vector<SegmentRef>& train, std::vector<SegmentRef>& validation) {
    std::size_t total = 0;
    for (const auto& d : docs) total += d.refs.size();
    const double target = fraction * static_cast<double>(total);

    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(seed, 1));
    rng.shuffle(order);

    std::vector<bool> in_val(docs.size(), false);
    std::size_t val_count = 0;
    std::size_t train_docs = docs.size();
    for (std::size_t i : order) {
        if (train_docs <= 1) break;
        double n = static_cast<double>(docs[i].refs.size());
        double v = static_cast<double>(val_count);
        if (std::abs(v + n - target) < std::abs(v - target)) {
            in_val[i] = true;
            val_count += docs[i].refs.size();
            --train_docs;
        }
    }
    for (std::size_t i = 0; i < docs.size(); ++i) {
        auto& dst = in_val[i] ? validation : train;
        dst.insert(dst.end(), docs[i].refs.begin(), docs[i].refs.end());
    }
}

// Per class, keeps a seeded random subset of documents whose segment total
// does not exceed the smallest class's total (at least one document each).
inline std::vector<DocGroup> balance_docs(const std::vector<DocGroup>& docs, std::uint64_t seed) {
    std::map<WorkingGroup, std::vector<std::size_t>> by_label;
    std::map<WorkingGroup, std::size_t> totals;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        by_label[docs[i].refs.front().label].push_back(i);
        totals[docs[i].refs.front().label] += docs[i].refs.size();
    }
    std::size_t minority = SIZE_MAX;
    for (const auto& [_, n] : totals) minority = std::min(minority, n);
    std::vector<bool> keep(docs.size(), false);
    for (auto& [wg, idx] : by_label) {
        Rng rng(derive_seed(seed, 100 + label_index(wg)));
        rng.shuffle(idx);
        std::size_t kept = 0;
        for (std::size_t i : idx) {
            if (kept > 0 && kept + docs[i].refs.size() > minority) continue;
            keep[i] = true;
            kept += docs[i].refs.size();
        }
    }
    std::vector<DocGroup> out;
    for (std::size_t i = 0; i < docs.size(); ++i)
        if (keep[i]) out.push_back(docs[i]);
    return out;
}

inline void sort_refs(std::vector<SegmentRef>& refs) {
    std::sort(refs.begin(), refs.end(), [](const SegmentRef& a, const SegmentRef& b) { return a.key() < b.key(); });
}

inline void require_nonempty(const DatasetManifest& m) {
    if (m.split(kTrain).empty() && m.split(kValidation).empty())
        throw ManifestError("empty split: train (no train-era segments)");
    if (m.split(kTest).empty()) throw ManifestError("empty split: test (no test-era segments)");
}

}  // namespace detail

// Year gate, optional balancing, then a document-level train/validation
// split of the train era. The label set is the labels present in either era,
// in canonical order. Split contents are sorted by (doc_id, seg_index).
inline DatasetManifest build_manifest(const std::vector<SegmentRef>& segments, const SplitPolicy& policy) {
    policy.check();
    DatasetManifest m;
    m.seed = policy.seed;
    m.filters.train_years = policy.train_years;
    m.filters.test_years = policy.test_years;
    m.filters.validation_fraction = policy.validation_fraction;
    m.filters.max_words = policy.max_words;
    m.filters.balance = policy.balance;

    std::vector<SegmentRef> train_era, test_era;
    for (const auto& s : segments) {
        if (policy.train_years.contains(s.year))
            train_era.push_back(s);
        else if (policy.test_years.contains(s.year))
            test_era.push_back(s);
        else
            ++m.excluded_segments;
    }
    if (train_era.empty()) throw ManifestError("empty split: train (no train-era segments)");
    if (test_era.empty()) throw ManifestError("empty split: test (no test-era segments)");

    auto docs = detail::group_by_doc(std::move(train_era));
    auto test_docs = detail::group_by_doc(test_era);  // consistency check only
    if (policy.balance) docs = detail::balance_docs(docs, policy.seed);

    std::set<WorkingGroup> present;
    for (const auto& d : docs) present.insert(d.refs.front().label);
    for (const auto& d : test_docs) present.insert(d.refs.front().label);
    for (WorkingGroup wg : kAllWorkingGroups)
        if (present.count(wg)) m.label_set.push_back(wg);

    std::set<std::string> era_ids;
    for (const auto& d : docs) era_ids.insert(d.doc_id);
    for (const auto& d : test_docs)
        if (era_ids.count(d.doc_id)) throw ManifestError("document " + d.doc_id + " appears in both eras");

    auto& train = m.splits[kTrain];
    auto& val = m.splits[kValidation];
    detail::assign_validation(docs, policy.validation_fraction, policy.seed, train, val);
    detail::sort_refs(train);
    detail::sort_refs(val);
    m.splits[kTest] = std::move(test_era);
    detail::sort_refs(m.splits[kTest]);
    m.stats = compute_stats(m);
    return m;
}

inline DatasetManifest build_manifest(const std::vector<Segment>& segments, const SplitPolicy& policy) {
    std::vector<SegmentRef> refs;
    refs.reserve(segments.size());
    for (const auto& s : segments) refs.push_back(ref_of(s));
    return build_manifest(refs, policy);
}

// Keeps ceil(fraction * N) train-era documents: the prefix of one seeded
// permutation of the documents in doc_id order, so smaller fractions retain
// subsets of larger ones. Validation is re-derived from the kept documents.
inline DatasetManifest subsample(const DatasetManifest& m, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidInput("subsample fraction must be in (0, 1]");
    if (fraction == 1.0) return m;

    auto docs = detail::group_by_doc(train_era(m));
    Rng rng(derive_seed(seed, 2));
    rng.shuffle(docs);
    // The epsilon keeps e.g. 0.7 * 100 = 70.00000000000001 from rounding up.
    auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(docs.size()) - 1e-9));
    keep = std::clamp<std::size_t>(keep, 1, docs.size());
    docs.resize(keep);
    std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });

    DatasetManifest out = m;
    out.splits[kTrain].clear();
    out.splits[kValidation].clear();
    detail::assign_validation(docs, m.filters.validation_fraction, m.seed, out.splits[kTrain], out.splits[kValidation]);
    detail::sort_refs(out.splits[kTrain]);
    detail::sort_refs(out.splits[kValidation]);
    out.filters.fraction = m.filters.fraction * fraction;
    out.stats = compute_stats(out);
    return out;
}

// Restricts every split to the given labels; label_set keeps canonical order.
inline DatasetManifest filter_wgs(const DatasetManifest& m, const std::vector<WorkingGroup>& wg_set) {
    std::set<WorkingGroup> wanted(wg_set.begin(), wg_set.end());
    if (wanted.size() < 2) throw InvalidInput("filter_wgs needs at least two working groups");
    for (WorkingGroup wg : wanted)
        if (std::find(m.label_set.begin(), m.label_set.end(), wg) == m.label_set.end())
            throw InvalidInput("working group " + std::string(wg_name(wg)) + " is not in the manifest's label_set");
    if (wanted.size() == m.label_set.size()) return m;

    DatasetManifest out = m;
    out.label_set.clear();
    for (WorkingGroup wg : m.label_set)
        if (wanted.count(wg)) out.label_set.push_back(wg);
    for (auto& [name, refs] : out.splits)
        std::erase_if(refs, [&](const SegmentRef& r) { return !wanted.count(r.label); });
    out.filters.wg_set = out.label_set;
    detail::require_nonempty(out);
    out.stats = compute_stats(out);
    return out;
}

}  // namespace tdoc::dataset
