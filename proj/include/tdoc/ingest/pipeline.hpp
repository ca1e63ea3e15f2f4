#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdoc/ingest/extract.hpp"
#include "tdoc/ingest/scan.hpp"
#include "tdoc/preprocess/clean.hpp"
#include "tdoc/util/parallel.hpp"

namespace tdoc::ingest {

struct WgCounts {
    std::size_t raw_docs = 0;
    std::size_t clean_docs = 0;
    std::size_t dropped_docs = 0;
};

struct IngestReport {
    ScanReport scan;
    std::size_t entries_seen = 0;
    std::size_t raw_docs = 0;
    std::map<std::string, std::size_t> skips;    // extraction skip reason -> count
    std::map<std::string, std::size_t> dropped;  // cleaning drop reason -> count
    std::size_t clean_docs = 0;
    std::size_t wg_conflicts = 0;
    std::map<WorkingGroup, WgCounts> per_wg;
    std::map<WorkingGroup, std::map<int, std::size_t>> per_wg_year;  // clean docs

    std::size_t skipped_total() const {
        std::size_t n = 0;
        for (const auto& [_, c] : skips) n += c;
        return n;
    }

    // entries seen = raw docs produced + every skip.
    bool balanced() const { return entries_seen == raw_docs + skipped_total(); }
};

inline nlohmann::ordered_json report_to_json(const IngestReport& r) {
    nlohmann::ordered_json j;
    j["totals"] = {
        {"files_seen", r.scan.files_seen},
        {"archives", r.scan.archives},
        {"entries_seen", r.entries_seen},
        {"raw_docs", r.raw_docs},
        {"clean_docs", r.clean_docs},
        {"skipped", r.skipped_total()},
        {"wg_conflicts", r.wg_conflicts},
    };
    j["scan"] = {
        {"corrupt_archives", r.scan.corrupt_archives},
        {"corrupt_members", r.scan.corrupt_members},
        {"nested_depth_exceeded", r.scan.nested_depth_exceeded},
        {"ignored_files", r.scan.ignored_files},
    };
    j["skips"] = nlohmann::ordered_json::object();
    for (const auto& [reason, n] : r.skips) j["skips"][reason] = n;
    j["dropped"] = nlohmann::ordered_json::object();
    for (const auto& [reason, n] : r.dropped) j["dropped"][reason] = n;
    j["per_wg"] = nlohmann::ordered_json::object();
    for (const auto& [wg, c] : r.per_wg) {
        nlohmann::ordered_json row = {{"raw_docs", c.raw_docs}, {"clean_docs", c.clean_docs}, {"dropped_docs", c.dropped_docs}};
        nlohmann::ordered_json years = nlohmann::ordered_json::object();
        if (auto it = r.per_wg_year.find(wg); it != r.per_wg_year.end())
            for (const auto& [y, n] : it->second) years[std::to_string(y)] = n;
        row["clean_docs_by_year"] = years;
        j["per_wg"][std::string(wg_name(wg))] = row;
    }
    return j;
}

// scan -> extract -> clean. Entries are processed in fixed-size batches by a
// worker pool; every batch is emitted in scan order, so the sink sees the
// same sequence for any thread count.
inline IngestReport run_ingest(const IngestConfig& config, const preprocess::PreprocessConfig& pre,
                               std::size_t threads, const std::function<void(preprocess::CleanDoc&&)>& sink,
                               std::size_t batch_size = 256) {
    IngestReport report;
    std::vector<ArchiveEntry> batch;

    auto flush = [&] {
        std::vector<ExtractResult> extracted(batch.size(), ExtractResult{Skip{}});
        std::vector<preprocess::CleanDoc> cleaned(batch.size());
        parallel_for(batch.size(), threads, [&](std::size_t i) {
            extracted[i] = extract_text(batch[i], config);
            if (extracted[i].ok()) cleaned[i] = preprocess::clean_document(extracted[i].doc(), pre);
        });
        for (std::size_t i = 0; i < batch.size(); ++i) {
            ++report.entries_seen;
            if (extracted[i].wg_conflict) ++report.wg_conflicts;
            if (!extracted[i].ok()) {
                ++report.skips[extracted[i].skip().reason];
                continue;
            }
            ++report.raw_docs;
            auto& doc = cleaned[i];
            auto& counts = report.per_wg[doc.meta.wg];
            ++counts.raw_docs;
            if (doc.dropped) {
                ++counts.dropped_docs;
                ++report.dropped[doc.reason];
            } else {
                ++counts.clean_docs;
                ++report.clean_docs;
                ++report.per_wg_year[doc.meta.wg][doc.meta.year];
            }
            sink(std::move(doc));
        }
        batch.clear();
    };

    report.scan = scan_archives(config.root, config, [&](ArchiveEntry&& e) {
        batch.push_back(std::move(e));
        if (batch.size() >= batch_size) flush();
    });
    flush();
    return report;
}

}  // namespace tdoc::ingest
