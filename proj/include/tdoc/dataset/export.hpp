#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdoc/dataset/manifest.hpp"
#include "tdoc/error.hpp"

namespace tdoc::dataset {

namespace fs = std::filesystem;

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr const char* kSidecarName = "dataset.json";

// Segment text by (doc_id, seg_index).
class SegmentStore {
public:
    void add(Segment s) {
        auto key = std::make_pair(s.doc_id, s.seg_index);
        segments_.insert_or_assign(std::move(key), std::move(s));
    }

    const Segment* find(const std::string& doc_id, std::size_t seg_index) const {
        auto it = segments_.find(std::make_pair(doc_id, seg_index));
        return it == segments_.end() ? nullptr : &it->second;
    }

    const Segment& at(const SegmentRef& r) const {
        const Segment* s = find(r.doc_id, r.seg_index);
        if (!s) throw ExportError("dangling segment reference " + r.doc_id + "#" + std::to_string(r.seg_index));
        return *s;
    }

    std::size_t size() const { return segments_.size(); }

private:
    std::map<std::pair<std::string, std::size_t>, Segment> segments_;
};

inline std::string split_file_name(const std::string& split) { return split + ".jsonl"; }

inline std::string segment_to_jsonl(const Segment& s) {
    nlohmann::ordered_json j;
    j["doc_id"] = s.doc_id;
    j["seg_index"] = s.seg_index;
    j["text"] = s.text;
    j["label"] = std::string(wg_name(s.label));
    j["year"] = s.year;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline nlohmann::ordered_json year_range_json(const YearRange& r) { return nlohmann::ordered_json::array({r.first, r.last}); }

inline nlohmann::ordered_json sidecar_json(const DatasetManifest& m) {
    nlohmann::ordered_json j;
    j["format_version"] = kDatasetFormatVersion;
    j["label_set"] = wg_names(m.label_set);
    j["policy"] = {
        {"train_years", year_range_json(m.filters.train_years)},
        {"test_years", year_range_json(m.filters.test_years)},
        {"validation_fraction", m.filters.validation_fraction},
        {"wg_set", wg_names(m.filters.wg_set)},
        {"fraction", m.filters.fraction},
        {"max_words", m.filters.max_words},
        {"balance", m.filters.balance},
    };
    j["seed"] = m.seed;
    j["excluded_segments"] = m.excluded_segments;
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto& name : split_names()) {
        nlohmann::ordered_json row = nlohmann::ordered_json::object();
        for (const auto& [wg, n] : m.stats.at(name)) row[std::string(wg_name(wg))] = n;
        counts[name] = row;
    }
    j["counts"] = counts;
    j["files"] = nlohmann::ordered_json::object();
    for (const auto& name : split_names()) j["files"][name] = split_file_name(name);
    return j;
}

inline void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ExportError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ExportError("write failed for " + path.string());
}

// Writes <out>/{train,validation,test}.jsonl and the dataset.json sidecar.
// Every reference is resolved before anything is written.
inline void export_dataset(const DatasetManifest& m, const SegmentStore& store, const fs::path& out) {
    if (auto problems = check_manifest(m); !problems.empty())
        throw ExportError("manifest is not self-consistent: " + problems.front());
    std::map<std::string, std::string> bodies;
    for (const auto& name : split_names()) {
        std::string body;
        for (const auto& r : m.split(name)) {
            const Segment& s = store.at(r);
            if (s.label != r.label || s.year != r.year)
                throw ExportError("segment " + r.doc_id + "#" + std::to_string(r.seg_index) +
                                  " disagrees with its manifest reference");
            body += segment_to_jsonl(s);
            body.push_back('\n');
        }
        bodies[name] = std::move(body);
    }
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ExportError("cannot create " + out.string() + ": " + ec.message());
    for (const auto& [name, body] : bodies) write_text_file(out / split_file_name(name), body);
    write_text_file(out / kSidecarName, sidecar_json(m).dump(2) + "\n");
}

struct ImportedDataset {
    DatasetManifest manifest;
    SegmentStore store;
};

inline YearRange year_range_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw SchemaError("year range must be [first, last]");
    return {j[0].get<int>(), j[1].get<int>()};
}

inline std::vector<WorkingGroup> wgs_from_json(const nlohmann::json& j) {
    std::vector<WorkingGroup> out;
    for (const auto& v : j) out.push_back(wg_from_name(v.get<std::string>()));
    return out;
}

inline std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open " + path.string());
    return in;
}

inline nlohmann::json read_sidecar(const fs::path& dir) {
    auto in = open_input(dir / kSidecarName);
    try {
        auto j = nlohmann::json::parse(in);
        if (j.at("format_version").get<int>() != kDatasetFormatVersion)
            throw SchemaError("unsupported dataset format_version in " + (dir / kSidecarName).string());
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError((dir / kSidecarName).string() + ": " + e.what());
    }
}

inline std::vector<WorkingGroup> read_label_set(const fs::path& dir) {
    try {
        return wgs_from_json(read_sidecar(dir).at("label_set"));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError((dir / kSidecarName).string() + ": " + e.what());
    } catch (const InvalidInput& e) {
        throw SchemaError((dir / kSidecarName).string() + ": " + e.what());
    }
}

inline Segment segment_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.size() != 5) throw SchemaError("expected exactly doc_id, seg_index, text, label, year");
    Segment s;
    s.doc_id = j.at("doc_id").get<std::string>();
    s.seg_index = j.at("seg_index").get<std::size_t>();
    s.text = j.at("text").get<std::string>();
    s.label = wg_from_name(j.at("label").get<std::string>());
    s.year = j.at("year").get<int>();
    s.word_count = preprocess::count_words(s.text);
    return s;
}

// Inverse of export_dataset.
inline ImportedDataset import_dataset(const fs::path& dir) {
    ImportedDataset d;
    auto side = read_sidecar(dir);
    auto& m = d.manifest;
    try {
        m.label_set = wgs_from_json(side.at("label_set"));
        const auto& p = side.at("policy");
        m.filters.train_years = year_range_from_json(p.at("train_years"));
        m.filters.test_years = year_range_from_json(p.at("test_years"));
        m.filters.validation_fraction = p.at("validation_fraction").get<double>();
        m.filters.wg_set = wgs_from_json(p.at("wg_set"));
        m.filters.fraction = p.at("fraction").get<double>();
        m.filters.max_words = p.at("max_words").get<std::size_t>();
        m.filters.balance = p.at("balance").get<bool>();
        m.seed = side.at("seed").get<std::uint64_t>();
        m.excluded_segments = side.at("excluded_segments").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError((dir / kSidecarName).string() + ": " + e.what());
    } catch (const InvalidInput& e) {
        throw SchemaError((dir / kSidecarName).string() + ": " + e.what());
    }
    for (const auto& name : split_names()) {
        fs::path path = dir / split_file_name(name);
        auto in = open_input(path);
        auto& refs = m.splits[name];
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                Segment s = segment_from_json(nlohmann::json::parse(line));
                refs.push_back(ref_of(s));
                d.store.add(std::move(s));
            } catch (const nlohmann::json::exception& e) {
                throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
            } catch (const Error& e) {
                throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    m.stats = compute_stats(m);
    if (side.contains("counts")) {
        for (const auto& name : split_names())
            for (const auto& [wg, n] : m.stats.at(name))
                if (side["counts"].value(name, nlohmann::json::object()).value(std::string(wg_name(wg)), std::size_t{0}) != n)
                    throw SchemaError("sidecar counts disagree with " + split_file_name(name) + " for " +
                                      std::string(wg_name(wg)));
    }
    if (auto problems = check_manifest(m); !problems.empty())
        throw SchemaError("imported dataset is inconsistent: " + problems.front());
    return d;
}

}  // namespace tdoc::dataset
