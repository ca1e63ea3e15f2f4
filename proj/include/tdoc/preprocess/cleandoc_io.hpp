#pragma once

#include <fstream>
#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "tdoc/error.hpp"
#include "tdoc/preprocess/clean.hpp"

namespace tdoc::preprocess {

// Intermediate cache: one JSON object per document,
// {doc_id, wg, year, text, dropped, reason}.
inline std::string cleandoc_to_jsonl(const CleanDoc& doc) {
    nlohmann::ordered_json j;
    j["doc_id"] = doc.meta.tdoc_id;
    j["wg"] = std::string(wg_name(doc.meta.wg));
    j["year"] = doc.meta.year;
    j["text"] = doc.text;
    j["dropped"] = doc.dropped;
    j["reason"] = doc.reason;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline CleanDoc cleandoc_from_json(const nlohmann::json& j) {
    CleanDoc doc;
    doc.meta.tdoc_id = j.at("doc_id").get<std::string>();
    doc.meta.wg = wg_from_name(j.at("wg").get<std::string>());
    doc.meta.year = j.at("year").get<int>();
    doc.text = j.at("text").get<std::string>();
    doc.dropped = j.at("dropped").get<bool>();
    doc.reason = j.value("reason", std::string());
    return doc;
}

inline void read_cleandocs(const std::string& path, const std::function<void(CleanDoc&&)>& sink) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open clean-document file " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            sink(cleandoc_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const InvalidInput& e) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

}  // namespace tdoc::preprocess
