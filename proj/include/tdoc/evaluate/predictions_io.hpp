#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdoc/error.hpp"
#include "tdoc/evaluate/metrics.hpp"
#include "tdoc/working_group.hpp"

namespace tdoc::evaluate {

inline constexpr double kProbaSumTolerance = 1e-6;

struct PredictionsFile {
    std::vector<Prediction> predictions;
    std::string model_id;
};

inline std::string prediction_to_jsonl(const Prediction& p, const std::vector<WorkingGroup>& label_set,
                                       const std::string& model_id) {
    nlohmann::ordered_json j;
    j["doc_id"] = p.doc_id;
    j["seg_index"] = p.seg_index;
    j["true_label"] = std::string(wg_name(label_set.at(p.true_label)));
    j["predicted_label"] = std::string(wg_name(label_set.at(p.predicted_label)));
    j["proba"] = p.proba;
    j["model_id"] = model_id;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& preds,
                              const std::vector<WorkingGroup>& label_set, const std::string& model_id) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& p : preds) out << prediction_to_jsonl(p, label_set, model_id) << '\n';
    if (!out) throw Error("write failed for " + path.string());
}

namespace detail {

inline std::size_t label_position(const nlohmann::json& j, const char* key, const std::vector<WorkingGroup>& label_set) {
    const auto& v = j.at(key);
    if (!v.is_string()) throw SchemaError(std::string(key) + " must be a string label name");
    auto wg = parse_wg(v.get<std::string>());
    if (!wg || wg_name(*wg) != v.get<std::string>())
        throw SchemaError(std::string(key) + " \"" + v.get<std::string>() + "\" is not a canonical working group name");
    for (std::size_t i = 0; i < label_set.size(); ++i)
        if (label_set[i] == *wg) return i;
    throw SchemaError(std::string(key) + " " + v.get<std::string>() + " is not in the dataset label set");
}

inline Prediction prediction_from_json(const nlohmann::json& j, const std::vector<WorkingGroup>& label_set,
                                       std::string& model_id) {
    static const std::set<std::string> kKeys = {"doc_id", "seg_index", "true_label", "predicted_label", "proba", "model_id"};
    if (!j.is_object()) throw SchemaError("line is not a JSON object");
    for (const auto& [key, _] : j.items())
        if (!kKeys.count(key)) throw SchemaError("unexpected key \"" + key + "\"");
    for (const auto& key : kKeys)
        if (!j.contains(key)) throw SchemaError("missing key \"" + key + "\"");
    Prediction p;
    if (!j["doc_id"].is_string()) throw SchemaError("doc_id must be a string");
    p.doc_id = j["doc_id"].get<std::string>();
    if (!j["seg_index"].is_number_unsigned()) throw SchemaError("seg_index must be a non-negative integer");
    p.seg_index = j["seg_index"].get<std::size_t>();
    p.true_label = label_position(j, "true_label", label_set);
    p.predicted_label = label_position(j, "predicted_label", label_set);
    if (!j["model_id"].is_string()) throw SchemaError("model_id must be a string");
    model_id = j["model_id"].get<std::string>();

    const auto& proba = j["proba"];
    if (!proba.is_array()) throw SchemaError("proba must be an array");
    if (proba.size() != label_set.size())
        throw SchemaError("proba has " + std::to_string(proba.size()) + " entries, expected " +
                          std::to_string(label_set.size()));
    double sum = 0;
    for (const auto& v : proba) {
        if (!v.is_number()) throw SchemaError("proba entries must be numbers");
        double x = v.get<double>();
        if (!std::isfinite(x) || x < 0.0 || x > 1.0) throw SchemaError("proba entry outside [0, 1]");
        p.proba.push_back(x);
        sum += x;
    }
    if (std::abs(sum - 1.0) > kProbaSumTolerance)
        throw SchemaError("proba sums to " + std::to_string(sum) + ", not 1 within 1e-6");
    double top = *std::max_element(p.proba.begin(), p.proba.end());
    if (p.proba[p.predicted_label] < top - kProbaSumTolerance)
        throw SchemaError("predicted_label is not the most probable class");
    return p;
}

}  // namespace detail

// Reads and validates a predictions file against the dataset label set.
// Any violation is a SchemaError naming the file and line.
inline PredictionsFile read_predictions(const std::filesystem::path& path, const std::vector<WorkingGroup>& label_set) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open predictions file " + path.string());
    PredictionsFile out;
    std::set<std::pair<std::string, std::size_t>> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto where = path.string() + ":" + std::to_string(lineno) + ": ";
        if (line.empty()) throw SchemaError(where + "empty line");
        try {
            std::string model_id;
            Prediction p = detail::prediction_from_json(nlohmann::json::parse(line), label_set, model_id);
            if (lineno == 1)
                out.model_id = model_id;
            else if (model_id != out.model_id)
                throw SchemaError("model_id \"" + model_id + "\" differs from the first line's \"" + out.model_id + "\"");
            if (!seen.emplace(p.doc_id, p.seg_index).second)
                throw SchemaError("duplicate prediction for " + p.doc_id + "#" + std::to_string(p.seg_index));
            out.predictions.push_back(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(where + e.what());
        } catch (const SchemaError& e) {
            throw SchemaError(where + e.what());
        }
    }
    if (out.predictions.empty()) throw SchemaError(path.string() + ": no predictions");
    return out;
}

}  // namespace tdoc::evaluate
