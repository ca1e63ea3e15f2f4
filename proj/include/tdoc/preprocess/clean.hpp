#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tdoc/ingest/types.hpp"
#include "tdoc/preprocess/boilerplate.hpp"
#include "tdoc/preprocess/markup.hpp"
#include "tdoc/preprocess/references.hpp"
#include "tdoc/preprocess/urls.hpp"
#include "tdoc/preprocess/words.hpp"

namespace tdoc::preprocess {

struct PreprocessConfig {
    BoilerplateRules boilerplate;
    std::size_t min_doc_words = 30;
    std::size_t max_words = 200;
    std::size_t min_tail_words = 20;
};

struct CleanDoc {
    ingest::TDocMeta meta;
    std::string text;
    std::vector<std::string> steps_applied;
    bool dropped = false;
    std::string reason;
};

// Collapses whitespace runs within lines, trims lines, and drops empty ones.
inline std::string normalize_whitespace(std::string_view s) {
    std::string out;
    for (auto line : text::split_lines(s)) {
        std::string collapsed = collapse_hspace(text::trim(line));
        if (collapsed.empty()) continue;
        if (!out.empty()) out.push_back('\n');
        out += collapsed;
    }
    return out;
}

// Document-kind gate, then markup, URLs, boilerplate, references and
// whitespace, in that order. Documents left with fewer than min_doc_words
// words are dropped as "empty".
inline CleanDoc clean_document(const ingest::RawDoc& raw, const PreprocessConfig& config) {
    CleanDoc doc;
    doc.meta = raw.meta;
    using ingest::DocKind;
    if (raw.meta.doc_kind == DocKind::ChangeRequest || raw.meta.doc_kind == DocKind::Draft ||
        raw.meta.doc_kind == DocKind::Template) {
        doc.dropped = true;
        doc.reason = "doc_kind:" + std::string(ingest::doc_kind_name(raw.meta.doc_kind));
        return doc;
    }

    std::string t = strip_markup(raw.text);
    doc.steps_applied.emplace_back("strip_markup");
    t = remove_urls(t);
    doc.steps_applied.emplace_back("remove_urls");
    t = remove_boilerplate(t, config.boilerplate);
    doc.steps_applied.emplace_back("remove_boilerplate");
    t = truncate_references(t);
    doc.steps_applied.emplace_back("truncate_references");
    t = normalize_whitespace(t);
    doc.steps_applied.emplace_back("normalize_whitespace");
    doc.text = std::move(t);

    if (count_words(doc.text) < config.min_doc_words) {
        doc.dropped = true;
        doc.reason = "empty";
    }
    return doc;
}

}  // namespace tdoc::preprocess
