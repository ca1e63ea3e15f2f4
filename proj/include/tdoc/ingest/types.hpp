#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdoc/error.hpp"
#include "tdoc/working_group.hpp"

namespace tdoc::ingest {

enum class DocKind { Contribution, ChangeRequest, Draft, Template, Unknown };

inline std::string_view doc_kind_name(DocKind k) {
    switch (k) {
        case DocKind::Contribution: return "contribution";
        case DocKind::ChangeRequest: return "change_request";
        case DocKind::Draft: return "draft";
        case DocKind::Template: return "template";
        case DocKind::Unknown: return "unknown";
    }
    return "unknown";
}

enum class ExtractionMethod { DocxXml, Html, PlainText, ExternalConverter };

inline std::string_view extraction_method_name(ExtractionMethod m) {
    switch (m) {
        case ExtractionMethod::DocxXml: return "docx_xml";
        case ExtractionMethod::Html: return "html";
        case ExtractionMethod::PlainText: return "plain_text";
        case ExtractionMethod::ExternalConverter: return "external_converter";
    }
    return "plain_text";
}

struct TDocMeta {
    std::string tdoc_id;
    WorkingGroup wg = WorkingGroup::RAN1;
    int year = 0;
    DocKind doc_kind = DocKind::Unknown;
    std::string source_path;  // "<archive relative path>!<member>" for archive members
    std::optional<std::string> title;
};

struct RawDoc {
    TDocMeta meta;
    std::string text;
    ExtractionMethod extraction_method = ExtractionMethod::PlainText;
};

using PrefixMap = std::map<std::string, WorkingGroup>;

inline PrefixMap default_prefix_map() {
    PrefixMap m;
    for (WorkingGroup wg : kAllWorkingGroups) m.emplace(std::string(wg_tdoc_prefix(wg)), wg);
    return m;
}

struct YearBounds {
    int min = 2009;
    int max = 2023;
    bool contains(int y) const { return y >= min && y <= max; }
};

struct IngestConfig {
    std::filesystem::path root;
    PrefixMap prefix_map = default_prefix_map();
    YearBounds year_bounds;
    int nested_zip_depth = 2;
    // Command template with {in} and {out} placeholders; empty disables .doc.
    std::string external_doc_converter;
    // Case-insensitive substrings of the file name.
    std::vector<std::string> template_patterns = {"template"};
    // Case-sensitive substrings of the file name marking change requests.
    std::vector<std::string> cr_filename_markers = {"_CR", "-CR", " CR"};
    // Case-insensitive substrings of the text head marking drafts.
    std::vector<std::string> draft_markers = {"draft report of", "draft minutes"};
    // Fall back to the leading two digits of the TDoc number for the year.
    bool year_from_digits = true;
};

}  // namespace tdoc::ingest
