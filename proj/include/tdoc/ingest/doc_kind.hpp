#pragma once

#include <string_view>

#include "tdoc/ingest/tdoc_id.hpp"
#include "tdoc/ingest/types.hpp"
#include "tdoc/util/text.hpp"

namespace tdoc::ingest {

inline constexpr std::size_t kDocKindHeadChars = 2000;

// Precedence: change_request > draft > template > contribution.
inline DocKind classify_doc_kind(std::string_view filename, std::string_view text_head, const IngestConfig& config) {
    text_head = text_head.substr(0, kDocKindHeadChars);
    std::string_view name = basename(filename);

    if (text::icontains(text_head, "CHANGE REQUEST")) return DocKind::ChangeRequest;
    for (const auto& marker : config.cr_filename_markers)
        if (!marker.empty() && name.find(marker) != std::string_view::npos) return DocKind::ChangeRequest;

    if (text::istarts_with(stem(name), "draft")) return DocKind::Draft;
    for (const auto& marker : config.draft_markers)
        if (!marker.empty() && text::icontains(text_head, marker)) return DocKind::Draft;

    for (const auto& pattern : config.template_patterns)
        if (!pattern.empty() && text::icontains(name, pattern)) return DocKind::Template;

    return DocKind::Contribution;
}

inline DocKind classify_doc_kind(const TDocMeta& meta, std::string_view text_head, const IngestConfig& config) {
    std::string_view src = meta.source_path;
    auto bang = src.rfind('!');
    if (bang != std::string_view::npos) src = src.substr(bang + 1);
    return classify_doc_kind(src, text_head, config);
}

}  // namespace tdoc::ingest
