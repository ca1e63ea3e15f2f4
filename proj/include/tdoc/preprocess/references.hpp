#pragma once

#include <string>
#include <string_view>

#include "tdoc/util/text.hpp"

namespace tdoc::preprocess {

// "references" alone, or a numbered heading such as "7 References" or
// "10.2 references".
inline bool is_references_heading(std::string_view line) {
    std::string lower = text::to_lower(text::trim(line));
    std::string_view t = lower;
    if (t == "references") return true;
    std::size_t i = 0;
    auto digits = [&] {
        std::size_t b = i;
        while (i < t.size() && t[i] >= '0' && t[i] <= '9') ++i;
        return i > b;
    };
    if (!digits()) return false;
    while (i < t.size() && t[i] == '.') {
        ++i;
        if (!digits()) return false;
    }
    std::size_t ws = i;
    while (i < t.size() && text::is_space(t[i])) ++i;
    if (i == ws) return false;
    return t.substr(i) == "references";
}

// Cuts the text at the first references heading, dropping the heading and
// everything after it.
inline std::string truncate_references(std::string_view s) {
    std::size_t start = 0;
    for (;;) {
        std::size_t nl = s.find('\n', start);
        std::string_view line = s.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (is_references_heading(line)) return std::string(s.substr(0, start == 0 ? 0 : start - 1));
        if (nl == std::string_view::npos) return std::string(s);
        start = nl + 1;
    }
}

}  // namespace tdoc::preprocess
