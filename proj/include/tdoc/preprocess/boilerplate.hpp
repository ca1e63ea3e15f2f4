#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tdoc/preprocess/words.hpp"
#include "tdoc/util/text.hpp"

namespace tdoc::preprocess {

struct BoilerplateRules {
    // A trimmed line starting with one of these and then a number is a caption.
    std::vector<std::string> caption_prefixes = {"Figure", "Table", "Fig."};
    // A non-empty line seen this many times (verbatim after trimming) is a
    // running header or footer.
    std::size_t repeated_line_threshold = 3;
    // Minimum run of indented code-like lines treated as pseudo code.
    std::size_t pseudo_code_min_lines = 4;
    std::size_t max_paragraph_words = 500;
};

inline bool is_caption_line(std::string_view line, const BoilerplateRules& rules) {
    std::string_view t = text::trim(line);
    for (const auto& prefix : rules.caption_prefixes) {
        if (prefix.empty() || t.substr(0, prefix.size()) != prefix) continue;
        std::size_t i = prefix.size();
        while (i < t.size() && text::is_hspace(t[i])) ++i;
        if (i < t.size() && t[i] >= '0' && t[i] <= '9') return true;
    }
    return false;
}

// Indented, and carries a brace, an assignment ":=", or a trailing ';'.
inline bool is_code_like_line(std::string_view line) {
    if (line.empty() || !(line[0] == ' ' || line[0] == '\t')) return false;
    std::string_view t = text::trim(line);
    if (t.empty()) return false;
    return t.find('{') != std::string_view::npos || t.find('}') != std::string_view::npos ||
           t.find(":=") != std::string_view::npos || t.back() == ';';
}

// Drops running headers/footers, captions and pseudo-code blocks, then caps
// each remaining paragraph (line) at max_paragraph_words words.
inline std::string remove_boilerplate(std::string_view s, const BoilerplateRules& rules) {
    auto lines = text::split_lines(s);
    std::vector<bool> drop(lines.size(), false);

    std::unordered_map<std::string_view, std::size_t> seen;
    for (auto line : lines) {
        auto t = text::trim(line);
        if (!t.empty()) ++seen[t];
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto t = text::trim(lines[i]);
        if (!t.empty() && rules.repeated_line_threshold > 0 && seen[t] >= rules.repeated_line_threshold) drop[i] = true;
        if (is_caption_line(lines[i], rules)) drop[i] = true;
    }

    if (rules.pseudo_code_min_lines > 0) {
        for (std::size_t i = 0; i < lines.size();) {
            if (!is_code_like_line(lines[i])) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < lines.size() && is_code_like_line(lines[j])) ++j;
            if (j - i >= rules.pseudo_code_min_lines)
                for (std::size_t k = i; k < j; ++k) drop[k] = true;
            i = j;
        }
    }

    std::string out;
    out.reserve(s.size());
    bool first = true;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (drop[i]) continue;
        if (!first) out.push_back('\n');
        first = false;
        out += first_words(lines[i], rules.max_paragraph_words == 0 ? SIZE_MAX : rules.max_paragraph_words);
    }
    return out;
}

}  // namespace tdoc::preprocess
