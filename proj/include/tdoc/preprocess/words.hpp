#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tdoc/util/text.hpp"

namespace tdoc::preprocess {

// Byte range [begin, end) of one word in the source text.
struct WordSpan {
    std::size_t begin;
    std::size_t end;
};

// The word contract used for every count in the system: maximal matches of
//   [A-Za-z0-9]+(?:[-'_][A-Za-z0-9]+)*
// Non-ASCII bytes separate words.
inline std::vector<WordSpan> word_spans(std::string_view s) {
    std::vector<WordSpan> out;
    const std::size_t n = s.size();
    std::size_t i = 0;
    while (i < n) {
        if (!text::is_ascii_alnum(s[i])) {
            ++i;
            continue;
        }
        std::size_t begin = i;
        for (;;) {
            while (i < n && text::is_ascii_alnum(s[i])) ++i;
            if (i + 1 < n && (s[i] == '-' || s[i] == '\'' || s[i] == '_') && text::is_ascii_alnum(s[i + 1])) {
                ++i;
                continue;
            }
            break;
        }
        out.push_back({begin, i});
    }
    return out;
}

inline std::size_t count_words(std::string_view s) {
    std::size_t count = 0;
    const std::size_t n = s.size();
    std::size_t i = 0;
    while (i < n) {
        if (!text::is_ascii_alnum(s[i])) {
            ++i;
            continue;
        }
        for (;;) {
            while (i < n && text::is_ascii_alnum(s[i])) ++i;
            if (i + 1 < n && (s[i] == '-' || s[i] == '\'' || s[i] == '_') && text::is_ascii_alnum(s[i + 1])) {
                ++i;
                continue;
            }
            break;
        }
        ++count;
    }
    return count;
}

inline std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    for (auto span : word_spans(s)) out.emplace_back(s.substr(span.begin, span.end - span.begin));
    return out;
}

// Prefix of s ending at the last character of its max_words-th word; the
// whole string when it has no more than max_words words.
inline std::string_view first_words(std::string_view s, std::size_t max_words) {
    if (max_words == 0) return s.substr(0, 0);
    std::size_t seen = 0;
    for (auto span : word_spans(s))
        if (++seen == max_words) return s.substr(0, span.end);
    return s;
}

}  // namespace tdoc::preprocess
