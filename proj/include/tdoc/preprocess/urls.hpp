#pragma once

#include <string>
#include <string_view>

#include "tdoc/util/text.hpp"

namespace tdoc::preprocess {

// Character class of  https?://[A-Za-z0-9._~:/?#\[\]@!$&'()*+,;=%-]+
inline bool is_url_char(char c) {
    if (text::is_ascii_alnum(c)) return true;
    switch (c) {
        case '.': case '_': case '~': case ':': case '/': case '?': case '#': case '[': case ']':
        case '@': case '!': case '$': case '&': case '\'': case '(': case ')': case '*': case '+':
        case ',': case ';': case '=': case '%': case '-':
            return true;
        default:
            return false;
    }
}

// Length of the URL match starting at pos, 0 if none.
inline std::size_t url_match_length(std::string_view s, std::size_t pos) {
    std::size_t k;
    if (s.substr(pos, 7) == "http://") k = pos + 7;
    else if (s.substr(pos, 8) == "https://") k = pos + 8;
    else return 0;
    std::size_t e = k;
    while (e < s.size() && is_url_char(s[e])) ++e;
    return e == k ? 0 : e - pos;
}

// Collapses runs of horizontal whitespace to one space. Newlines are kept so
// that line-based cleaning steps still see the document's lines.
inline std::string collapse_hspace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (text::is_hspace(s[i])) {
            while (i < s.size() && text::is_hspace(s[i])) ++i;
            out.push_back(' ');
        } else {
            out.push_back(s[i++]);
        }
    }
    return out;
}

// Deletes every URL, leaving one space in its place, then collapses
// whitespace runs.
inline std::string remove_urls(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] == 'h') {
            if (std::size_t len = url_match_length(s, i)) {
                out.push_back(' ');
                i += len;
                continue;
            }
        }
        out.push_back(s[i++]);
    }
    return collapse_hspace(out);
}

}  // namespace tdoc::preprocess
