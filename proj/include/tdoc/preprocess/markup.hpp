#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "tdoc/util/text.hpp"

namespace tdoc::preprocess {

namespace detail {

inline bool is_tag_opener(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '/' || c == '!';
}

inline bool is_name_char(char c) { return text::is_ascii_alnum(c) || c == '-' || c == ':'; }

inline std::string tag_name(std::string_view tag_body) {
    std::size_t i = 0;
    if (i < tag_body.size() && (tag_body[i] == '/' || tag_body[i] == '!')) ++i;
    std::string name;
    while (i < tag_body.size() && is_name_char(tag_body[i])) name.push_back(text::ascii_lower(tag_body[i++]));
    return name;
}

inline bool is_block_tag(std::string_view name) {
    static constexpr std::array<std::string_view, 20> kBlock = {
        "p",  "br", "div", "li", "tr", "h1", "h2",      "h3",      "h4",     "h5",
        "h6", "ul", "ol",  "hr", "title", "section", "article", "header", "footer", "blockquote"};
    for (auto b : kBlock)
        if (name == b) return true;
    return false;
}

inline bool is_removed_subtree(std::string_view name) {
    return name == "table" || name == "script" || name == "style";
}

// True when s[pos..] starts with "<name" or "</name" (per `closing`) followed
// by a character that cannot continue the name.
inline bool tag_at(std::string_view s, std::size_t pos, std::string_view name, bool closing) {
    std::size_t k = pos + 1 + (closing ? 1 : 0);
    if (s[pos] != '<' || (closing && (pos + 1 >= s.size() || s[pos + 1] != '/'))) return false;
    if (k + name.size() > s.size() || !text::iequals(s.substr(k, name.size()), name)) return false;
    return k + name.size() == s.size() || !is_name_char(s[k + name.size()]);
}

// End offset (one past '>') of the subtree opened just before `from`, or
// s.size() when it never closes.
inline std::size_t subtree_end(std::string_view s, std::size_t from, std::string_view name) {
    int depth = 1;
    const bool nests = name == "table";
    for (std::size_t p = s.find('<', from); p != std::string_view::npos; p = s.find('<', p + 1)) {
        if (tag_at(s, p, name, true)) {
            if (--depth == 0) {
                std::size_t gt = s.find('>', p);
                return gt == std::string_view::npos ? s.size() : gt + 1;
            }
        } else if (nests && tag_at(s, p, name, false)) {
            std::size_t gt = s.find('>', p);
            if (gt != std::string_view::npos && s[gt - 1] != '/') ++depth;
        }
    }
    return s.size();
}

// Decodes one character reference at s[pos] == '&'. Returns the number of
// input bytes consumed, 0 when there is no recognised entity.
inline std::size_t decode_entity(std::string_view s, std::size_t pos, std::string& out) {
    struct Named {
        std::string_view name;
        std::string_view value;
    };
    static constexpr std::array<Named, 6> kNamed = {{
        {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&apos;", "'"}, {"&nbsp;", " "},
    }};
    for (const auto& e : kNamed) {
        if (s.substr(pos, e.name.size()) == e.name) {
            out += e.value;
            return e.name.size();
        }
    }
    if (pos + 2 < s.size() && s[pos + 1] == '#') {
        std::size_t i = pos + 2;
        bool hex = false;
        if (s[i] == 'x' || s[i] == 'X') {
            hex = true;
            ++i;
        }
        std::size_t digits_begin = i;
        std::uint32_t cp = 0;
        while (i < s.size() && i - digits_begin < 7) {
            char c = s[i];
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
            else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
            else break;
            cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
            ++i;
        }
        if (i > digits_begin && i < s.size() && s[i] == ';') {
            text::append_utf8(out, cp);
            return i + 1 - pos;
        }
    }
    return 0;
}

// One pass over the input. Every change it makes shrinks the text, so
// iterating it reaches a fixed point.
inline std::string strip_markup_pass(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    const std::size_t n = s.size();
    std::size_t i = 0;
    while (i < n) {
        char c = s[i];
        if (c == '<' && i + 1 < n && is_tag_opener(s[i + 1])) {
            if (s.substr(i, 4) == "<!--") {
                std::size_t close = s.find("-->", i + 4);
                if (close != std::string_view::npos) {
                    i = close + 3;
                    continue;
                }
            }
            std::size_t gt = s.find('>', i + 1);
            if (gt == std::string_view::npos) {
                out.push_back(c);
                ++i;
                continue;
            }
            std::string_view body = s.substr(i + 1, gt - i - 1);
            std::string name = tag_name(body);
            bool closing = body.front() == '/';
            bool self_closing = body.back() == '/';
            if (!closing && !self_closing && is_removed_subtree(name)) {
                i = subtree_end(s, gt + 1, name);
                continue;
            }
            if (is_block_tag(name)) out.push_back('\n');
            i = gt + 1;
            continue;
        }
        if (c == '&') {
            if (std::size_t used = decode_entity(s, i, out)) {
                i += used;
                continue;
            }
        }
        out.push_back(c);
        ++i;
    }
    return out;
}

}  // namespace detail

// Removes element tags, drops <table>, <script> and <style> subtrees
// (an unclosed one extends to the end of input), and decodes character
// references. Never fails: a '<' that cannot open a tag is kept. The result
// is a fixed point, so no tag pattern survives, including ones that only
// appear after entity decoding.
inline std::string strip_markup(std::string_view input) {
    std::string cur(input);
    for (;;) {
        std::string next = detail::strip_markup_pass(cur);
        if (next.size() == cur.size()) return next;
        cur = std::move(next);
    }
}

}  // namespace tdoc::preprocess
