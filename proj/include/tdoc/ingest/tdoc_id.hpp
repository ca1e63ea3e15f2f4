#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdoc/ingest/types.hpp"
#include "tdoc/util/text.hpp"

namespace tdoc::ingest {

struct TdocIdMatch {
    std::string tdoc_id;  // "<prefix>-<digits>"
    WorkingGroup wg;
    std::string digits;
};

inline std::string_view basename(std::string_view path) {
    auto slash = path.find_last_of("/\\");
    return slash == std::string_view::npos ? path : path.substr(slash + 1);
}

inline std::string_view stem(std::string_view path) {
    std::string_view b = basename(path);
    auto dot = b.rfind('.');
    return (dot == std::string_view::npos || dot == 0) ? b : b.substr(0, dot);
}

inline std::string extension_lower(std::string_view path) {
    std::string_view b = basename(path);
    auto dot = b.rfind('.');
    return dot == std::string_view::npos ? std::string() : text::to_lower(b.substr(dot));
}

// Matches "<prefix>-<digits>" optionally followed by extensions
// ("R1-2009123.docx", "S2-2204567.zip"). The prefix must be in the map.
inline std::optional<TdocIdMatch> parse_tdoc_id(std::string_view filename, const PrefixMap& prefix_map) {
    std::string_view name = basename(filename);
    auto dash = name.find('-');
    if (dash == std::string_view::npos || dash == 0) return std::nullopt;
    std::string prefix;
    for (char c : name.substr(0, dash)) {
        if (!text::is_ascii_alnum(c)) return std::nullopt;
        prefix.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    std::size_t i = dash + 1;
    std::size_t digits_begin = i;
    while (i < name.size() && name[i] >= '0' && name[i] <= '9') ++i;
    if (i == digits_begin) return std::nullopt;
    std::string_view rest = name.substr(i);
    // Only ".ext" groups may follow the number.
    while (!rest.empty()) {
        if (rest[0] != '.') return std::nullopt;
        std::size_t k = 1;
        while (k < rest.size() && text::is_ascii_alnum(rest[k])) ++k;
        if (k == 1) return std::nullopt;
        rest.remove_prefix(k);
    }
    auto it = prefix_map.find(prefix);
    if (it == prefix_map.end()) return std::nullopt;
    std::string digits(name.substr(digits_begin, i - digits_begin));
    return TdocIdMatch{prefix + "-" + digits, it->second, digits};
}

// Leading two digits of a 6- or 7-digit TDoc number are the year within the
// century ("R1-091234" is 2009, "R1-2009123" is 2020).
inline std::optional<int> year_from_tdoc_digits(std::string_view digits) {
    if (digits.size() != 6 && digits.size() != 7) return std::nullopt;
    return 2000 + (digits[0] - '0') * 10 + (digits[1] - '0');
}

inline bool is_year_component(std::string_view c) {
    if (c.size() != 4) return false;
    for (char ch : c)
        if (ch < '0' || ch > '9') return false;
    return c.substr(0, 2) == "19" || c.substr(0, 2) == "20";
}

struct DirectoryLabels {
    std::optional<WorkingGroup> wg;
    std::optional<int> year;
};

// Scans directory components (deepest wins) for a working-group name and a
// four-digit year.
inline DirectoryLabels directory_labels(const std::vector<std::string>& dir_components) {
    DirectoryLabels out;
    for (const auto& c : dir_components) {
        if (auto wg = parse_wg(c)) out.wg = wg;
        if (is_year_component(c)) out.year = std::stoi(c);
    }
    return out;
}

struct MetaResolution {
    std::optional<TDocMeta> meta;
    std::string skip_reason;  // set when meta is empty
    bool wg_conflict = false;
};

// Combines directory labels (authoritative) with the file-name cross-check.
// `names` are candidate file names, innermost first: the member name, then
// each enclosing archive name.
inline MetaResolution resolve_meta(const std::vector<std::string>& dir_components,
                                   const std::vector<std::string>& names, const IngestConfig& config) {
    MetaResolution res;
    DirectoryLabels dir = directory_labels(dir_components);
    std::optional<TdocIdMatch> id;
    for (const auto& n : names) {
        if ((id = parse_tdoc_id(n, config.prefix_map))) break;
    }

    TDocMeta meta;
    if (dir.wg) {
        meta.wg = *dir.wg;
        if (id && id->wg != *dir.wg) res.wg_conflict = true;
    } else if (id) {
        meta.wg = id->wg;
    } else {
        res.skip_reason = "no_label";
        return res;
    }

    if (dir.year) {
        meta.year = *dir.year;
    } else if (id && config.year_from_digits) {
        if (auto y = year_from_tdoc_digits(id->digits)) meta.year = *y;
    }
    if (meta.year == 0) {
        res.skip_reason = "no_year";
        return res;
    }
    if (!config.year_bounds.contains(meta.year)) {
        res.skip_reason = "year_out_of_bounds";
        return res;
    }
    meta.tdoc_id = id ? id->tdoc_id : std::string(stem(names.front()));
    res.meta = std::move(meta);
    return res;
}

}  // namespace tdoc::ingest
