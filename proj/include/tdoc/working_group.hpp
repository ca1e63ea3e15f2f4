#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tdoc/error.hpp"

namespace tdoc {

enum class Tsg : std::uint8_t { RAN, SA, CT };

// The fifteen 3GPP working groups used as class labels. The enumerator value
// is the canonical label index, so the declaration order is load-bearing.
enum class WorkingGroup : std::uint8_t {
    RAN1, RAN2, RAN3, RAN4, RAN5,
    SA1, SA2, SA3, SA4, SA5, SA6,
    CT1, CT3, CT4, CT6,
};

inline constexpr std::size_t kNumWorkingGroups = 15;

inline constexpr std::array<WorkingGroup, kNumWorkingGroups> kAllWorkingGroups = {
    WorkingGroup::RAN1, WorkingGroup::RAN2, WorkingGroup::RAN3, WorkingGroup::RAN4,
    WorkingGroup::RAN5, WorkingGroup::SA1,  WorkingGroup::SA2,  WorkingGroup::SA3,
    WorkingGroup::SA4,  WorkingGroup::SA5,  WorkingGroup::SA6,  WorkingGroup::CT1,
    WorkingGroup::CT3,  WorkingGroup::CT4,  WorkingGroup::CT6,
};

namespace detail {
struct WgInfo {
    std::string_view name;
    Tsg tsg;
    int number;
    std::string_view tdoc_prefix;
};

inline constexpr std::array<WgInfo, kNumWorkingGroups> kWgTable = {{
    {"RAN1", Tsg::RAN, 1, "R1"}, {"RAN2", Tsg::RAN, 2, "R2"}, {"RAN3", Tsg::RAN, 3, "R3"},
    {"RAN4", Tsg::RAN, 4, "R4"}, {"RAN5", Tsg::RAN, 5, "R5"}, {"SA1", Tsg::SA, 1, "S1"},
    {"SA2", Tsg::SA, 2, "S2"},   {"SA3", Tsg::SA, 3, "S3"},   {"SA4", Tsg::SA, 4, "S4"},
    {"SA5", Tsg::SA, 5, "S5"},   {"SA6", Tsg::SA, 6, "S6"},   {"CT1", Tsg::CT, 1, "C1"},
    {"CT3", Tsg::CT, 3, "C3"},   {"CT4", Tsg::CT, 4, "C4"},   {"CT6", Tsg::CT, 6, "C6"},
}};

inline const WgInfo& info(WorkingGroup wg) { return kWgTable[static_cast<std::size_t>(wg)]; }
}  // namespace detail

inline std::size_t label_index(WorkingGroup wg) { return static_cast<std::size_t>(wg); }

inline WorkingGroup wg_from_index(std::size_t index) {
    if (index >= kNumWorkingGroups) throw InvalidInput("working group index out of range: " + std::to_string(index));
    return static_cast<WorkingGroup>(index);
}

inline std::string_view wg_name(WorkingGroup wg) { return detail::info(wg).name; }
inline Tsg wg_tsg(WorkingGroup wg) { return detail::info(wg).tsg; }
inline int wg_number(WorkingGroup wg) { return detail::info(wg).number; }
inline std::string_view wg_tdoc_prefix(WorkingGroup wg) { return detail::info(wg).tdoc_prefix; }

inline std::string_view tsg_name(Tsg tsg) {
    switch (tsg) {
        case Tsg::RAN: return "RAN";
        case Tsg::SA: return "SA";
        case Tsg::CT: return "CT";
    }
    return "?";
}

// Accepts canonical names case-insensitively, with an optional separator
// between TSG and number ("RAN1", "ran_1", "SA-2").
inline std::optional<WorkingGroup> parse_wg(std::string_view text) {
    std::string norm;
    for (char c : text) {
        if (c == '_' || c == '-' || c == ' ') continue;
        norm.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    for (WorkingGroup wg : kAllWorkingGroups)
        if (norm == wg_name(wg)) return wg;
    return std::nullopt;
}

inline WorkingGroup wg_from_name(std::string_view text) {
    auto wg = parse_wg(text);
    if (!wg) throw InvalidInput("unknown working group: " + std::string(text));
    return *wg;
}

inline std::vector<std::string> wg_names(const std::vector<WorkingGroup>& wgs) {
    std::vector<std::string> out;
    out.reserve(wgs.size());
    for (auto wg : wgs) out.emplace_back(wg_name(wg));
    return out;
}

}  // namespace tdoc
