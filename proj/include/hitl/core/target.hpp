#pragma once

#include "hitl/core/error.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace hitl {

/// Hate target of a pair. OTHER collects everything outside the seven main
/// classes (e.g. OVERWEIGHT, ROMANI).
enum class TargetLabel : int {
    DISABLED = 0,
    JEWS,
    LGBT,
    MIGRANTS,
    MUSLIMS,
    POC,
    WOMEN,
    OTHER,
};

inline constexpr std::size_t kTargetCount = 8;
inline constexpr std::size_t kMainTargetCount = 7;

inline constexpr std::array<TargetLabel, kTargetCount> kAllTargets = {
    TargetLabel::DISABLED, TargetLabel::JEWS, TargetLabel::LGBT,  TargetLabel::MIGRANTS,
    TargetLabel::MUSLIMS,  TargetLabel::POC,  TargetLabel::WOMEN, TargetLabel::OTHER,
};

inline constexpr std::array<TargetLabel, kMainTargetCount> kMainTargets = {
    TargetLabel::DISABLED, TargetLabel::JEWS, TargetLabel::LGBT,  TargetLabel::MIGRANTS,
    TargetLabel::MUSLIMS,  TargetLabel::POC,  TargetLabel::WOMEN,
};

constexpr std::size_t index_of(TargetLabel t) { return static_cast<std::size_t>(t); }

constexpr bool is_main_target(TargetLabel t) { return t != TargetLabel::OTHER; }

constexpr std::string_view to_string(TargetLabel t) {
    switch (t) {
    case TargetLabel::DISABLED: return "DISABLED";
    case TargetLabel::JEWS: return "JEWS";
    case TargetLabel::LGBT: return "LGBT+";
    case TargetLabel::MIGRANTS: return "MIGRANTS";
    case TargetLabel::MUSLIMS: return "MUSLIMS";
    case TargetLabel::POC: return "POC";
    case TargetLabel::WOMEN: return "WOMEN";
    case TargetLabel::OTHER: return "OTHER";
    }
    return "OTHER";
}

/// Exact canonical spelling only.
inline std::optional<TargetLabel> parse_target(std::string_view s) {
    for (TargetLabel t : kAllTargets)
        if (to_string(t) == s) return t;
    return std::nullopt;
}

inline TargetLabel target_from_string(std::string_view s) {
    if (auto t = parse_target(s)) return *t;
    fail(ErrorCode::invalid_argument, "unknown target label '" + std::string(s) + "'");
}

} // namespace hitl
