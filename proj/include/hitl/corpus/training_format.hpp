#pragma once

#include "hitl/core/error.hpp"
#include "hitl/corpus/record.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace hitl {

enum class TrainingFormat { PLAIN, LABELED };

inline std::string_view to_string(TrainingFormat f) { return f == TrainingFormat::PLAIN ? "plain" : "labeled"; }

inline TrainingFormat training_format_from_string(std::string_view s) {
    if (s == "plain" || s == "PLAIN") return TrainingFormat::PLAIN;
    if (s == "labeled" || s == "LABELED") return TrainingFormat::LABELED;
    fail(ErrorCode::invalid_argument, "unknown training format '" + std::string(s) + "'");
}

/// Export lines are single-line: CR and LF inside a text become spaces.
inline std::string single_line(std::string_view text) {
    std::string out(text);
    for (char& c : out)
        if (c == '\n' || c == '\r') c = ' ';
    return out;
}

/// `<|startofhs|> hs <|endofhs|> <|startofcn|> cn <|endofcn|>`; the LABELED
/// form opens with `<|startofhs: LABEL|>` instead.
inline std::string training_line(std::string_view hs, std::string_view cn, TrainingFormat format,
                                 std::optional<TargetLabel> label = std::nullopt) {
    std::string line;
    if (format == TrainingFormat::LABELED) {
        if (!label) fail(ErrorCode::invariant_violation, "LABELED export needs a target label");
        line = tags::labeled_open_hs(*label);
    } else {
        line = tags::open_hs;
    }
    line += ' ';
    line += single_line(hs);
    line += ' ';
    line += tags::end_hs;
    line += ' ';
    line += tags::open_cn;
    line += ' ';
    line += single_line(cn);
    line += ' ';
    line += tags::end_cn;
    return line;
}

} // namespace hitl
