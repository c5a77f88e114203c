#pragma once

// Extraction of HS/CN pairs from raw author output.
//
// Input is split into fragments at every occurrence of "<|startofhs"; each
// fragment must match
//
//     open-hs text <|endofhs|> <|startofcn|> text <|endofcn|>
//
// followed by nothing but whitespace. A fragment that fails yields exactly
// one diagnostic and no pair, so accepted + rejected always equals the number
// of open-hs occurrences. Text before the first open tag is ignored.

#include "hitl/core/target.hpp"
#include "hitl/corpus/record.hpp"
#include "hitl/corpus/training_format.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hitl {

struct ParsedPair {
    std::string hs;
    std::string cn;
    std::optional<TargetLabel> label;

    bool operator==(const ParsedPair&) const = default;
};

struct ParseDiagnostic {
    std::size_t offset = 0; ///< byte offset of the fragment's open tag
    std::string message;
};

struct ParseResult {
    std::vector<ParsedPair> pairs;
    std::vector<ParseDiagnostic> diagnostics;
    std::size_t fragments = 0;
};

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

/// Parses one fragment starting at "<|startofhs"; returns the error message
/// on failure.
inline std::optional<std::string> parse_fragment(std::string_view frag, TrainingFormat format, ParsedPair& out) {
    frag.remove_prefix(tags::open_hs_prefix.size());
    const auto close = frag.find("|>");
    if (close == std::string_view::npos) return "unterminated open tag";
    const auto head = frag.substr(0, close);
    frag.remove_prefix(close + 2);

    out.label.reset();
    if (head.empty()) {
        if (format == TrainingFormat::LABELED) return "missing target label";
    } else {
        if (head.front() != ':') return "malformed open tag";
        if (format == TrainingFormat::PLAIN) return "labeled open tag in plain format";
        const auto name = trim(head.substr(1));
        const auto label = parse_target(name);
        if (!label) return "unknown target label '" + std::string(name) + "'";
        out.label = *label;
    }

    const auto end_hs = frag.find(tags::end_hs);
    if (end_hs == std::string_view::npos) return "truncated: missing <|endofhs|>";
    const auto hs = trim(frag.substr(0, end_hs));
    frag.remove_prefix(end_hs + tags::end_hs.size());

    frag = trim(frag);
    if (frag.substr(0, tags::open_cn.size()) != tags::open_cn) return "missing <|startofcn|>";
    frag.remove_prefix(tags::open_cn.size());

    const auto end_cn = frag.find(tags::end_cn);
    if (end_cn == std::string_view::npos) return "truncated: missing <|endofcn|>";
    const auto cn = trim(frag.substr(0, end_cn));
    frag.remove_prefix(end_cn + tags::end_cn.size());

    if (hs.empty()) return "empty hate speech";
    if (cn.empty()) return "empty counter narrative";
    if (tags::contains_any(hs) || tags::contains_any(cn)) return "stray special token";
    if (!trim(frag).empty()) return "trailing text after <|endofcn|>";
    out.hs = std::string(hs);
    out.cn = std::string(cn);
    return std::nullopt;
}

} // namespace detail

/// Never throws on any input.
inline ParseResult parse_generation(std::string_view raw, TrainingFormat format) {
    ParseResult result;
    std::size_t pos = raw.find(tags::open_hs_prefix);
    while (pos != std::string_view::npos) {
        const auto next = raw.find(tags::open_hs_prefix, pos + 1);
        const auto frag = raw.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        ++result.fragments;
        ParsedPair pair;
        if (auto err = detail::parse_fragment(frag, format, pair))
            result.diagnostics.push_back({pos, std::move(*err)});
        else
            result.pairs.push_back(std::move(pair));
        pos = next;
    }
    return result;
}

} // namespace hitl
