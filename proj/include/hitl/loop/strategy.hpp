#pragma once

// Conditioning strategies: how the author prompt for each chunk is built.
//
//   PLAIN  <|startofhs|>
//   SBF    <|startofhs|> statement        statements round-robin over targets
//   LAB    <|startofhs: T|>               T cycles through the 7 main targets
//   ARG    <|startofhs|> gold-hs          gold HSs in pool order
//   MIX    <|startofhs: T|> statement     LAB cycle, statement of target T

#include "hitl/core/error.hpp"
#include "hitl/core/target.hpp"
#include "hitl/corpus/record.hpp"
#include "hitl/corpus/training_format.hpp"
#include "hitl/corpus/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hitl {

enum class StrategyKind { PLAIN, SBF, LAB, ARG, MIX };

inline std::string_view to_string(StrategyKind k) {
    switch (k) {
    case StrategyKind::PLAIN: return "PLAIN";
    case StrategyKind::SBF: return "SBF";
    case StrategyKind::LAB: return "LAB";
    case StrategyKind::ARG: return "ARG";
    case StrategyKind::MIX: return "MIX";
    }
    return "PLAIN";
}

inline StrategyKind strategy_kind_from_string(std::string_view s) {
    for (auto k : {StrategyKind::PLAIN, StrategyKind::SBF, StrategyKind::LAB, StrategyKind::ARG, StrategyKind::MIX})
        if (to_string(k) == s) return k;
    fail(ErrorCode::invalid_argument, "unknown strategy '" + std::string(s) + "'");
}

/// LAB and MIX train and generate with labeled open tags.
inline TrainingFormat training_format_for(StrategyKind k) {
    return (k == StrategyKind::LAB || k == StrategyKind::MIX) ? TrainingFormat::LABELED : TrainingFormat::PLAIN;
}

/// One line of a condition pool: `text` or `label<TAB>text`.
struct PoolEntry {
    std::optional<std::string> label;
    std::string text;

    bool operator==(const PoolEntry&) const = default;
};

using LabelMapping = std::map<std::string, TargetLabel>;

inline std::string normalize_label(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

/// Mapping from the offensive-statement corpus' target groups to our labels.
inline LabelMapping default_sbf_mapping() {
    const std::vector<std::pair<TargetLabel, std::vector<std::string>>> table = {
        {TargetLabel::DISABLED,
         {"mentally disabled folks", "physically disabled folks", "autistic folks", "blind people",
          "folks with down syndrome", "autistic"}},
        {TargetLabel::JEWS, {"jewish folks", "jews", "holocaust", "holocaust victims"}},
        {TargetLabel::LGBT,
         {"gay men", "lesbian women", "trans women", "trans men", "nonbinary folks", "gay folks", "bisexual women",
          "trans people"}},
        {TargetLabel::MIGRANTS, {"immigrants", "illegal immigrants", "refugees"}},
        {TargetLabel::MUSLIMS, {"muslim folks", "islamic folks", "muslims", "islamic"}},
        {TargetLabel::POC, {"black folks", "africans", "africa", "people of color", "african folks", "african", "poc"}},
        {TargetLabel::WOMEN, {"women", "feminists", "feminist"}},
        {TargetLabel::OTHER, {"fat folks", "gypsies"}},
    };
    LabelMapping m;
    for (const auto& [label, names] : table)
        for (const auto& n : names) m.emplace(n, label);
    return m;
}

/// Resolves a pool label: mapping first (case-insensitive), then the
/// canonical label spelling.
inline std::optional<TargetLabel> resolve_label(const LabelMapping& mapping, std::string_view label) {
    if (auto it = mapping.find(normalize_label(label)); it != mapping.end()) return it->second;
    return parse_target(label);
}

inline std::vector<PoolEntry> parse_pool(std::istream& in) {
    std::vector<PoolEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        PoolEntry e;
        if (auto tab = line.find('\t'); tab != std::string::npos) {
            e.label = line.substr(0, tab);
            e.text = line.substr(tab + 1);
        } else {
            e.text = line;
        }
        e.text = single_line(e.text);
        if (tokenize(e.text).empty()) continue;
        if (tags::contains_any(e.text)) fail(ErrorCode::invalid_argument, "pool entry contains a special token");
        out.push_back(std::move(e));
    }
    return out;
}

struct Strategy {
    StrategyKind kind = StrategyKind::PLAIN;
    std::vector<PoolEntry> condition_pool;
    LabelMapping label_mapping;

    TrainingFormat training_format() const { return training_format_for(kind); }
};

inline nlohmann::ordered_json to_json(const Strategy& s) {
    nlohmann::ordered_json j;
    j["kind"] = std::string(to_string(s.kind));
    j["condition_pool"] = nlohmann::ordered_json::array();
    for (const auto& e : s.condition_pool) {
        nlohmann::ordered_json p;
        if (e.label) p["label"] = *e.label;
        p["text"] = e.text;
        j["condition_pool"].push_back(p);
    }
    j["label_mapping"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : s.label_mapping) j["label_mapping"][k] = std::string(to_string(v));
    return j;
}

template <typename Json>
Strategy strategy_from_json(const Json& j) {
    Strategy s;
    s.kind = strategy_kind_from_string(j.at("kind").template get<std::string>());
    if (auto it = j.find("condition_pool"); it != j.end())
        for (const auto& p : *it) {
            PoolEntry e;
            if (p.contains("label")) e.label = p.at("label").template get<std::string>();
            e.text = p.at("text").template get<std::string>();
            s.condition_pool.push_back(std::move(e));
        }
    if (auto it = j.find("label_mapping"); it != j.end())
        for (const auto& [k, v] : it->items()) s.label_mapping[k] = target_from_string(v.template get<std::string>());
    return s;
}

/// Gold hate speech pool: distinct accepted final HS texts of the given
/// versions, in storage order.
inline std::vector<PoolEntry> gold_hs_pool(const std::vector<VersionSnapshot>& versions) {
    std::vector<PoolEntry> out;
    std::set<std::string> seen;
    for (const auto& v : versions)
        for (const auto& r : v.records)
            if (r.accepted() && seen.insert(r.hs_final()).second) out.push_back({std::nullopt, single_line(r.hs_final())});
    return out;
}

struct Condition {
    std::string text;                ///< sent verbatim to the author
    std::optional<TargetLabel> target; ///< intended target, when the strategy has one
};

/// Deterministic condition sequence of a strategy; condition k depends only
/// on k.
class ConditionSchedule {
public:
    explicit ConditionSchedule(Strategy strategy) : strategy_(std::move(strategy)) {
        switch (strategy_.kind) {
        case StrategyKind::PLAIN:
        case StrategyKind::LAB: break;
        case StrategyKind::ARG:
            if (strategy_.condition_pool.empty()) fail(ErrorCode::invalid_argument, "ARG needs a gold HS pool");
            break;
        case StrategyKind::SBF:
        case StrategyKind::MIX: {
            if (strategy_.condition_pool.empty())
                fail(ErrorCode::invalid_argument, std::string(to_string(strategy_.kind)) + " needs a statement pool");
            if (strategy_.label_mapping.empty())
                fail(ErrorCode::invalid_argument, std::string(to_string(strategy_.kind)) + " needs a label mapping");
            for (const auto& e : strategy_.condition_pool) {
                if (!e.label) fail(ErrorCode::invalid_argument, "statement without label: " + e.text);
                auto t = resolve_label(strategy_.label_mapping, *e.label);
                if (!t) fail(ErrorCode::invalid_argument, "statement label '" + *e.label + "' has no mapping");
                by_target_[index_of(*t)].push_back(e.text);
            }
            for (TargetLabel t : kAllTargets)
                if (!by_target_[index_of(t)].empty()) rotation_.push_back(t);
            break;
        }
        }
    }

    const Strategy& strategy() const { return strategy_; }

    Condition at(std::uint64_t k) const {
        const std::string open(tags::open_hs);
        switch (strategy_.kind) {
        case StrategyKind::PLAIN: return {open, std::nullopt};
        case StrategyKind::LAB: {
            const auto t = kMainTargets[k % kMainTargetCount];
            return {tags::labeled_open_hs(t), t};
        }
        case StrategyKind::ARG: {
            const auto& e = strategy_.condition_pool[k % strategy_.condition_pool.size()];
            return {open + " " + e.text, std::nullopt};
        }
        case StrategyKind::SBF: {
            const auto t = rotation_[k % rotation_.size()];
            return {open + " " + statement(t, k / rotation_.size()), t};
        }
        case StrategyKind::MIX: {
            const auto t = kMainTargets[k % kMainTargetCount];
            const auto& pool = by_target_[index_of(t)];
            if (pool.empty()) return {tags::labeled_open_hs(t), t};
            return {tags::labeled_open_hs(t) + " " + statement(t, k / kMainTargetCount), t};
        }
        }
        return {open, std::nullopt};
    }

private:
    const std::string& statement(TargetLabel t, std::uint64_t round) const {
        const auto& pool = by_target_[index_of(t)];
        return pool[round % pool.size()];
    }

    Strategy strategy_;
    std::array<std::vector<std::string>, kTargetCount> by_target_;
    std::vector<TargetLabel> rotation_;
};

} // namespace hitl
