#pragma once

#include "hitl/core/error.hpp"
#include "hitl/corpus/record.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace hitl {

/// A verdict on one pending pair. MODIFIED carries both edited texts;
/// accepted verdicts carry a target label; DISCARDED may carry one.
struct ReviewDecision {
    std::string pair_id;
    ReviewStatus verdict = ReviewStatus::DISCARDED;
    std::optional<std::string> hs_edited;
    std::optional<std::string> cn_edited;
    std::optional<TargetLabel> target;
    std::optional<std::string> annotator;
    std::optional<double> elapsed_seconds;
    std::optional<std::string> note;
};

inline nlohmann::ordered_json to_json(const ReviewDecision& d) {
    nlohmann::ordered_json j;
    j["pair_id"] = d.pair_id;
    j["verdict"] = std::string(to_string(d.verdict));
    if (d.hs_edited) j["hs_edited"] = *d.hs_edited;
    if (d.cn_edited) j["cn_edited"] = *d.cn_edited;
    if (d.target) j["target"] = std::string(to_string(*d.target));
    if (d.annotator) j["annotator"] = *d.annotator;
    if (d.elapsed_seconds) j["elapsed_seconds"] = *d.elapsed_seconds;
    if (d.note) j["note"] = *d.note;
    return j;
}

template <typename Json>
ReviewDecision decision_from_json(const Json& j) {
    if (!j.is_object()) fail(ErrorCode::parse_error, "decision must be a JSON object");
    ReviewDecision d;
    d.pair_id = detail::required_string(j, "pair_id");
    auto verdict = detail::required_string(j, "verdict");
    auto status = parse_status(verdict);
    if (!status || *status == ReviewStatus::PENDING)
        fail(ErrorCode::invalid_argument, "field 'verdict' has invalid value '" + verdict + "'");
    d.verdict = *status;
    d.hs_edited = detail::optional_string(j, "hs_edited");
    d.cn_edited = detail::optional_string(j, "cn_edited");
    if (auto t = detail::optional_string(j, "target")) {
        auto label = parse_target(*t);
        if (!label) fail(ErrorCode::invalid_argument, "field 'target' has unknown value '" + *t + "'");
        d.target = *label;
    }
    d.annotator = detail::optional_string(j, "annotator");
    if (auto it = j.find("elapsed_seconds"); it != j.end() && !it->is_null()) {
        if (!it->is_number()) fail(ErrorCode::invalid_argument, "field 'elapsed_seconds' must be a number");
        d.elapsed_seconds = it->template get<double>();
    }
    d.note = detail::optional_string(j, "note");
    return d;
}

/// Checks the verdict/field combination before it touches a record.
inline void validate(const ReviewDecision& d) {
    switch (d.verdict) {
    case ReviewStatus::MODIFIED:
        if (!d.hs_edited) fail(ErrorCode::invalid_argument, "field 'hs_edited' required for MODIFIED");
        if (!d.cn_edited) fail(ErrorCode::invalid_argument, "field 'cn_edited' required for MODIFIED");
        if (!d.target) fail(ErrorCode::invalid_argument, "field 'target' required for MODIFIED");
        break;
    case ReviewStatus::UNTOUCHED:
        if (d.hs_edited || d.cn_edited) fail(ErrorCode::invalid_argument, "UNTOUCHED verdict cannot carry edits");
        if (!d.target) fail(ErrorCode::invalid_argument, "field 'target' required for UNTOUCHED");
        break;
    case ReviewStatus::DISCARDED:
        if (d.hs_edited || d.cn_edited) fail(ErrorCode::invalid_argument, "DISCARDED verdict cannot carry edits");
        break;
    case ReviewStatus::PENDING:
        fail(ErrorCode::invalid_argument, "PENDING is not a verdict");
    }
}

} // namespace hitl
