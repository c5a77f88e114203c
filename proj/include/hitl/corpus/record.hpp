#pragma once

#include "hitl/core/error.hpp"
#include "hitl/core/target.hpp"
#include "hitl/text/tokenizer.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hitl {

enum class ReviewStatus { PENDING, UNTOUCHED, MODIFIED, DISCARDED };

inline std::string_view to_string(ReviewStatus s) {
    switch (s) {
    case ReviewStatus::PENDING: return "PENDING";
    case ReviewStatus::UNTOUCHED: return "UNTOUCHED";
    case ReviewStatus::MODIFIED: return "MODIFIED";
    case ReviewStatus::DISCARDED: return "DISCARDED";
    }
    return "PENDING";
}

inline std::optional<ReviewStatus> parse_status(std::string_view s) {
    for (auto v : {ReviewStatus::PENDING, ReviewStatus::UNTOUCHED, ReviewStatus::MODIFIED, ReviewStatus::DISCARDED})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

inline bool is_accepted(ReviewStatus s) { return s == ReviewStatus::UNTOUCHED || s == ReviewStatus::MODIFIED; }

/// Special tokens of the training/generation format.
namespace tags {
inline constexpr std::string_view open_hs = "<|startofhs|>";
inline constexpr std::string_view open_hs_prefix = "<|startofhs";
inline constexpr std::string_view end_hs = "<|endofhs|>";
inline constexpr std::string_view open_cn = "<|startofcn|>";
inline constexpr std::string_view end_cn = "<|endofcn|>";

inline std::string labeled_open_hs(TargetLabel t) {
    return "<|startofhs: " + std::string(to_string(t)) + "|>";
}

inline bool contains_any(std::string_view text) {
    for (auto tag : {open_hs_prefix, end_hs, open_cn, end_cn})
        if (text.find(tag) != std::string_view::npos) return true;
    return false;
}
} // namespace tags

struct PairRecord {
    std::string id;
    std::string version;
    std::string hs_original;
    std::string cn_original;
    std::optional<std::string> hs_edited;
    std::optional<std::string> cn_edited;
    ReviewStatus status = ReviewStatus::PENDING;
    std::optional<TargetLabel> target;
    std::optional<std::string> annotator;
    std::string strategy = "SEED";
    std::string chunk_id = "seed";
    std::uint64_t chunk_index = 0;
    /// Set when the system rather than a reviewer decided the status
    /// (duplicate suppression, loop closed with the pair still pending).
    std::optional<std::string> note;

    const std::string& hs_final() const { return hs_edited ? *hs_edited : hs_original; }
    const std::string& cn_final() const { return cn_edited ? *cn_edited : cn_original; }

    bool accepted() const { return is_accepted(status); }

    /// Reviewed by a person, i.e. counted in acceptance-rate denominators.
    bool scrutinised() const { return status != ReviewStatus::PENDING && !note; }

    bool operator==(const PairRecord&) const = default;
};

/// A text is storable when it has at least one token and carries none of the
/// special tokens (which would break the training format).
inline void validate_text(std::string_view field, std::string_view text) {
    if (tokenize(text).empty())
        fail(ErrorCode::invariant_violation, "field '" + std::string(field) + "' has no tokens");
    if (tags::contains_any(text))
        fail(ErrorCode::invariant_violation, "field '" + std::string(field) + "' contains a special token");
}

inline void validate(const PairRecord& r) {
    if (r.id.empty()) fail(ErrorCode::invariant_violation, "field 'id' is empty");
    validate_text("hs_original", r.hs_original);
    validate_text("cn_original", r.cn_original);
    if (r.hs_edited) validate_text("hs_edited", *r.hs_edited);
    if (r.cn_edited) validate_text("cn_edited", *r.cn_edited);
    switch (r.status) {
    case ReviewStatus::MODIFIED:
        if (!r.hs_edited) fail(ErrorCode::invariant_violation, "field 'hs_edited' required for MODIFIED");
        if (!r.cn_edited) fail(ErrorCode::invariant_violation, "field 'cn_edited' required for MODIFIED");
        if (*r.hs_edited == r.hs_original && *r.cn_edited == r.cn_original)
            fail(ErrorCode::invariant_violation, "field 'cn_edited': MODIFIED pair equals its original");
        break;
    case ReviewStatus::UNTOUCHED:
    case ReviewStatus::DISCARDED:
    case ReviewStatus::PENDING:
        if (r.hs_edited) fail(ErrorCode::invariant_violation, "field 'hs_edited' only allowed for MODIFIED");
        if (r.cn_edited) fail(ErrorCode::invariant_violation, "field 'cn_edited' only allowed for MODIFIED");
        break;
    }
    if (r.accepted() && !r.target)
        fail(ErrorCode::invariant_violation, "field 'target' required for accepted pairs");
}

inline nlohmann::ordered_json to_json(const PairRecord& r) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["version"] = r.version;
    j["hs_original"] = r.hs_original;
    j["cn_original"] = r.cn_original;
    if (r.hs_edited) j["hs_edited"] = *r.hs_edited;
    if (r.cn_edited) j["cn_edited"] = *r.cn_edited;
    j["status"] = std::string(to_string(r.status));
    if (r.target) j["target"] = std::string(to_string(*r.target));
    if (r.annotator) j["annotator"] = *r.annotator;
    j["strategy"] = r.strategy;
    j["chunk_id"] = r.chunk_id;
    j["chunk_index"] = r.chunk_index;
    if (r.note) j["note"] = *r.note;
    return j;
}

namespace detail {

template <typename Json>
std::string required_string(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) fail(ErrorCode::invariant_violation, std::string("field '") + key + "' is missing");
    if (!it->is_string()) fail(ErrorCode::invariant_violation, std::string("field '") + key + "' must be a string");
    return it->template get<std::string>();
}

template <typename Json>
std::optional<std::string> optional_string(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail(ErrorCode::invariant_violation, std::string("field '") + key + "' must be a string");
    return it->template get<std::string>();
}

} // namespace detail

/// Parses one record object. Missing `version`, `strategy`, `chunk_id` and
/// `chunk_index` take the supplied defaults; the record is validated.
template <typename Json>
PairRecord record_from_json(const Json& j, std::string_view default_version = {},
                            std::uint64_t default_chunk_index = 0) {
    if (!j.is_object()) fail(ErrorCode::parse_error, "record must be a JSON object");
    PairRecord r;
    r.id = detail::required_string(j, "id");
    r.version = detail::optional_string(j, "version").value_or(std::string(default_version));
    r.hs_original = detail::required_string(j, "hs_original");
    r.cn_original = detail::required_string(j, "cn_original");
    r.hs_edited = detail::optional_string(j, "hs_edited");
    r.cn_edited = detail::optional_string(j, "cn_edited");
    auto status = detail::required_string(j, "status");
    auto parsed_status = parse_status(status);
    if (!parsed_status) fail(ErrorCode::invariant_violation, "field 'status' has unknown value '" + status + "'");
    r.status = *parsed_status;
    if (auto t = detail::optional_string(j, "target")) {
        auto label = parse_target(*t);
        if (!label) fail(ErrorCode::invariant_violation, "field 'target' has unknown value '" + *t + "'");
        r.target = *label;
    }
    r.annotator = detail::optional_string(j, "annotator");
    r.strategy = detail::optional_string(j, "strategy").value_or("SEED");
    r.chunk_id = detail::optional_string(j, "chunk_id").value_or("seed");
    if (auto it = j.find("chunk_index"); it != j.end()) {
        if (!it->is_number_unsigned() && !(it->is_number_integer() && it->template get<std::int64_t>() >= 0))
            fail(ErrorCode::invariant_violation, "field 'chunk_index' must be a non-negative integer");
        r.chunk_index = it->template get<std::uint64_t>();
    } else {
        r.chunk_index = default_chunk_index;
    }
    r.note = detail::optional_string(j, "note");
    validate(r);
    return r;
}

} // namespace hitl
