#pragma once

// Deterministic reviewer: approves, post-edits or discards with fixed
// probabilities and edits by applying token-level operations.

#include "hitl/corpus/decision.hpp"
#include "hitl/corpus/record.hpp"
#include "hitl/sim/mock_author.hpp"
#include "hitl/sim/rng.hpp"
#include "hitl/text/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

namespace hitl::sim {

enum class EditOp { substitute, insert, remove, shift };

enum class LabelPolicy {
    vocabulary, ///< target whose mock word lists the pair uses most
    fixed,      ///< always `fixed_label`
};

struct ScriptedReviewerConfig {
    std::uint64_t seed = 2;
    double p_untouched = 0.6;
    double p_modified = 0.3;
    /// substitute, insert, remove, shift
    std::array<double, 4> edit_weights = {1, 1, 1, 1};
    std::size_t max_edits = 3;
    /// Probability that a modification also touches the HS.
    double p_edit_hs = 0.3;
    LabelPolicy label_policy = LabelPolicy::vocabulary;
    TargetLabel fixed_label = TargetLabel::OTHER;
    bool label_discards = true;
    std::string annotator = "scripted";
};

template <typename Json>
ScriptedReviewerConfig scripted_reviewer_config_from_json(const Json& j) {
    ScriptedReviewerConfig c;
    c.seed = j.value("seed", c.seed);
    c.p_untouched = j.value("p_untouched", c.p_untouched);
    c.p_modified = j.value("p_modified", c.p_modified);
    if (auto it = j.find("edit_weights"); it != j.end()) {
        c.edit_weights[0] = it->value("substitute", 0.0);
        c.edit_weights[1] = it->value("insert", 0.0);
        c.edit_weights[2] = it->value("delete", 0.0);
        c.edit_weights[3] = it->value("shift", 0.0);
    }
    c.max_edits = j.value("max_edits", c.max_edits);
    c.p_edit_hs = j.value("p_edit_hs", c.p_edit_hs);
    if (auto it = j.find("label_policy"); it != j.end()) {
        const auto s = it->template get<std::string>();
        if (s == "vocabulary") c.label_policy = LabelPolicy::vocabulary;
        else {
            c.label_policy = LabelPolicy::fixed;
            c.fixed_label = target_from_string(s);
        }
    }
    c.label_discards = j.value("label_discards", c.label_discards);
    c.annotator = j.value("annotator", c.annotator);
    return c;
}

/// One applied operation, with positions in the sequence it was applied to.
struct AppliedEdit {
    EditOp op = EditOp::substitute;
    std::size_t position = 0;
    std::size_t length = 1;
    std::size_t destination = 0;
    std::string word;
};

struct ReviewOutcome {
    ReviewDecision decision;
    std::vector<AppliedEdit> hs_edits;
    std::vector<AppliedEdit> cn_edits;
};

class ScriptedReviewer {
public:
    ScriptedReviewer(ScriptedReviewerConfig config, MockVocabulary vocabulary)
        : config_(std::move(config)), vocabulary_(std::move(vocabulary)), rng_(config_.seed) {
        if (config_.p_untouched < 0 || config_.p_modified < 0 || config_.p_untouched + config_.p_modified > 1.0 + 1e-12)
            fail(ErrorCode::invalid_argument, "reviewer probabilities must be non-negative and sum to at most 1");
        if (config_.p_modified > 0 && config_.max_edits == 0)
            fail(ErrorCode::invalid_argument, "max_edits must be positive when modifications are possible");
    }

    const ScriptedReviewerConfig& config() const { return config_; }

    ReviewOutcome review(const PairRecord& r) {
        ReviewOutcome out;
        auto& d = out.decision;
        d.pair_id = r.id;
        d.annotator = config_.annotator;
        const double x = rng_.unit();
        if (x < config_.p_untouched) {
            d.verdict = ReviewStatus::UNTOUCHED;
        } else if (x < config_.p_untouched + config_.p_modified) {
            d.verdict = ReviewStatus::MODIFIED;
            const bool touch_hs = rng_.chance(config_.p_edit_hs);
            d.hs_edited = touch_hs ? edit(r.hs_original, out.hs_edits) : r.hs_original;
            d.cn_edited = edit(r.cn_original, out.cn_edits);
        } else {
            d.verdict = ReviewStatus::DISCARDED;
        }
        if (d.verdict != ReviewStatus::DISCARDED || config_.label_discards) d.target = label(r);
        return out;
    }

    /// Applies one edit operation to `tokens`. Exposed for oracle tests.
    AppliedEdit apply(EditOp op, TokenSequence& tokens) {
        AppliedEdit e;
        e.op = op;
        const std::size_t n = tokens.size();
        if (op == EditOp::remove && n < 2) op = e.op = EditOp::substitute;
        if (op == EditOp::shift && n < 2) op = e.op = EditOp::insert;
        switch (op) {
        case EditOp::substitute: {
            e.position = rng_.below(n);
            e.word = fresh_word(tokens[e.position]);
            tokens[e.position] = e.word;
            break;
        }
        case EditOp::insert: {
            e.position = rng_.below(n + 1);
            e.word = fresh_word({});
            tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(e.position), e.word);
            break;
        }
        case EditOp::remove: {
            e.position = rng_.below(n);
            tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(e.position));
            break;
        }
        case EditOp::shift: {
            e.length = rng_.between(1, std::min<std::size_t>(3, n - 1));
            e.position = rng_.below(n - e.length + 1);
            std::vector<std::string> block(tokens.begin() + static_cast<std::ptrdiff_t>(e.position),
                                           tokens.begin() + static_cast<std::ptrdiff_t>(e.position + e.length));
            tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(e.position),
                         tokens.begin() + static_cast<std::ptrdiff_t>(e.position + e.length));
            e.destination = rng_.below(tokens.size() + 1);
            tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(e.destination), block.begin(), block.end());
            break;
        }
        }
        return e;
    }

private:
    std::string fresh_word(const std::string& avoid) {
        const auto& words = vocabulary_.reviewer_words;
        std::string w = words[rng_.below(words.size())];
        if (w == avoid) w = words[(std::find(words.begin(), words.end(), w) - words.begin() + 1) % words.size()];
        return w;
    }

    static std::string join(const TokenSequence& tokens) {
        std::string s;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (i) s += ' ';
            s += tokens[i];
        }
        return s;
    }

    /// Edited text: the original's tokens joined by spaces after 1..max_edits
    /// operations. Always differs from the original token sequence.
    std::string edit(const std::string& original, std::vector<AppliedEdit>& log) {
        const auto before = tokenize(original);
        auto tokens = before;
        const auto n_ops = rng_.between(1, config_.max_edits);
        for (std::uint64_t i = 0; i < n_ops; ++i)
            log.push_back(apply(static_cast<EditOp>(rng_.weighted(config_.edit_weights)), tokens));
        if (tokens == before) log.push_back(apply(EditOp::substitute, tokens));
        return join(tokens);
    }

    TargetLabel label(const PairRecord& r) {
        if (config_.label_policy == LabelPolicy::fixed) return config_.fixed_label;
        auto tokens = tokenize(r.hs_original);
        for (auto& t : tokenize(r.cn_original)) tokens.push_back(std::move(t));
        return vocabulary_.classify(tokens).value_or(TargetLabel::OTHER);
    }

    ScriptedReviewerConfig config_;
    MockVocabulary vocabulary_;
    Rng rng_;
};

} // namespace hitl::sim
