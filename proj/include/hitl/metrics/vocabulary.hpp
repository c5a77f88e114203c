#pragma once

// Vocabulary expansion. Each distinct word of a target's final texts in the
// current version is credited to the author when it appears in both the
// post-edited and the generated texts of that target, otherwise to the
// reviewer. Author words are split by whether the history (all earlier
// versions) already had them, and if so whether under the same target or
// only under other targets; reviewer words are split novel / not novel.

#include "hitl/core/target.hpp"
#include "hitl/metrics/stats.hpp"
#include "hitl/text/tokenizer.hpp"

#include <array>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace hitl {

struct VocabularyBuckets {
    double author_novel = 0.0;
    double author_same_target = 0.0;
    double author_other_target = 0.0;
    double reviewer_novel = 0.0;
    double reviewer_not_novel = 0.0;
    std::size_t words = 0;
};

struct VocabularyExpansion {
    std::array<std::optional<VocabularyBuckets>, kTargetCount> per_target;
    MacroStat author_novel, author_same_target, author_other_target, reviewer_novel, reviewer_not_novel;
};

/// Token streams of one accepted pair as seen by the metric.
struct VocabularyItem {
    TargetLabel target;
    const TokenSequence* generated;
    const TokenSequence* final_text;
};

struct HistoryItem {
    TargetLabel target;
    const TokenSequence* final_text;
};

inline VocabularyExpansion vocabulary_expansion(std::span<const VocabularyItem> current,
                                                std::span<const HistoryItem> history) {
    using WordSet = std::set<std::string>;
    auto add_words = [](WordSet& set, const TokenSequence& tokens) {
        for (const auto& t : tokens)
            if (is_word_token(t)) set.insert(t);
    };

    WordSet history_all;
    std::array<WordSet, kTargetCount> history_by_target;
    for (const auto& h : history) {
        add_words(history_all, *h.final_text);
        add_words(history_by_target[index_of(h.target)], *h.final_text);
    }

    std::array<WordSet, kTargetCount> post_edited, generated;
    std::array<bool, kTargetCount> present{};
    for (const auto& item : current) {
        const auto t = index_of(item.target);
        present[t] = true;
        add_words(post_edited[t], *item.final_text);
        add_words(generated[t], *item.generated);
    }

    VocabularyExpansion out;
    std::array<std::vector<double>, 5> macro;
    for (TargetLabel target : kAllTargets) {
        const auto t = index_of(target);
        if (!present[t] || post_edited[t].empty()) continue;
        std::array<std::size_t, 5> n{};
        for (const auto& w : post_edited[t]) {
            const bool seen = history_all.count(w) > 0;
            if (generated[t].count(w)) {
                if (!seen) ++n[0];
                else if (history_by_target[t].count(w)) ++n[1];
                else ++n[2];
            } else {
                ++n[seen ? 4 : 3];
            }
        }
        const double total = static_cast<double>(post_edited[t].size());
        VocabularyBuckets b;
        b.author_novel = 100.0 * static_cast<double>(n[0]) / total;
        b.author_same_target = 100.0 * static_cast<double>(n[1]) / total;
        b.author_other_target = 100.0 * static_cast<double>(n[2]) / total;
        b.reviewer_novel = 100.0 * static_cast<double>(n[3]) / total;
        b.reviewer_not_novel = 100.0 * static_cast<double>(n[4]) / total;
        b.words = post_edited[t].size();
        out.per_target[t] = b;
        if (is_main_target(target)) {
            macro[0].push_back(b.author_novel);
            macro[1].push_back(b.author_same_target);
            macro[2].push_back(b.author_other_target);
            macro[3].push_back(b.reviewer_novel);
            macro[4].push_back(b.reviewer_not_novel);
        }
    }
    auto stat = [](const std::vector<double>& xs) -> MacroStat {
        if (xs.empty()) return {};
        return {mean_of(xs), sample_std(xs)};
    };
    out.author_novel = stat(macro[0]);
    out.author_same_target = stat(macro[1]);
    out.author_other_target = stat(macro[2]);
    out.reviewer_novel = stat(macro[3]);
    out.reviewer_not_novel = stat(macro[4]);
    return out;
}

} // namespace hitl
