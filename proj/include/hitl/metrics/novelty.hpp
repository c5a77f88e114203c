#pragma once

// Jaccard novelty: for each candidate, one minus its highest Jaccard
// similarity (over unigram token sets) to any reference unit; a corpus score
// is the mean over candidates.

#include "hitl/core/error.hpp"
#include "hitl/metrics/parallel.hpp"
#include "hitl/text/tokenizer.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hitl {

using TokenSet = std::vector<std::int32_t>; // sorted, unique ids

/// Jaccard similarity of two sorted id sets. Two empty sets are identical.
inline double jaccard(const TokenSet& a, const TokenSet& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0, i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++inter; ++i; ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

/// Maps tokens to dense ids so set operations work on integers.
class TokenInterner {
public:
    std::int32_t id(const std::string& token) {
        auto [it, inserted] = ids_.try_emplace(token, static_cast<std::int32_t>(ids_.size()));
        return it->second;
    }

    TokenSet set_of(const TokenSequence& tokens) {
        TokenSet s;
        s.reserve(tokens.size());
        for (const auto& t : tokens) s.push_back(id(t));
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return s;
    }

private:
    std::unordered_map<std::string, std::int32_t> ids_;
};

/// Per-candidate novelty scores against the reference corpus.
inline std::vector<double> novelty_scores(std::span<const TokenSet> candidates,
                                          std::span<const TokenSet> reference,
                                          std::size_t threads = 1) {
    if (reference.empty()) fail(ErrorCode::invalid_argument, "novelty reference corpus is empty");
    std::vector<double> out(candidates.size());
    parallel_for(candidates.size(), threads, [&](std::size_t i) {
        double best = 0.0;
        for (const auto& r : reference) {
            best = std::max(best, jaccard(candidates[i], r));
            if (best == 1.0) break;
        }
        out[i] = 1.0 - best;
    });
    return out;
}

inline double novelty(std::span<const TokenSet> candidates, std::span<const TokenSet> reference,
                      std::size_t threads = 1) {
    if (candidates.empty()) fail(ErrorCode::invalid_argument, "novelty candidate set is empty");
    auto scores = novelty_scores(candidates, reference, threads);
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / static_cast<double>(scores.size());
}

/// Convenience overload over token sequences.
inline double novelty(std::span<const TokenSequence> candidates, std::span<const TokenSequence> reference,
                      std::size_t threads = 1) {
    TokenInterner interner;
    std::vector<TokenSet> c, r;
    c.reserve(candidates.size());
    r.reserve(reference.size());
    for (const auto& t : candidates) c.push_back(interner.set_of(t));
    for (const auto& t : reference) r.push_back(interner.set_of(t));
    return novelty(std::span<const TokenSet>(c), std::span<const TokenSet>(r), threads);
}

} // namespace hitl
