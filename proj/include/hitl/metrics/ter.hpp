#pragma once

// Translation Edit Rate between a hypothesis and a reference token sequence.
//
// The score is (shifts + word edit distance) / |reference|. Shifts are found
// greedily: every step evaluates every block move (block length <= max_block,
// any destination) and applies the one with the lowest resulting edit
// distance, provided it lowers the total cost. Ties go to the move that comes
// first in (start, length, destination) order. Candidates whose best possible
// outcome cannot beat the current best are skipped: moving a block of length
// L changes the edit distance by at most 2L.

#include "hitl/core/error.hpp"
#include "hitl/metrics/edit_distance.hpp"
#include "hitl/text/tokenizer.hpp"

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace hitl {

struct TerOptions {
    std::size_t max_block = 10;
    std::size_t max_shifts = 50;
};

struct TerResult {
    double score = 0.0;
    std::size_t shifts = 0;
    std::size_t edits = 0;
    std::size_t reference_length = 0;
};

/// A block move: take `length` tokens starting at `start`, then reinsert them
/// at index `destination` of the remaining sequence.
struct BlockShift {
    std::size_t start = 0;
    std::size_t length = 0;
    std::size_t destination = 0;
};

template <typename T>
void apply_shift(std::span<const T> in, const BlockShift& s, std::vector<T>& out) {
    out.clear();
    out.reserve(in.size());
    const auto block_begin = in.begin() + static_cast<std::ptrdiff_t>(s.start);
    const auto block_end = block_begin + static_cast<std::ptrdiff_t>(s.length);
    std::vector<T> remainder(in.begin(), block_begin);
    remainder.insert(remainder.end(), block_end, in.end());
    const auto split = remainder.begin() + static_cast<std::ptrdiff_t>(s.destination);
    out.insert(out.end(), remainder.begin(), split);
    out.insert(out.end(), block_begin, block_end);
    out.insert(out.end(), split, remainder.end());
}

namespace detail {

struct InternedPair {
    std::vector<std::int32_t> hyp;
    std::vector<std::int32_t> ref;
    std::size_t alphabet = 0;
};

inline InternedPair intern(const TokenSequence& hyp, const TokenSequence& ref) {
    std::unordered_map<std::string, std::int32_t> ids;
    InternedPair out;
    auto id_of = [&](const std::string& tok) {
        auto [it, inserted] = ids.try_emplace(tok, static_cast<std::int32_t>(ids.size()));
        return it->second;
    };
    out.ref.reserve(ref.size());
    for (const auto& t : ref) out.ref.push_back(id_of(t));
    out.hyp.reserve(hyp.size());
    for (const auto& t : hyp) out.hyp.push_back(id_of(t));
    out.alphabet = ids.size();
    return out;
}

} // namespace detail

inline TerResult ter_detail(const TokenSequence& hypothesis, const TokenSequence& reference,
                            const TerOptions& options = {}) {
    if (reference.empty()) fail(ErrorCode::invalid_argument, "TER reference is empty");
    auto interned = detail::intern(hypothesis, reference);
    BitParallelEditDistance distance(interned.ref, interned.alphabet);

    std::vector<std::int32_t> current = std::move(interned.hyp);
    std::vector<std::int32_t> candidate(current.size());
    std::vector<std::int32_t> remainder;
    std::size_t current_ed = distance(current);
    std::size_t shifts = 0;

    while (shifts < options.max_shifts && current_ed >= 2) {
        const std::size_t n = current.size();
        std::size_t best_ed = current_ed - 1; // a move must reach current_ed - 2 to pay for itself
        bool found = false;
        BlockShift best;
        for (std::size_t start = 0; start < n; ++start) {
            const std::size_t max_len = std::min(options.max_block, n - start);
            for (std::size_t len = 1; len <= max_len; ++len) {
                if (current_ed >= best_ed + 2 * len) continue;
                const auto block_begin = current.begin() + static_cast<std::ptrdiff_t>(start);
                const auto block_end = block_begin + static_cast<std::ptrdiff_t>(len);
                remainder.assign(current.begin(), block_begin);
                remainder.insert(remainder.end(), block_end, current.end());
                for (std::size_t dest = 0; dest <= remainder.size(); ++dest) {
                    if (dest == start) continue;
                    auto out = std::copy_n(remainder.begin(), dest, candidate.begin());
                    out = std::copy(block_begin, block_end, out);
                    std::copy(remainder.begin() + static_cast<std::ptrdiff_t>(dest), remainder.end(), out);
                    const std::size_t ed = distance(candidate);
                    if (ed < best_ed) {
                        best_ed = ed;
                        best = {start, len, dest};
                        found = true;
                    }
                }
            }
        }
        if (!found) break;
        std::vector<std::int32_t> next;
        apply_shift<std::int32_t>(current, best, next);
        current.swap(next);
        current_ed = best_ed;
        ++shifts;
    }

    TerResult r;
    r.shifts = shifts;
    r.edits = current_ed;
    r.reference_length = reference.size();
    r.score = static_cast<double>(shifts + current_ed) / static_cast<double>(reference.size());
    return r;
}

inline double ter(const TokenSequence& hypothesis, const TokenSequence& reference,
                  const TerOptions& options = {}) {
    return ter_detail(hypothesis, reference, options).score;
}

} // namespace hitl
