#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace hitl {

/// Plain Levenshtein distance with unit costs, O(|a|*|b|).
template <typename T>
std::size_t levenshtein(std::span<const T> a, std::span<const T> b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            std::size_t best = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            best = std::min({best, up + 1, row[j - 1] + 1});
            row[j] = best;
            diag = up;
        }
    }
    return row[b.size()];
}

/// Bit-parallel edit distance against a fixed pattern over small integer
/// alphabets (Myers' algorithm, block-based for patterns longer than 64).
/// Symbols must lie in [0, alphabet_size).
class BitParallelEditDistance {
public:
    BitParallelEditDistance(std::span<const std::int32_t> pattern, std::size_t alphabet_size)
        : length_(pattern.size()),
          blocks_((pattern.size() + 63) / 64),
          alphabet_(alphabet_size),
          peq_(blocks_ * alphabet_size, 0),
          pv_(blocks_),
          mv_(blocks_) {
        for (std::size_t i = 0; i < pattern.size(); ++i)
            peq_[(i / 64) * alphabet_ + static_cast<std::size_t>(pattern[i])] |= std::uint64_t{1} << (i % 64);
    }

    std::size_t pattern_length() const { return length_; }

    std::size_t operator()(std::span<const std::int32_t> text) {
        if (length_ == 0) return text.size();
        std::fill(pv_.begin(), pv_.end(), ~std::uint64_t{0});
        std::fill(mv_.begin(), mv_.end(), std::uint64_t{0});
        const std::uint64_t last_high = std::uint64_t{1} << ((length_ - 1) % 64);
        std::int64_t score = static_cast<std::int64_t>(length_);
        for (std::int32_t symbol : text) {
            int carry = 1; // the top row grows by one per text symbol
            for (std::size_t b = 0; b < blocks_; ++b) {
                const std::uint64_t high = (b + 1 == blocks_) ? last_high : (std::uint64_t{1} << 63);
                carry = advance(b, static_cast<std::size_t>(symbol), carry, high);
            }
            score += carry;
        }
        return static_cast<std::size_t>(score);
    }

private:
    int advance(std::size_t b, std::size_t symbol, int hin, std::uint64_t high) {
        std::uint64_t eq = peq_[b * alphabet_ + symbol];
        const std::uint64_t pv = pv_[b];
        const std::uint64_t mv = mv_[b];
        const std::uint64_t xv = eq | mv;
        if (hin < 0) eq |= 1;
        const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
        std::uint64_t ph = mv | ~(xh | pv);
        std::uint64_t mh = pv & xh;
        int hout = 0;
        if (ph & high) hout = 1;
        else if (mh & high) hout = -1;
        ph <<= 1;
        mh <<= 1;
        if (hin < 0) mh |= 1;
        else if (hin > 0) ph |= 1;
        pv_[b] = mh | ~(xv | ph);
        mv_[b] = ph & xv;
        return hout;
    }

    std::size_t length_;
    std::size_t blocks_;
    std::size_t alphabet_;
    std::vector<std::uint64_t> peq_;
    std::vector<std::uint64_t> pv_;
    std::vector<std::uint64_t> mv_;
};

} // namespace hitl
