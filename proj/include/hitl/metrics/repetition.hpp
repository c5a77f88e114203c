#pragma once

#include "hitl/core/error.hpp"
#include "hitl/text/tokenizer.hpp"

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hitl {

struct RepetitionOptions {
    std::size_t window = 1000;
    std::size_t min_trailing_window = 100;
    std::size_t max_order = 4;
};

/// Token windows the repetition rate is computed over: non-overlapping
/// windows of `window` tokens; a shorter trailing window is kept when it has
/// at least `min_trailing_window` tokens. A corpus shorter than one window
/// is a single window.
inline std::vector<std::pair<std::size_t, std::size_t>> repetition_windows(std::size_t total,
                                                                           const RepetitionOptions& o) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (total <= o.window) {
        out.emplace_back(0, total);
        return out;
    }
    std::size_t begin = 0;
    for (; begin + o.window <= total; begin += o.window) out.emplace_back(begin, begin + o.window);
    if (total - begin >= o.min_trailing_window) out.emplace_back(begin, total);
    return out;
}

/// Repetition rate in percent: the geometric mean over n = 1..4 of the share
/// of n-gram types occurring more than once within a window, with counts
/// pooled over windows. The unit token streams are concatenated in order.
inline double repetition_rate(std::span<const TokenSequence> units, const RepetitionOptions& o = {}) {
    std::vector<std::int32_t> stream;
    {
        std::unordered_map<std::string, std::int32_t> ids;
        for (const auto& u : units)
            for (const auto& t : u) {
                auto [it, inserted] = ids.try_emplace(t, static_cast<std::int32_t>(ids.size()));
                stream.push_back(it->second);
            }
    }
    if (stream.size() < o.max_order)
        fail(ErrorCode::invalid_argument, "repetition rate needs at least " + std::to_string(o.max_order) + " tokens");

    std::vector<std::size_t> repeated(o.max_order + 1, 0), types(o.max_order + 1, 0);
    for (auto [begin, end] : repetition_windows(stream.size(), o)) {
        for (std::size_t n = 1; n <= o.max_order; ++n) {
            if (end - begin < n) continue;
            std::unordered_map<std::string, std::size_t> counts;
            std::string key;
            for (std::size_t i = begin; i + n <= end; ++i) {
                key.assign(reinterpret_cast<const char*>(&stream[i]), n * sizeof(std::int32_t));
                ++counts[key];
            }
            types[n] += counts.size();
            for (const auto& [gram, c] : counts)
                if (c > 1) ++repeated[n];
        }
    }
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= o.max_order; ++n) {
        if (repeated[n] == 0) return 0.0;
        log_sum += std::log(static_cast<double>(repeated[n]) / static_cast<double>(types[n]));
    }
    return 100.0 * std::exp(log_sum / static_cast<double>(o.max_order));
}

} // namespace hitl
