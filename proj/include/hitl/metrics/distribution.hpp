#pragma once

#include "hitl/core/error.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace hitl {

enum class FrequencyMode { absolute, percentage };

struct BalanceError {
    double rmse = 0.0;
    double mse = 0.0;
};

/// Deviation of class counts from the uniform split. Absolute mode compares
/// raw counts with N/K, percentage mode compares 100*c/N with 100/K.
/// mse is reported as rmse*rmse so the two are exactly consistent.
inline BalanceError distribution_balance(std::span<const std::uint64_t> counts, FrequencyMode mode) {
    const std::size_t k = counts.size();
    if (k < 2) fail(ErrorCode::invalid_argument, "distribution balance needs at least two categories");
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) fail(ErrorCode::invalid_argument, "distribution balance of an empty distribution");

    const double n = static_cast<double>(total);
    const double kd = static_cast<double>(k);
    double acc = 0.0;
    for (auto c : counts) {
        double d = 0.0;
        if (mode == FrequencyMode::absolute) d = static_cast<double>(c) - n / kd;
        else d = 100.0 * static_cast<double>(c) / n - 100.0 / kd;
        acc += d * d;
    }
    BalanceError out;
    out.rmse = std::sqrt(acc / kd);
    out.mse = out.rmse * out.rmse;
    return out;
}

/// Share of each count in percent.
inline std::vector<double> coverage_percentages(std::span<const std::uint64_t> counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) fail(ErrorCode::invalid_argument, "coverage of an empty distribution");
    std::vector<double> out;
    out.reserve(counts.size());
    for (auto c : counts) out.push_back(100.0 * static_cast<double>(c) / static_cast<double>(total));
    return out;
}

} // namespace hitl
