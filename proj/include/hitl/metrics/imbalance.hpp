#pragma once

#include "hitl/core/error.hpp"

#include <cmath>
#include <cstdint>
#include <span>

namespace hitl {

enum class ImbalanceDistance { euclidean };

/// Imbalance Degree of a class-count vector.
///
/// With proportions p, the uniform distribution e and m minority classes
/// (p_i < 1/K), ID = d(p, e) / d(iota_m, e) + (m - 1), where iota_m is the
/// distribution with m minority classes that lies farthest from e. ID is 0
/// for a perfectly balanced vector. Minority membership is decided in exact
/// integer arithmetic so the result is invariant under scaling the counts.
inline double imbalance_degree(std::span<const std::uint64_t> counts,
                               ImbalanceDistance distance = ImbalanceDistance::euclidean) {
    const std::size_t k = counts.size();
    if (k < 2) fail(ErrorCode::invalid_argument, "imbalance degree needs at least two classes");
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) fail(ErrorCode::invalid_argument, "imbalance degree of an empty distribution");

    std::size_t minority = 0;
    for (auto c : counts)
        if (c * k < total) ++minority;
    if (minority == 0) return 0.0;

    const double kd = static_cast<double>(k);
    const double e = 1.0 / kd;
    double sq = 0.0;
    for (auto c : counts) {
        double p = static_cast<double>(c) / static_cast<double>(total);
        sq += (p - e) * (p - e);
    }
    double num = std::sqrt(sq);
    double den = 0.0;
    switch (distance) {
    case ImbalanceDistance::euclidean:
        den = std::sqrt(static_cast<double>(minority) * static_cast<double>(minority + 1)) / kd;
        break;
    }
    return num / den + static_cast<double>(minority - 1);
}

} // namespace hitl
