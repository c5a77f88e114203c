#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace hitl {

/// A metric value that may be undefined (e.g. a macro average over a target
/// with no pairs). Undefined renders as "NaN" and never degrades to 0.
using Metric = std::optional<double>;

struct MacroStat {
    Metric avg;
    Metric std;
};

inline double mean_of(std::span<const double> xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator); undefined below two values.
inline Metric sample_std(std::span<const double> xs) {
    if (xs.size() < 2) return std::nullopt;
    double m = mean_of(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

/// Macro statistics over per-class values. When `require_all` is set, any
/// undefined class makes the whole aggregate undefined; otherwise undefined
/// classes are skipped.
inline MacroStat macro_stat(std::span<const Metric> per_class, bool require_all) {
    std::vector<double> xs;
    for (const Metric& m : per_class) {
        if (m) xs.push_back(*m);
        else if (require_all) return {};
    }
    if (xs.empty()) return {};
    return {mean_of(xs), sample_std(xs)};
}

} // namespace hitl
