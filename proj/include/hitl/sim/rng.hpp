#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace hitl::sim {

/// mt19937_64 with hand-rolled draws. The standard distributions are
/// implementation-defined, so they would break byte-identical runs across
/// standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below(0)");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
        std::uint64_t x;
        do x = engine_();
        while (x > limit);
        return x % n;
    }

    /// Uniform integer in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return p > 0.0 && (p >= 1.0 || unit() < p); }

    /// Index drawn proportionally to non-negative weights; at least one > 0.
    std::size_t weighted(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw std::invalid_argument("Rng::weighted: all weights are zero");
        double x = unit() * total;
        std::size_t last = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            last = i;
            if (x < weights[i]) return i;
            x -= weights[i];
        }
        return last;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace hitl::sim
