#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hitl {

/// Runs body(i) for i in [0, n) on up to `threads` workers using contiguous
/// index ranges. Each index is handled exactly once; callers write results
/// into per-index slots so output does not depend on the thread count.
template <typename Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    threads = std::min(threads, n);
    std::vector<std::thread> workers;
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

} // namespace hitl
