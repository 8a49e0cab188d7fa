// detail/parallel.hpp — chunked parallel map over sample points

#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fibercat::detail {

// Runs fn(0..n-1); per-index work must be independent. Results must be
// written into preassigned slots so reductions stay deterministic.
template <typename F>
void parallel_for(int n, int threads, F&& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int i = w; i < n; i += workers) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace fibercat::detail
