#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace planner {

inline std::size_t default_workers() {
    const auto hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(0..count-1) on up to `workers` threads. Results must be written
/// to caller-owned slots keyed by index. The first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t k = 0; k < count; ++k)
            fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < count; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    pool.clear();
    if (error)
        std::rethrow_exception(error);
}

}  // namespace planner
