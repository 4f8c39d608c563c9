#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stylexfer {

/// Worker count from STYLEXFER_THREADS, else hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("STYLEXFER_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [begin, end) split into contiguous chunks. Each index
/// is visited exactly once; results must be written to per-index slots so the
/// output does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn) {
    if (end <= begin) return;
    const std::size_t n = end - begin;
    const std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1 || n < 64) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace stylexfer
