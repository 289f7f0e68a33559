#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bhpc {

/// Number of worker threads to use. 0 or negative requests all hardware threads.
inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(0..n_items-1), distributing items over `workers` threads via a shared
/// counter. Items must be independent: fn may only touch state owned by its item,
/// so the result cannot depend on which thread ran which item.
inline void parallel_for(int n_items, int workers, const std::function<void(int)>& fn) {
    workers = resolve_workers(workers);
    if (workers <= 1 || n_items <= 1) {
        for (int i = 0; i < n_items; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n_items) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int n_threads = std::min(workers, n_items);
    pool.reserve(static_cast<size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace bhpc
