#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sbmsel {

// Runs body(i) for i in [0, count) on a small worker pool. Each index owns
// its own substream and accumulator slot, so results are assembled by index
// and never depend on completion order.
inline void parallel_for(int count, const std::function<void(int)>& body,
                         int num_threads = 0) {
    if (count <= 0) return;
    if (num_threads <= 0)
        num_threads = static_cast<int>(std::thread::hardware_concurrency());
    num_threads = std::max(1, std::min(num_threads, count));
    if (num_threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(num_threads);
    for (int t = 0; t < num_threads; ++t) {
        workers.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

} // namespace sbmsel
