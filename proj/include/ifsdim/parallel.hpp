#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace ifsdim {

// Runs fn(i) for i in [0, n). Each index writes only to its own output slot,
// so the result is identical for any worker count; reductions happen later
// in index order.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned max_threads = 0) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (max_threads != 0 && hw > max_threads) hw = max_threads;
    if (hw <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    unsigned count = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    pool.reserve(count);
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

} // namespace ifsdim
