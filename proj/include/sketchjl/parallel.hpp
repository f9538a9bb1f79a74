#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace sketchjl {

// Runs fn(i) for i in [0, n) across worker threads.  Trials derive all their
// randomness from i, so results are identical for any thread count.
inline void parallel_trials(std::uint64_t n, const std::function<void(std::uint64_t)>& fn,
                            unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads == 1 || n < 2) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    constexpr std::uint64_t kChunk = 16;
    auto worker = [&] {
        for (;;) {
            const std::uint64_t begin = next.fetch_add(kChunk);
            if (begin >= n) return;
            const std::uint64_t end = std::min(begin + kChunk, n);
            for (std::uint64_t i = begin; i < end; ++i) fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace sketchjl
