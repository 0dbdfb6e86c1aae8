// parallel.hpp — thread-fanout helper. MLRCPF_THREADS caps the worker count.

#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace mlrcpf {

inline int thread_cap() {
    if (const char* env = std::getenv("MLRCPF_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, count). Results must be written to per-index slots;
// the reduction order afterwards is then deterministic regardless of timing.
inline void parallel_for_index(int count, const std::function<void(int)>& fn) {
    const int workers = std::min(count, thread_cap());
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace mlrcpf
