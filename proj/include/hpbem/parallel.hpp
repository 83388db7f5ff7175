#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace hpbem {

inline int thread_count() {
    if (const char* env = std::getenv("HPBEM_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Static block partition of [0, n); results must be written to disjoint
/// locations so the outcome is independent of the thread count.
inline void parallel_for(long n, const std::function<void(long, long)>& run_range) {
    const int threads = thread_count();
    if (threads <= 1 || n < 4) {
        run_range(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const long chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long lo = t * chunk;
        const long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
}

} // namespace hpbem
