#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace pano {

// Process-wide worker cap, set once by the CLI (--threads). 0 means
// "use hardware concurrency". Results never depend on the thread count:
// every parallel_for call partitions the index range statically and each
// chunk writes only its own slots.
inline std::atomic<int>& max_threads_slot() {
    static std::atomic<int> n{0};
    return n;
}

inline void set_max_threads(int n) { max_threads_slot().store(n < 0 ? 0 : n); }

inline int effective_threads(int64_t work_items) {
    int n = max_threads_slot().load();
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    return static_cast<int>(std::min<int64_t>(n, std::max<int64_t>(work_items, 1)));
}

// Runs fn(begin, end) over disjoint chunks of [begin, end).
template <typename Fn>
void parallel_for(int64_t begin, int64_t end, Fn&& fn) {
    const int64_t count = end - begin;
    if (count <= 0) return;
    const int threads = effective_threads(count);
    if (threads == 1) {
        fn(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    const int64_t chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int64_t lo = begin + t * chunk;
        const int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace pano
