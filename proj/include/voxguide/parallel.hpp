#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace voxguide {

inline int& thread_count_ref() {
    static int n = [] {
        unsigned hw = std::thread::hardware_concurrency();
        return static_cast<int>(std::clamp(hw, 1u, 64u));
    }();
    return n;
}

inline int thread_count() { return thread_count_ref(); }
inline void set_thread_count(int n) { thread_count_ref() = std::max(1, n); }

/// Run fn(begin, end) over contiguous chunks of [0, n). Each chunk owns a
/// disjoint index range, so results are identical for any thread count.
template <class Fn>
void parallel_for(std::int64_t n, Fn&& fn) {
    const int threads = std::min<std::int64_t>(thread_count(), n);
    if (threads <= 1 || n < 64) {
        if (n > 0) fn(std::int64_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    const std::int64_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t b = t * chunk;
        const std::int64_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace voxguide
