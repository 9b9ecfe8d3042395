#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace grnea {

/// Worker cap: min(hardware_concurrency, GRNEA_THREADS) when the environment
/// variable is set, else hardware_concurrency.
inline int max_threads() {
    static const int cached = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        if (const char* env = std::getenv("GRNEA_THREADS")) {
            int req = std::atoi(env);
            if (req >= 1) return std::min(hw, req);
        }
        return hw;
    }();
    return cached;
}

/// Run fn(i) for i in [0, count). Work items must be pure with respect to
/// shared state (disjoint writes only); the result may not depend on
/// scheduling. Reductions belong outside, in fixed index order.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const int threads = std::min<std::size_t>(max_threads(), count);
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace grnea
