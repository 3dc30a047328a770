#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace gsr {

/// Static-partition parallel loop over [0, n). Work item i goes to worker
/// i % workers, so the partition (and therefore any per-item output layout)
/// does not depend on scheduling. Callers must only write disjoint state
/// per item; results are then identical for every worker count.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int w = workers;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t) {
        threads.emplace_back([t, w, n, &fn] {
            for (std::size_t i = static_cast<std::size_t>(t); i < n; i += static_cast<std::size_t>(w))
                fn(i);
        });
    }
    for (auto& th : threads) th.join();
}

}  // namespace gsr
