#ifndef MFVI_PARALLEL_HPP
#define MFVI_PARALLEL_HPP

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace mfvi {

// Runs fn(task) for task = 0..count-1 across at most `threads` workers.
// Tasks are dealt in fixed strides, so any result written into a
// task-indexed slot is independent of the worker count.
inline void parallel_tasks(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int t = 0; t < count; ++t) {
            fn(t);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([=, &fn] {
            for (int t = w; t < count; t += threads) {
                fn(t);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
}

}  // namespace mfvi

#endif
