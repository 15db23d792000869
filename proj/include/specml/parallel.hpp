#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace specml {

/// Worker count for sample-parallel loops: SPECML_WORKERS, default 1.
inline int worker_count() {
    const char* env = std::getenv("SPECML_WORKERS");
    if (!env) return 1;
    int n = std::atoi(env);
    return n < 1 ? 1 : n;
}

/// Runs body(i) for i in [0, n). Results must be written to preallocated
/// per-index slots so the outcome is identical for any worker count.
inline void parallel_for(int n, const std::function<void(int)>& body) {
    int workers = std::min(worker_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w]() {
            for (int i = w; i < n; i += workers) body(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace specml
