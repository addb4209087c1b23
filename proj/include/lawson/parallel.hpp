#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace lawson {

/// Worker count taken from LAWSON_THREADS (default 1).
inline int thread_count() {
    const char* env = std::getenv("LAWSON_THREADS");
    if (env == nullptr) {
        return 1;
    }
    const int n = std::atoi(env);
    return std::clamp(n, 1, 256);
}

/// Runs body(i) for i in [0, n) over contiguous chunks. Bodies must write to
/// disjoint slots; reductions are left to the caller so their order is fixed.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    if (workers <= 1 || n < 2048) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) {
                body(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace lawson
