#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace fpflux::detail {

// Static block partition of [0, n) over `threads` workers. The first exception raised by any
// worker is rethrown after all workers have joined.
template <class F>
void parallel_for(long n, int threads, F &&body) {
    threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max(1L, n))));
    if (threads == 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const long chunk = (n + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                const long lo = w * chunk, hi = std::min(n, lo + chunk);
                for (long i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &t : pool) t.join();
    for (auto &e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace fpflux::detail
