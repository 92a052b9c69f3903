#ifndef KFA_PARALLEL_HPP
#define KFA_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kfa {

/// Runs fn(begin, end) over a blocked partition of [0, n). Each block writes
/// to disjoint output slots, so results are deterministic for any thread
/// count. Falls back to a single call for small n.
template <typename Fn>
void parallel_for_blocks(std::size_t n, Fn&& fn, std::size_t min_per_thread = 256) {
    if (n == 0) return;
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t nthreads = std::min(hw, std::max<std::size_t>(1, n / min_per_thread));
    if (nthreads <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(nthreads);
    std::exception_ptr err;
    std::mutex err_mutex;
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&, lo, hi]() {
            try {
                fn(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> g(err_mutex);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    if (err) std::rethrow_exception(err);
}

} // namespace kfa

#endif
