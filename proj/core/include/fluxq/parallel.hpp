#ifndef FLUXQ_PARALLEL_HPP
#define FLUXQ_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace fluxq {

/// Runs fn(i) for i in [0, n) across up to n_threads workers. Work items are
/// handed out dynamically; callers own output ordering by writing to
/// preallocated slots, so results are deterministic regardless of thread
/// count. n_threads <= 0 means hardware concurrency.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, int n_threads = 0) {
    if (n_threads <= 0) n_threads = int(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    const std::size_t workers = std::min<std::size_t>(n_threads, n);

    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace fluxq

#endif
