#pragma once

#include "tvglasso/types.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tvglasso {

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Tasks must be
// independent; the first exception is rethrown on the calling thread.
template <typename Fn>
void parallel_for(Index count, Index jobs, Fn&& fn) {
    jobs = std::max<Index>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (Index i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<Index> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const Index i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(jobs));
    for (Index j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace tvglasso
