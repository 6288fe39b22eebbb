#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace qflo {

/// Worker cap: QFLO_THREADS when set to a positive integer, else the hardware
/// concurrency.
unsigned thread_count();

/// Fixed-shape pairwise summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> xs);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Items are claimed
/// dynamically, so body must write only to slot i of any shared output.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body &&body)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(n, 1u << 16))));
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        try {
            for (std::size_t i = next++; i < n; i = next++) {
                body(i);
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) {
                error = std::current_exception();
            }
            next = n;
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (unsigned t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace qflo
