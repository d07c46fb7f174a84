#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sigmak {

/// Worker count for internally parallel operations. 0 means "use the
/// machine's hardware concurrency".
struct Threads {
    unsigned requested = 1;

    static Threads automatic() { return Threads{0}; }
    static Threads serial() { return Threads{1}; }

    unsigned count() const {
        if (requested != 0) return requested;
        const unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1 : hc;
    }
};

/// Runs body(i) for every block index in [0, blocks) on a pool of workers.
/// Blocks are claimed dynamically; callers write results into per-block
/// slots so the combined output does not depend on scheduling.
template <typename Body>
void parallel_blocks(std::size_t blocks, Threads threads, Body&& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads.count(), blocks));
    if (workers <= 1) {
        for (std::size_t i = 0; i < blocks; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= blocks) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = blocks;
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace sigmak
