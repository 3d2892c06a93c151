#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace spmc::harness {

/// Trials are processed in fixed-size chunks so that results are
/// byte-identical for any thread count: chunk boundaries and per-chunk random
/// substreams depend only on the chunk index, and partial results are merged
/// in chunk order by the caller.
inline constexpr std::int64_t chunk_trials = 4096;

/// Number of chunks per adaptive-stopping round. A round always completes in
/// full before the stop condition is evaluated, which keeps early stopping
/// independent of scheduling.
inline constexpr int chunks_per_round = 16;

/// Evaluates fn(chunk_index) for chunk_index in [first, last) across the
/// requested number of threads and returns the results indexed by chunk.
template <typename T, typename Fn>
std::vector<T> run_chunks(std::int64_t first, std::int64_t last, int threads, Fn&& fn) {
    const std::int64_t n = last - first;
    std::vector<T> results(static_cast<std::size_t>(n));
    if (n <= 0) return results;
    if (threads <= 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) {
            results[static_cast<std::size_t>(i)] = fn(first + i);
        }
        return results;
    }
    std::atomic<std::int64_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::int64_t i = next.fetch_add(1);
            if (i >= n) break;
            results[static_cast<std::size_t>(i)] = fn(first + i);
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = static_cast<int>(std::min<std::int64_t>(threads, n));
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

} // namespace spmc::harness
