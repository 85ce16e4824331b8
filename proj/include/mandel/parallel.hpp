#pragma once

#include <thread>
#include <vector>

namespace mandel {

inline int default_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

/// Splits [lo, hi) into contiguous chunks, one worker each. `body(begin, end)`
/// must not touch another chunk's output; results are deterministic because
/// chunk boundaries depend only on (lo, hi, threads).
template <typename Body>
void parallel_chunks(long lo, long hi, int threads, Body&& body) {
    const long n = hi - lo;
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        body(lo, hi);
        return;
    }
    const long nchunks = std::min<long>(threads, n);
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(nchunks));
    const long base = n / nchunks, rem = n % nchunks;
    long begin = lo;
    for (long c = 0; c < nchunks; ++c) {
        const long end = begin + base + (c < rem ? 1 : 0);
        workers.emplace_back([&body, begin, end] { body(begin, end); });
        begin = end;
    }
    for (auto& w : workers) w.join();
}

/// Chunked sum of term(k) over [lo, hi); partial sums combine in chunk order,
/// so the result is independent of thread scheduling.
template <typename T, typename Term>
T parallel_sum(long lo, long hi, int threads, Term&& term) {
    const long n = hi - lo;
    if (n <= 0) return T{};
    if (threads <= 1 || n < 2 * threads) {
        T acc{};
        for (long k = lo; k < hi; ++k) acc += term(k);
        return acc;
    }
    const long nchunks = std::min<long>(threads, n);
    std::vector<T> partial(static_cast<size_t>(nchunks));
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(nchunks));
    const long base = n / nchunks, rem = n % nchunks;
    long begin = lo;
    for (long c = 0; c < nchunks; ++c) {
        const long end = begin + base + (c < rem ? 1 : 0);
        workers.emplace_back([&term, &partial, c, begin, end] {
            T acc{};
            for (long k = begin; k < end; ++k) acc += term(k);
            partial[static_cast<size_t>(c)] = std::move(acc);
        });
        begin = end;
    }
    for (auto& w : workers) w.join();
    T acc{};
    for (auto& p : partial) acc += p;
    return acc;
}

}  // namespace mandel
