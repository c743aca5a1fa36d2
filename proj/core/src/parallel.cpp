#include "recon/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace recon {

namespace {

std::atomic<int> g_threads{0};

int hardware_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace

void set_thread_count(int n) { g_threads.store(n < 0 ? 0 : n); }

int thread_count() {
    const int n = g_threads.load();
    return n == 0 ? hardware_threads() : n;
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    if (begin >= end) return;
    const std::size_t total = end - begin;
    const int workers = std::min<std::size_t>(thread_count(), total);
    if (workers <= 1 || total < 4096) {
        fn(begin, end);
        return;
    }

    // Fixed contiguous partition: range boundaries depend only on the inputs.
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    const std::size_t chunk = (total + workers - 1) / workers;
    for (int w = 1; w < workers; ++w) {
        const std::size_t lo = begin + chunk * w;
        if (lo >= end) break;
        const std::size_t hi = std::min(end, lo + chunk);
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    fn(begin, std::min(end, begin + chunk));
    for (auto& t : pool) t.join();
}

}  // namespace recon
