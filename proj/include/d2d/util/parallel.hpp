#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace d2d {

// Static chunking over [0, n). Results must be written to preallocated
// per-index slots so the output is identical for any thread count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace d2d
