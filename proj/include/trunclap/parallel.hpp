#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace trunclap {

/// Worker cap for data-parallel sweeps (1 = run inline).
void set_thread_count(int n);
int thread_count();

/// Calls fn(begin, end) on contiguous chunks of [0, n).
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t t = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n / 2048 + 1);
  if (t <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + t - 1) / t;
  for (std::size_t i = 0; i < t; ++i) {
    const std::size_t b = i * chunk, e = std::min(n, b + chunk);
    if (b < e) pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace trunclap
