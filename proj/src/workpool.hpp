#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace awekit {

// Worker count: AWEKIT_WORKERS env var, else hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("AWEKIT_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Evaluates fn(i) for i in [0, n) on a pool of workers.  Results land in a
// pre-sized vector indexed by i, so the output is independent of scheduling.
template <typename T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn,
                            int workers = 0) {
  if (workers <= 0) workers = default_workers();
  std::vector<T> out(n);
  if (n == 0) return out;
  if (workers == 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  int nt = static_cast<int>(std::min<std::size_t>(workers, n));
  threads.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    threads.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        out[i] = fn(i);
      }
    });
  }
  for (auto& th : threads) th.join();
  return out;
}

}  // namespace awekit
