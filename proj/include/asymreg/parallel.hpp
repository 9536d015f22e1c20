#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace asymreg {

/// Runs fn(worker, i) for i in [0, n) on up to `workers` threads, each pulling
/// the next index from a shared counter. `worker` is the thread's slot in
/// [0, workers), so per-worker state can be indexed by it. The first exception
/// is rethrown after all workers stop.
template <class Fn>
void parallel_for_workers(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(std::size_t{0}, i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(w, i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

/// parallel_for_workers without the worker slot. Results must be written to
/// per-index slots by fn.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  parallel_for_workers(n, workers, [&](std::size_t, std::size_t i) { fn(i); });
}

/// splitmix64 finalizer; derives independent per-task seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace asymreg
