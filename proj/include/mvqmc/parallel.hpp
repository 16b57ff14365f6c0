#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace mvqmc {

inline unsigned default_thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1u : n;
}

/// Runs fn(begin, end, block_index) over fixed-size blocks of [0, n).
/// The block decomposition depends only on n and block_size, never on the
/// thread count, so per-block results reduced in block order are identical
/// for any number of workers.
inline void for_each_block(std::size_t n, std::size_t block_size, unsigned threads,
                           const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (block_size == 0) block_size = 1;
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  auto run_block = [&](std::size_t b) {
    const std::size_t begin = b * block_size;
    const std::size_t end = begin + block_size < n ? begin + block_size : n;
    fn(begin, end, b);
  };
  if (threads <= 1 || n_blocks == 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    return;
  }
  const unsigned n_workers =
      threads < n_blocks ? threads : static_cast<unsigned>(n_blocks);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        if (failed.load(std::memory_order_relaxed)) return;
        const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
        if (b >= n_blocks) return;
        try {
          run_block(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline constexpr std::size_t kDefaultBlockSize = 8192;

}  // namespace mvqmc
