#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace kansa {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(begin, end) over fixed-size chunks of [0, n). Chunk boundaries
/// do not depend on the thread count, so any per-chunk output is identical
/// across thread counts.
inline void parallel_for_chunks(long n, long chunk_size,
                                const std::function<void(long, long)>& body, int threads) {
  if (n <= 0) return;
  const long chunks = (n + chunk_size - 1) / chunk_size;
  threads = resolve_threads(threads);
  if (threads <= 1 || chunks <= 1) {
    for (long c = 0; c < chunks; ++c)
      body(c * chunk_size, std::min(n, (c + 1) * chunk_size));
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&] {
    for (;;) {
      const long c = next.fetch_add(1);
      if (c >= chunks) return;
      body(c * chunk_size, std::min(n, (c + 1) * chunk_size));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

/// Chunked reduction with a deterministic combine order: per-chunk partials
/// are computed (possibly in parallel) and folded in chunk order.
template <typename T, typename ChunkFn, typename CombineFn>
T chunked_reduce(long n, long chunk_size, T init, ChunkFn per_chunk, CombineFn combine,
                 int threads) {
  if (n <= 0) return init;
  const long chunks = (n + chunk_size - 1) / chunk_size;
  std::vector<T> partials(static_cast<std::size_t>(chunks), init);
  parallel_for_chunks(
      n, chunk_size,
      [&](long begin, long end) {
        partials[static_cast<std::size_t>(begin / chunk_size)] = per_chunk(begin, end);
      },
      threads);
  T acc = init;
  for (const T& p : partials) acc = combine(acc, p);
  return acc;
}

}  // namespace kansa
