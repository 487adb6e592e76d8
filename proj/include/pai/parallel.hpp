#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pai {

/// Worker count after applying the explicit cap and the PAI_THREADS fallback.
/// requested == 0 means "no explicit cap".
inline unsigned effective_threads(unsigned requested = 0) {
  if (requested == 0) {
    if (const char* env = std::getenv("PAI_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v > 0) requested = static_cast<unsigned>(v);
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (requested == 0 || requested > hw) requested = hw;
  return requested;
}

/// Runs fn(begin, end, chunk_index) over [0, n) in fixed-size chunks.
/// Chunk boundaries never depend on the worker count, so any per-chunk
/// output merged in chunk order is identical for every thread setting.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t chunk_size, unsigned threads, Fn&& fn) {
  if (n == 0) return;
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t chunk_count = (n + chunk_size - 1) / chunk_size;
  threads = effective_threads(threads);
  if (threads <= 1 || chunk_count <= 1) {
    for (std::size_t c = 0; c < chunk_count; ++c)
      fn(c * chunk_size, std::min(n, (c + 1) * chunk_size), c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= chunk_count) return;
      try {
        fn(c * chunk_size, std::min(n, (c + 1) * chunk_size), c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pai
