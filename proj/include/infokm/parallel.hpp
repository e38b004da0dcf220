#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace ikm {

/// Resolves a thread count: explicit request wins, then the INFOKM_THREADS
/// environment variable, then the hardware concurrency, clamped to [1, 64].
inline int effective_threads(int requested) {
  int t = requested;
  if (t <= 0) {
    if (const char* env = std::getenv("INFOKM_THREADS")) {
      t = std::atoi(env);
    }
  }
  if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(t, 1, 64);
}

/// Chunked parallel loop over [0, total). The body must only write to
/// per-index slots so results do not depend on the thread count.
inline void parallel_for(std::size_t total, int threads,
                         const std::function<void(std::size_t, std::size_t)>& body) {
  threads = effective_threads(threads);
  if (threads <= 1 || total < 2048) {
    body(0, total);
    return;
  }
  const std::size_t nchunks = std::min<std::size_t>(threads, total);
  const std::size_t chunk = (total + nchunks - 1) / nchunks;
  std::vector<std::thread> pool;
  pool.reserve(nchunks);
  for (std::size_t c = 0; c < nchunks; ++c) {
    const std::size_t lo = c * chunk;
    const std::size_t hi = std::min(total, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace ikm
