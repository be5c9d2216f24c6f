#pragma once

// Seeded random streams with a documented splitting rule, plus the optional
// thread pool used by the Monte-Carlo routines.  Results never depend on the
// number of worker threads: work is cut into a fixed number of chunks, each
// chunk gets its own derived stream, and partial results are reduced in chunk
// order.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace ranklab {

// SplitMix64 step; used only to derive seeds, never as the sampling generator.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream splitting rule: stream(seed, id) seeds a mt19937_64 with
/// splitmix64 applied twice to (seed XOR golden*id).  Distinct ids give
/// statistically independent streams for any fixed seed.
inline std::mt19937_64 stream(std::uint64_t seed, std::uint64_t id) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (id + 1));
  const std::uint64_t a = splitmix64(s);
  const std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

inline double uniform01(std::mt19937_64& g) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(g);
}
inline double gaussian(std::mt19937_64& g) {
  return std::normal_distribution<double>(0.0, 1.0)(g);
}

/// Worker-thread cap: RANKLAB_THREADS if set, else hardware concurrency.
inline unsigned thread_cap() {
  if (const char* env = std::getenv("RANKLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

/// Runs body(chunk_index) for chunk_index in [0, n_chunks) on up to
/// thread_cap() threads.  The chunk decomposition is fixed, so any
/// chunk-indexed accumulation reduced in order is thread-count invariant.
inline void parallel_chunks(int n_chunks, const std::function<void(int)>& body) {
  const unsigned workers = std::min<unsigned>(thread_cap(), static_cast<unsigned>(n_chunks));
  if (workers <= 1) {
    for (int c = 0; c < n_chunks; ++c) body(c);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<int> next{0};
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) body(c);
    });
  for (auto& th : pool) th.join();
}

}  // namespace ranklab
