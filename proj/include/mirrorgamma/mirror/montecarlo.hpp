#pragma once

// Batched Monte Carlo with per-batch seeds, and a small deterministic parallel map.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace mirrorgamma {

/// Worker count from MIRRORGAMMA_THREADS, else the hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("MIRRORGAMMA_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count) on up to `threads` workers.  Results must be written to
/// per-index slots by the caller, so the outcome does not depend on scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned threads = 0) {
  if (threads == 0) threads = thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};

/// Estimates E[sample(rng)] from `batches` batches of `batch_size` draws.  Batch b uses an
/// mt19937_64 seeded with splitmix64(seed + b); batch sums are reduced in index order.
inline McEstimate monte_carlo(const std::function<double(std::mt19937_64&)>& sample, std::uint64_t seed,
                              std::size_t batches, std::size_t batch_size, unsigned threads = 0) {
  std::vector<double> sum(batches, 0.0), sumsq(batches, 0.0);
  parallel_for(
      batches,
      [&](std::size_t b) {
        std::mt19937_64 rng(splitmix64(seed + b));
        double s = 0.0, q = 0.0;
        for (std::size_t k = 0; k < batch_size; ++k) {
          const double v = sample(rng);
          s += v;
          q += v * v;
        }
        sum[b] = s;
        sumsq[b] = q;
      },
      threads);
  double s = 0.0, q = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    s += sum[b];
    q += sumsq[b];
  }
  McEstimate out;
  out.samples = static_cast<std::uint64_t>(batches) * batch_size;
  const double N = static_cast<double>(out.samples);
  out.mean = s / N;
  const double var = std::max(0.0, q / N - out.mean * out.mean);
  out.standard_error = std::sqrt(var / std::max(1.0, N - 1.0));
  return out;
}

}  // namespace mirrorgamma
