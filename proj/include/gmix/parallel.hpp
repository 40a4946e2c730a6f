#ifndef GMIX_PARALLEL_HPP_
#define GMIX_PARALLEL_HPP_

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gmix {

/// Worker count: GMIX_THREADS if set, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("GMIX_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Runs fn(begin, end) over disjoint index ranges. Results must be written to
/// per-index (or per-range) slots so the outcome is independent of the number
/// of workers.
template <typename Fn>
void parallel_ranges(std::uint64_t n, Fn&& fn) {
  unsigned workers = worker_count();
  if (workers <= 1 || n < 2) {
    fn(std::uint64_t{0}, n);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::uint64_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::uint64_t lo = w * chunk;
    std::uint64_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace gmix

#endif  // GMIX_PARALLEL_HPP_
