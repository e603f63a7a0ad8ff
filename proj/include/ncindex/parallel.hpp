#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <omp.h>

namespace ncindex::par {

// Execution policy for the data-parallel kernels. Serial is the reference
// path kept for testing; OpenMP is the production path. Reductions are
// blocked with a fixed block size so results are bit-identical across
// policies and thread counts.
enum class Exec { Serial, OpenMP };

inline Exec& default_exec() {
  static Exec e = Exec::OpenMP;
  return e;
}

inline void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline constexpr std::size_t kReduceBlock = 1024;

template <class F>
void for_index(std::size_t n, Exec exec, F&& body) {
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    body(static_cast<std::size_t>(i));
}

// Deterministic blocked reduction: partial sums over fixed-size blocks are
// formed (possibly in parallel), then combined in block order.
template <class T, class F>
T sum_blocked(std::size_t n, Exec exec, F&& term) {
  const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<T> partial(nblocks, T{});
  auto block = [&](std::size_t b) {
    const std::size_t lo = b * kReduceBlock;
    const std::size_t hi = std::min(n, lo + kReduceBlock);
    T acc{};
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[b] = acc;
  };
  for_index(nblocks, exec, block);
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

}  // namespace ncindex::par
