#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace attpipe {

// Parallel reductions are done over fixed-size blocks whose partial sums are
// merged in index order, so the result is identical for any thread count
// (including one). Serial callers pass use_threads = false and get the same
// bits as the threaded path.
inline constexpr std::ptrdiff_t kReductionBlock = 2048;

template <class Fn>
double blocked_sum(std::ptrdiff_t n, Fn&& term, bool use_threads = true) {
  const std::ptrdiff_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(static_cast<std::size_t>(nblocks), 0.0);
#pragma omp parallel for schedule(static) if (use_threads)
  for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
    const std::ptrdiff_t lo = b * kReductionBlock;
    const std::ptrdiff_t hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::ptrdiff_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

// K accumulators updated per element; same determinism contract as blocked_sum.
template <std::size_t K, class Fn>
std::array<double, K> blocked_sum_array(std::ptrdiff_t n, Fn&& accumulate,
                                        bool use_threads = true) {
  const std::ptrdiff_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<std::array<double, K>> partial(static_cast<std::size_t>(nblocks));
#pragma omp parallel for schedule(static) if (use_threads)
  for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
    const std::ptrdiff_t lo = b * kReductionBlock;
    const std::ptrdiff_t hi = std::min(n, lo + kReductionBlock);
    std::array<double, K> acc{};
    for (std::ptrdiff_t i = lo; i < hi; ++i) accumulate(i, acc);
    partial[static_cast<std::size_t>(b)] = acc;
  }
  std::array<double, K> total{};
  for (const auto& acc : partial)
    for (std::size_t k = 0; k < K; ++k) total[k] += acc[k];
  return total;
}

// Runtime-width variant for the regression accumulators.
template <class Fn>
std::vector<double> blocked_sum_vector(std::ptrdiff_t n, std::size_t width,
                                       Fn&& accumulate, bool use_threads = true) {
  const std::ptrdiff_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(static_cast<std::size_t>(nblocks) * width, 0.0);
#pragma omp parallel for schedule(static) if (use_threads)
  for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
    const std::ptrdiff_t lo = b * kReductionBlock;
    const std::ptrdiff_t hi = std::min(n, lo + kReductionBlock);
    std::span<double> acc(partial.data() + static_cast<std::size_t>(b) * width, width);
    for (std::ptrdiff_t i = lo; i < hi; ++i) accumulate(i, acc);
  }
  std::vector<double> total(width, 0.0);
  for (std::ptrdiff_t b = 0; b < nblocks; ++b)
    for (std::size_t k = 0; k < width; ++k)
      total[k] += partial[static_cast<std::size_t>(b) * width + k];
  return total;
}

}  // namespace attpipe
