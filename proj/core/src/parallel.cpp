#include "homog/parallel.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace homog::par {

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double dot(std::span<const double> a, std::span<const double> b) {
  constexpr std::size_t chunk = 8192;
  const std::size_t n = a.size();
  const int chunks = static_cast<int>((n + chunk - 1) / chunk);
  return sum_slabs(chunks, [&](int c) {
    const std::size_t lo = static_cast<std::size_t>(c) * chunk;
    const std::size_t hi = lo + chunk < n ? lo + chunk : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
  });
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace homog::par
