#pragma once

#include <span>
#include <vector>

namespace homog::par {

void set_threads(int threads);
int threads();

/// Sums in a fixed pairwise order; the result does not depend on how the
/// partial values were produced.
double pairwise_sum(std::span<const double> values);

/// Runs body(slab) for slab in [0, count), possibly concurrently.
template <class Body>
void for_slabs(int count, Body&& body) {
#pragma omp parallel for schedule(static)
  for (int s = 0; s < count; ++s) body(s);
}

/// Deterministic reduction: one partial per slab, combined pairwise. The
/// result is bitwise reproducible for any thread count.
template <class Body>
double sum_slabs(int count, Body&& body) {
  std::vector<double> partial(static_cast<std::size_t>(count), 0.0);
  for_slabs(count, [&](int s) { partial[static_cast<std::size_t>(s)] = body(s); });
  return pairwise_sum(partial);
}

/// Deterministic dot product over fixed-size chunks.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

template <class Body>
double max_slabs(int count, Body&& body) {
  std::vector<double> partial(static_cast<std::size_t>(count), 0.0);
  for_slabs(count, [&](int s) { partial[static_cast<std::size_t>(s)] = body(s); });
  double m = 0.0;
  for (double v : partial) m = v > m ? v : m;
  return m;
}

}  // namespace homog::par
