#pragma once

#include "homog/fields.hpp"
#include "homog/geometry.hpp"

#include <cstdint>
#include <random>

namespace homog::test {

/// Every generated case derives from this seed; override with HOMOG_TEST_SEED.
std::uint64_t base_seed();

inline std::mt19937_64 rng(std::uint64_t stream) { return std::mt19937_64(base_seed() + 0x9e3779b97f4a7c15ULL * stream); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline ScalarField random_scalar(const StaggeredGrid& grid, std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
  ScalarField f(grid);
  for (auto& v : f.values) v = uniform(g, lo, hi);
  return f;
}

/// Random face values, zero on solid faces when masks are given.
inline VectorField random_vector(const StaggeredGrid& grid, std::mt19937_64& g, const Masks* masks = nullptr) {
  VectorField u(grid);
  for (int d = 0; d < 3; ++d)
    for (std::size_t f = 0; f < u[d].size(); ++f)
      u[d][f] = masks && !masks->face[static_cast<std::size_t>(d)][f] ? 0.0 : uniform(g, -1.0, 1.0);
  return u;
}

/// Random sample from a small set of valid torus configurations.
inline PerforationConfig random_config(std::mt19937_64& g) {
  static const double eps[] = {0.5, 0.25, 0.125, 1.0 / 6.0, 0.1};
  PerforationConfig c;
  c.epsilon = eps[std::uniform_int_distribution<int>(0, 4)(g)];
  c.alpha = uniform(g, 1.05, 2.95);
  c.mu = uniform(g, 0.1, 10.0);
  if (std::uniform_int_distribution<int>(0, 1)(g))
    c.obstacle = Obstacle::ball(uniform(g, 0.01, 0.125));
  else
    c.obstacle = Obstacle::cube(uniform(g, 0.01, 0.125 / std::sqrt(3.0)));
  return c;
}

}  // namespace homog::test
