#pragma once

// Seeding scheme: every parallel unit of work (trial, grid point) draws its
// own mt19937_64 seeded with splitmix64(master_seed + golden * index). The
// mapping master seed -> per-unit stream is fixed and documented in the
// README; results are independent of scheduling.

#include <cstdint>
#include <random>

#include "minmax/spectral.hpp"

namespace minmax {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(0x9e3779b97f4a7c15ULL * (index + 1)));
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed(master, index));
}

inline Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) G(i, j) = normal(rng);
  return G;
}

inline Vector gaussian_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

}  // namespace minmax
