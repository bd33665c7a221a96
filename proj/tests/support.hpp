#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "nsfem/space.hpp"

namespace testing {

// Seeded so failures reproduce.
inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline std::vector<double> random_vector(std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform(-scale, scale);
  return v;
}

inline std::shared_ptr<const nsfem::MixedSpace> space(int n, bool refine = true) {
  nsfem::Mesh base = nsfem::uniform_square_mesh(n);
  auto mesh = std::make_shared<const nsfem::Mesh>(refine ? nsfem::barycenter_refine(base) : base);
  return std::make_shared<const nsfem::MixedSpace>(mesh);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace testing
