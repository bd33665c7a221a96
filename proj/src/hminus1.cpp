#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nsfem/assembly.hpp"
#include "nsfem/linsolve.hpp"
#include "nsfem/space.hpp"

namespace nsfem {

namespace {

// Sum over components of load_c^T K_00^{-1} load_c, with K_00 the scalar
// stiffness on interior dofs.
double dual_norm_squared(const MixedSpace& space, std::span<const double> load, int components) {
  const std::size_t n = space.num_scalar_dofs();
  if (load.size() != n * static_cast<std::size_t>(components)) {
    throw std::invalid_argument("discrete_hminus1_norm: load size mismatch");
  }
  const std::vector<int> interior = space.interior_scalar_dofs();
  DirectSolver solver;
  solver.factorize(assemble_scalar_stiffness(space).submatrix(interior, interior));
  double total = 0.0;
  for (int c = 0; c < components; ++c) {
    std::vector<double> r(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i) r[i] = load[c * n + interior[i]];
    const std::vector<double> phi = solver.solve(r);
    total += dot(r, phi);
  }
  return total;
}

}  // namespace

double discrete_hminus1_norm(const std::shared_ptr<const MixedSpace>& space, const VectorFunction& f) {
  return discrete_hminus1_norm_of_load(*space, assemble_source(*space, f));
}

double discrete_hminus1_norm(const std::shared_ptr<const MixedSpace>& space, const ScalarFunction& f) {
  return std::sqrt(std::max(0.0, dual_norm_squared(*space, assemble_scalar_source(*space, f), 1)));
}

double discrete_hminus1_norm_of_load(const MixedSpace& space, std::span<const double> load) {
  return std::sqrt(std::max(0.0, dual_norm_squared(space, load, 2)));
}

}  // namespace nsfem
