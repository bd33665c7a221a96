#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "nsfem/linsolve.hpp"
#include "nsfem/space.hpp"
#include "nsfem/sparse.hpp"

namespace nsfem {

// Velocity-sized operators act on the full coefficient vector (all 2N dofs,
// boundary included); Dirichlet rows are removed later by apply_dirichlet.

/// (grad phi_j, grad phi_i) on scalar P2, N x N.
SparseMatrix assemble_scalar_stiffness(const MixedSpace& space);
/// (phi_j, phi_i) on scalar P2, N x N.
SparseMatrix assemble_scalar_mass(const MixedSpace& space);
/// Block-diagonal copy of a scalar operator onto both velocity components.
SparseMatrix velocity_block_diagonal(const SparseMatrix& scalar);

/// nu (grad u, grad v).
SparseMatrix assemble_viscous(const MixedSpace& space, double nu);

/// B with B[q, v] = (div v, q), n_p x n_u.
SparseMatrix assemble_divergence(const MixedSpace& space);

/// N(a) with z^T N(a) w = b*(a, w, z), where
/// b*(v, w, z) = ((v . grad) w, z) + 1/2 ((div v) w, z).
SparseMatrix assemble_convection(const MixedSpace& space, const FEField& a);

/// R(a) with z^T R(a) w = b*(w, a, z).
SparseMatrix assemble_newton_reaction(const MixedSpace& space, const FEField& a);

/// Direct quadrature of b*(v, w, z) from point values of the three fields.
double eval_trilinear(const FEField& v, const FEField& w, const FEField& z);

/// (f, v_i) with a degree-6 rule.
std::vector<double> assemble_source(const MixedSpace& space, const VectorFunction& f);
/// (f, phi_i) for a scalar f on scalar P2 dofs, same rule.
std::vector<double> assemble_scalar_source(const MixedSpace& space, const ScalarFunction& f);

/// Integral of each pressure basis function (area/3 per dof).
std::vector<double> pressure_mean_weights(const MixedSpace& space);

/// Dirichlet data on the whole boundary.
class BCData {
 public:
  /// Zero velocity on every boundary dof.
  static BCData homogeneous(std::shared_ptr<const MixedSpace> space);
  /// One function for the whole boundary.
  static BCData from_function(std::shared_ptr<const MixedSpace> space, const VectorFunction& g);
  /// One function per tag (indexed by BoundaryTag); empty functions mean zero.
  /// Tags are applied bottom, right, left, top, so the top data wins at the
  /// two upper corners.
  static BCData from_tags(std::shared_ptr<const MixedSpace> space,
                          const std::array<VectorFunction, 4>& per_tag);

  const MixedSpace& space() const { return *space_; }
  const std::shared_ptr<const MixedSpace>& space_ptr() const { return space_; }

  /// Velocity dof indices with prescribed values, sorted.
  const std::vector<int>& constrained() const { return constrained_; }
  /// Remaining velocity dofs, sorted.
  const std::vector<int>& free() const { return free_; }
  /// Full-length vector: boundary values at constrained dofs, zero elsewhere.
  const std::vector<double>& lifting() const { return lifting_; }

  bool is_homogeneous() const;

  /// Full coefficient vector from values at the free dofs.
  std::vector<double> reconstruct(std::span<const double> free_values) const;
  /// Values at the free dofs.
  std::vector<double> restrict_free(std::span<const double> full) const;
  /// Overwrite constrained entries of `full` with the boundary data.
  void impose(std::span<double> full) const;

 private:
  explicit BCData(std::shared_ptr<const MixedSpace> space);
  void finalize(const std::vector<char>& is_constrained);

  std::shared_ptr<const MixedSpace> space_;
  std::vector<int> constrained_;
  std::vector<int> free_;
  std::vector<double> lifting_;
};

/// Restrict the full system L u - B^T p = F, B u = 0 to the free velocity dofs
/// with the boundary lifting moved to the right-hand side.
SaddleSystem apply_dirichlet(const SparseMatrix& l, const SparseMatrix& b, std::span<const double> f,
                             const BCData& bc, std::span<const double> mean_weights);

}  // namespace nsfem
