#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsfem/sparse.hpp"

namespace nsfem {

/// Factorization broke down or the pivot ratio fell below the threshold.
class SingularSystemError : public std::runtime_error {
 public:
  explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

/// Sparse LU (UMFPACK) of a square matrix. The symbolic analysis is kept and
/// reused while the sparsity pattern does not change.
class DirectSolver {
 public:
  DirectSolver();
  ~DirectSolver();
  DirectSolver(const DirectSolver&) = delete;
  DirectSolver& operator=(const DirectSolver&) = delete;
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;

  /// Throws SingularSystemError when the reciprocal pivot ratio is below
  /// `pivot_tolerance`.
  void factorize(const SparseMatrix& a, double pivot_tolerance = 1e-13);
  std::vector<double> solve(std::span<const double> rhs) const;

  /// min |U_ii| / max |U_ii| of the last factorization.
  double pivot_ratio() const;
  std::size_t symbolic_reuses() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocked velocity-pressure system after Dirichlet elimination:
///
///   A u - B^T p = g
///   B u         = h
///   m^T p       = 0
///
/// B is the divergence (n_p x n_i). This is the Lagrange-multiplier form
/// [[A, -B^T, 0], [-B, 0, m], [0, m^T, 0]]; its multiplier is known in closed
/// form (lambda = -sum(h) / sum(m)) because every row sum of B over interior
/// velocity dofs vanishes. The solver therefore shifts h by m*lambda, pins
/// pressure dof 0, factorizes the square system without the dense row and
/// column, and restores the zero mean afterwards.
struct SaddleSystem {
  SparseMatrix a;
  SparseMatrix b;
  std::vector<double> g;
  std::vector<double> h;
  std::vector<double> mean_weights;

  std::size_t num_velocity() const { return a.rows(); }
  std::size_t num_pressure() const { return b.rows(); }
  double multiplier() const;
  /// [[A, -B^T], [-B, 0]] with pressure dof 0 removed (row and column).
  SparseMatrix pinned_matrix() const;
  /// (g, -(h + m lambda)) with pressure dof 0 removed.
  std::vector<double> pinned_rhs() const;
};

struct SaddleSolution {
  std::vector<double> velocity;
  std::vector<double> pressure;
  double multiplier = 0.0;
};

SaddleSolution solve_saddle(const SaddleSystem& system);
/// Same, reusing the symbolic analysis held by `solver`.
SaddleSolution solve_saddle(const SaddleSystem& system, DirectSolver& solver);

/// Relative residual of the multiplier form at (u, p, lambda).
double algebraic_residual(const SaddleSystem& system, const SaddleSolution& solution);

}  // namespace nsfem
