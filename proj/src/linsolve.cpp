#include "nsfem/linsolve.hpp"

#include <umfpack.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace nsfem {

struct DirectSolver::Impl {
  void* symbolic = nullptr;
  void* numeric = nullptr;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> values;
  std::size_t n = 0;
  double rcond = 0.0;
  std::size_t reuses = 0;
  double control[UMFPACK_CONTROL];

  Impl() {
    umfpack_di_defaults(control);
    // The saddle matrices have a symmetric pattern and a zero pressure block;
    // AMD(A+A^T) with METIS and off-diagonal pivots allowed keeps fill low.
    control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
    control[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
    control[UMFPACK_SYM_PIVOT_TOLERANCE] = 0.5;
  }

  ~Impl() {
    if (numeric) umfpack_di_free_numeric(&numeric);
    if (symbolic) umfpack_di_free_symbolic(&symbolic);
  }
};

DirectSolver::DirectSolver() : impl_(std::make_unique<Impl>()) {}
DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

void DirectSolver::factorize(const SparseMatrix& a, double pivot_tolerance) {
  if (a.rows() != a.cols()) throw std::invalid_argument("DirectSolver: matrix must be square");
  Impl& s = *impl_;
  if (s.numeric) umfpack_di_free_numeric(&s.numeric);

  const bool same = s.symbolic && s.n == a.rows() && s.row_ptr == a.row_ptr() && s.col_idx == a.col_idx();
  s.values = a.values();
  const int n = static_cast<int>(a.rows());
  double info[UMFPACK_INFO];
  // UMFPACK reads compressed columns; our CSR arrays are the CSC of A^T, so
  // A^T is factorized and solve() uses the transposed system.
  if (!same) {
    if (s.symbolic) umfpack_di_free_symbolic(&s.symbolic);
    s.row_ptr = a.row_ptr();
    s.col_idx = a.col_idx();
    s.n = a.rows();
    const int status = umfpack_di_symbolic(n, n, s.row_ptr.data(), s.col_idx.data(), s.values.data(),
                                           &s.symbolic, s.control, info);
    if (status != UMFPACK_OK) {
      s.symbolic = nullptr;
      throw SingularSystemError("umfpack symbolic analysis failed (status " + std::to_string(status) + ")");
    }
  } else {
    ++s.reuses;
  }
  const int status = umfpack_di_numeric(s.row_ptr.data(), s.col_idx.data(), s.values.data(), s.symbolic,
                                        &s.numeric, s.control, info);
  s.rcond = info[UMFPACK_RCOND];
  if (status == UMFPACK_WARNING_singular_matrix || status != UMFPACK_OK || !(s.rcond >= pivot_tolerance)) {
    std::ostringstream msg;
    msg << "singular linear system (umfpack status " << status << ", pivot ratio " << s.rcond << ")";
    if (s.numeric) umfpack_di_free_numeric(&s.numeric);
    throw SingularSystemError(msg.str());
  }
}

std::vector<double> DirectSolver::solve(std::span<const double> rhs) const {
  const Impl& s = *impl_;
  if (!s.numeric) throw std::logic_error("DirectSolver::solve called before a successful factorize");
  if (rhs.size() != s.n) throw std::invalid_argument("DirectSolver::solve: rhs size mismatch");
  std::vector<double> x(s.n);
  double info[UMFPACK_INFO];
  const int status = umfpack_di_solve(UMFPACK_At, s.row_ptr.data(), s.col_idx.data(), s.values.data(), x.data(),
                                      rhs.data(), s.numeric, s.control, info);
  if (status != UMFPACK_OK) throw SingularSystemError("umfpack solve failed (status " + std::to_string(status) + ")");
  return x;
}

double DirectSolver::pivot_ratio() const { return impl_->rcond; }
std::size_t DirectSolver::symbolic_reuses() const { return impl_->reuses; }

double SaddleSystem::multiplier() const {
  double sum_h = 0.0, sum_m = 0.0;
  for (double v : h) sum_h += v;
  for (double v : mean_weights) sum_m += v;
  return -sum_h / sum_m;
}

SparseMatrix SaddleSystem::pinned_matrix() const {
  const std::size_t nu = a.rows();
  const std::size_t np = b.rows();
  if (a.cols() != nu || b.cols() != nu || mean_weights.size() != np || np == 0) {
    throw std::invalid_argument("SaddleSystem: inconsistent block dimensions");
  }
  const std::size_t n = nu + np - 1;
  const SparseMatrix bt = b.transpose();
  std::vector<int> row_ptr(n + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  cols.reserve(a.nnz() + 2 * b.nnz());
  vals.reserve(cols.capacity());
  for (std::size_t i = 0; i < nu; ++i) {
    for (int k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      cols.push_back(a.col_idx()[k]);
      vals.push_back(a.values()[k]);
    }
    for (int k = bt.row_ptr()[i]; k < bt.row_ptr()[i + 1]; ++k) {
      if (bt.col_idx()[k] == 0) continue;
      cols.push_back(static_cast<int>(nu) + bt.col_idx()[k] - 1);
      vals.push_back(-bt.values()[k]);
    }
    row_ptr[i + 1] = static_cast<int>(cols.size());
  }
  for (std::size_t q = 1; q < np; ++q) {
    for (int k = b.row_ptr()[q]; k < b.row_ptr()[q + 1]; ++k) {
      cols.push_back(b.col_idx()[k]);
      vals.push_back(-b.values()[k]);
    }
    row_ptr[nu + q] = static_cast<int>(cols.size());
  }
  return SparseMatrix(n, n, std::move(row_ptr), std::move(cols), std::move(vals));
}

std::vector<double> SaddleSystem::pinned_rhs() const {
  const std::size_t nu = num_velocity();
  const std::size_t np = num_pressure();
  if (g.size() != nu || h.size() != np || mean_weights.size() != np) {
    throw std::invalid_argument("SaddleSystem: right-hand side size mismatch");
  }
  const double lambda = multiplier();
  std::vector<double> r(nu + np - 1);
  std::copy(g.begin(), g.end(), r.begin());
  for (std::size_t q = 1; q < np; ++q) r[nu + q - 1] = -(h[q] + mean_weights[q] * lambda);
  return r;
}

SaddleSolution solve_saddle(const SaddleSystem& system) {
  DirectSolver solver;
  return solve_saddle(system, solver);
}

SaddleSolution solve_saddle(const SaddleSystem& system, DirectSolver& solver) {
  const std::vector<double> rhs = system.pinned_rhs();
  solver.factorize(system.pinned_matrix());
  const std::vector<double> x = solver.solve(rhs);

  const std::size_t nu = system.num_velocity();
  const std::size_t np = system.num_pressure();
  SaddleSolution s;
  s.velocity.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nu));
  s.pressure.assign(np, 0.0);
  std::copy(x.begin() + static_cast<std::ptrdiff_t>(nu), x.end(), s.pressure.begin() + 1);
  double mean = 0.0, area = 0.0;
  for (std::size_t q = 0; q < np; ++q) {
    mean += system.mean_weights[q] * s.pressure[q];
    area += system.mean_weights[q];
  }
  for (double& v : s.pressure) v -= mean / area;
  s.multiplier = system.multiplier();
  return s;
}

double algebraic_residual(const SaddleSystem& system, const SaddleSolution& solution) {
  const std::size_t nu = system.num_velocity();
  const std::size_t np = system.num_pressure();
  if (solution.velocity.size() != nu || solution.pressure.size() != np) {
    throw std::invalid_argument("algebraic_residual: solution size mismatch");
  }
  std::vector<double> r1 = system.a.multiply(solution.velocity);
  const std::vector<double> btp = system.b.transpose().multiply(solution.pressure);
  for (std::size_t i = 0; i < nu; ++i) r1[i] -= btp[i] + system.g[i];
  std::vector<double> r2 = system.b.multiply(solution.velocity);
  double r3 = 0.0;
  for (std::size_t q = 0; q < np; ++q) {
    r2[q] -= system.h[q] + system.mean_weights[q] * solution.multiplier;
    r3 += system.mean_weights[q] * solution.pressure[q];
  }
  const double num = std::sqrt(dot(r1, r1) + dot(r2, r2) + r3 * r3);
  const double den = std::sqrt(dot(system.g, system.g) + dot(system.h, system.h));
  if (den == 0.0) return num;
  return num / den;
}

}  // namespace nsfem
