#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsfem/assembly.hpp"
#include "nsfem/linsolve.hpp"
#include "nsfem/space.hpp"

namespace nsfem {

enum class Method { Picard, Newton, NewtonLineSearch, PicardNewton, AAPicardNewton, AAPicard };
enum class ResidualNorm { L2, H1 };
enum class Status { Converged, Failed, Blowup, SingularLinearization };

std::string to_string(Method m);
/// Short status label: Converged, F, B, Singular.
std::string to_string(Status s);
std::optional<Method> parse_method(const std::string& name);

struct InitialGuess {
  enum class Kind { Zero, Constant, Field };
  Kind kind = Kind::Zero;
  double c = 0.0;
  std::vector<double> coeffs;

  static InitialGuess zero() { return {}; }
  /// (c, 0) at interior dofs, boundary data elsewhere.
  static InitialGuess constant(double c) { return {Kind::Constant, c, {}}; }
  /// Full velocity coefficient vector; boundary entries are overwritten.
  static InitialGuess field(std::vector<double> coeffs) { return {Kind::Field, 0.0, std::move(coeffs)}; }
};

struct SolverConfig {
  Method method = Method::PicardNewton;
  double tol = 1e-8;
  ResidualNorm gate = ResidualNorm::L2;
  int max_iterations = 200;
  double blowup = 1e4;
  /// Depth and damping for AAPicard; AAPicardNewton uses depth 1 and aa_beta.
  int aa_depth = 1;
  double aa_beta = 1.0;
  InitialGuess u0;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Steady NSE on a fixed mesh: nu (grad u, grad v) + b*(u, u, v) - (p, div v) = (f, v).
/// Caches the constant operators and keeps one factorization per linearization
/// pattern so the symbolic analysis is reused across iterations. Not safe for
/// concurrent use; separate runs need separate problems.
class NseProblem {
 public:
  NseProblem(std::shared_ptr<const MixedSpace> space, double nu, const VectorFunction& f, BCData bc);
  NseProblem(std::shared_ptr<const MixedSpace> space, double nu, std::vector<double> load, BCData bc);
  ~NseProblem();
  NseProblem(const NseProblem&) = delete;
  NseProblem& operator=(const NseProblem&) = delete;

  const std::shared_ptr<const MixedSpace>& space() const { return space_; }
  double nu() const { return nu_; }
  const BCData& bc() const { return bc_; }
  const std::vector<double>& load() const { return load_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const SparseMatrix& mass() const { return mass_; }
  const SparseMatrix& divergence() const { return divergence_; }

  /// Discrete ||f||_{-1} of the load vector (computed once).
  double load_hminus1_norm() const;

  double l2_norm(std::span<const double> u) const;
  double h1_seminorm(std::span<const double> u) const;
  double h1_inner(std::span<const double> a, std::span<const double> b) const;

  FEField velocity_field(std::vector<double> coeffs) const;
  FEField pressure_field(std::vector<double> coeffs) const;

  struct LinearSolution {
    std::vector<double> velocity;  ///< full vector, boundary data included
    std::vector<double> pressure;
  };
  /// Solve (nu K + C) u - B^T p = load + extra, B u = 0 with the boundary data.
  /// `newton_pattern` selects which cached factorization is reused.
  LinearSolution solve_linearized(const SparseMatrix& c, std::span<const double> extra, bool newton_pattern) const;

  /// Euclidean norm of the nonlinear algebraic residual at (u, p): momentum
  /// rows at free dofs and all divergence rows.
  double nonlinear_residual_norm(std::span<const double> u, std::span<const double> p) const;

  /// Starting velocity for a descriptor (boundary data imposed).
  std::vector<double> initial_velocity(const InitialGuess& guess) const;

 private:
  struct Solvers;
  std::shared_ptr<const MixedSpace> space_;
  double nu_;
  std::vector<double> load_;
  BCData bc_;
  SparseMatrix stiffness_;
  SparseMatrix mass_;
  SparseMatrix viscous_;
  SparseMatrix divergence_;
  std::vector<double> mean_weights_;
  std::unique_ptr<Solvers> solvers_;
  mutable std::optional<double> load_hminus1_;
};

using LinearSolution = NseProblem::LinearSolution;

/// g_P(u): nu (grad u^, grad v) + b*(u, u^, v) = (f, v).
LinearSolution picard_step(const NseProblem& problem, std::span<const double> u);
/// g_N(u^): nu (grad u, grad v) + b*(u^, u, v) + b*(u, u^, v) = (f, v) + b*(u^, u^, v).
LinearSolution newton_step(const NseProblem& problem, std::span<const double> u_hat);

struct PicardNewtonStep {
  LinearSolution picard;
  LinearSolution newton;
};
PicardNewtonStep picard_newton_step(const NseProblem& problem, std::span<const double> u);

struct LineSearchStep {
  LinearSolution result;
  double step_size = 1.0;
  /// No trial decreased the residual; the minimum step was taken anyway.
  bool flagged = false;
  double residual_before = 0.0;
  double residual_after = 0.0;
};
inline constexpr double kMinLineSearchStep = 1.0 / 32.0;
LineSearchStep newton_line_search_step(const NseProblem& problem, std::span<const double> u,
                                       std::span<const double> p);

struct Depth1Alpha {
  double alpha = 0.0;
  bool degenerate = false;
};
/// alpha = (x2, x2 - x1) / |x2 - x1|^2 in the inner product of `gram`
/// (minimizer of |(1 - alpha) x2 + alpha x1|). Degenerate differences give 0.
Depth1Alpha aa_depth1_alpha(const SparseMatrix& gram, std::span<const double> x1, std::span<const double> x2);

struct AndersonResult {
  std::vector<double> next;
  /// Weights for the retained history, oldest first; they sum to 1.
  std::vector<double> alphas;
  double theta = 0.0;
  int depth_used = 0;
};
/// One Anderson step from iterates x_j and residuals w_{j+1} = g(x_j) - x_j
/// (oldest first, newest last). Uses the last min(m, size - 1) differences;
/// drops the oldest when the difference matrix is numerically rank deficient.
AndersonResult anderson_general(const std::vector<std::vector<double>>& x,
                                const std::vector<std::vector<double>>& w, int m, double beta,
                                const SparseMatrix& gram);

struct IterationRecord {
  int k = 0;
  double res_l2 = 0.0;
  double res_h1 = 0.0;
  std::optional<double> theta;
  std::optional<double> alpha;
  std::optional<double> step_size;
  bool step_flagged = false;
};

struct ConvergenceHistory {
  std::vector<IterationRecord> records;
  Status status = Status::Failed;
  int iterations = 0;
  /// H1 seminorm of every Picard solve output, in order.
  std::vector<double> picard_half_steps;

  std::vector<double> residuals(ResidualNorm norm) const;
};

struct AAObservation {
  int k = 0;
  std::vector<double> w_prev;
  std::vector<double> w_cur;
  double alpha = 0.0;
  double theta = 0.0;
  bool degenerate = false;
};

struct SolverHooks {
  std::function<void(const AAObservation&)> on_aa_step;
  std::function<void(std::span<const double> picard_output)> on_picard_output;
  /// Every Newton-type output; for the line search, the accepted iterate.
  std::function<void(std::span<const double> newton_output)> on_newton_output;
};

struct SolveResult {
  ConvergenceHistory history;
  std::vector<double> velocity;
  std::vector<double> pressure;
};

SolveResult run_solver(const SolverConfig& config, const NseProblem& problem, const SolverHooks& hooks = {});

class InsufficientDataError : public std::runtime_error {
 public:
  explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

/// Least-squares slope of log r_{k+1} against log r_k over the last `tail`
/// residuals above 1e-12. Needs at least 3 pairs.
double estimate_order(std::span<const double> residuals, int tail);

struct StabilityReport {
  double bound = 0.0;  ///< nu^-1 ||f||_{-1}
  double max_half_step = 0.0;
  std::size_t violations = 0;  ///< half-steps above bound * (1 + 1e-8)
  /// The bound is a theorem only for homogeneous Dirichlet data.
  bool asserted = false;
  bool ok() const { return !asserted || violations == 0; }
};
StabilityReport iterate_stability_report(const ConvergenceHistory& history, const NseProblem& problem);

}  // namespace nsfem
