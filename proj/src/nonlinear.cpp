#include "nsfem/nonlinear.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <limits>

namespace nsfem {

namespace {

std::vector<double> subtract(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

std::string lower(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Picard: return "Picard";
    case Method::Newton: return "Newton";
    case Method::NewtonLineSearch: return "NewtonLineSearch";
    case Method::PicardNewton: return "PicardNewton";
    case Method::AAPicardNewton: return "AAPicardNewton";
    case Method::AAPicard: return "AAPicard";
  }
  return "?";
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Converged: return "Converged";
    case Status::Failed: return "F";
    case Status::Blowup: return "B";
    case Status::SingularLinearization: return "Singular";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  const std::string key = lower(name);
  for (Method m : {Method::Picard, Method::Newton, Method::NewtonLineSearch, Method::PicardNewton,
                   Method::AAPicardNewton, Method::AAPicard}) {
    if (lower(to_string(m)) == key) return m;
  }
  return std::nullopt;
}

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(blowup > 0.0)) throw std::invalid_argument("blowup threshold must be positive");
  if (aa_depth < 0) throw std::invalid_argument("aa_depth must be nonnegative");
  if (!(aa_beta > 0.0 && aa_beta <= 1.0)) throw std::invalid_argument("aa_beta must lie in (0, 1]");
}

// ---------------------------------------------------------------------------

struct NseProblem::Solvers {
  DirectSolver picard;
  DirectSolver newton;
};

NseProblem::NseProblem(std::shared_ptr<const MixedSpace> space, double nu, const VectorFunction& f, BCData bc)
    : NseProblem(space, nu, assemble_source(*space, f), std::move(bc)) {}

NseProblem::NseProblem(std::shared_ptr<const MixedSpace> space, double nu, std::vector<double> load, BCData bc)
    : space_(std::move(space)), nu_(nu), load_(std::move(load)), bc_(std::move(bc)) {
  if (!(nu_ > 0.0)) throw std::invalid_argument("NseProblem: nu must be positive");
  if (bc_.space_ptr() != space_) throw std::invalid_argument("NseProblem: boundary data built on another space");
  if (load_.size() != space_->num_velocity_dofs()) throw std::invalid_argument("NseProblem: load size mismatch");
  stiffness_ = velocity_block_diagonal(assemble_scalar_stiffness(*space_));
  mass_ = velocity_block_diagonal(assemble_scalar_mass(*space_));
  viscous_ = stiffness_.scaled(nu_);
  divergence_ = assemble_divergence(*space_);
  mean_weights_ = pressure_mean_weights(*space_);
  solvers_ = std::make_unique<Solvers>();
}

NseProblem::~NseProblem() = default;

double NseProblem::load_hminus1_norm() const {
  if (!load_hminus1_) load_hminus1_ = discrete_hminus1_norm_of_load(*space_, load_);
  return *load_hminus1_;
}

double NseProblem::l2_norm(std::span<const double> u) const { return std::sqrt(std::max(0.0, mass_.bilinear(u, u))); }

double NseProblem::h1_seminorm(std::span<const double> u) const {
  return std::sqrt(std::max(0.0, stiffness_.bilinear(u, u)));
}

double NseProblem::h1_inner(std::span<const double> a, std::span<const double> b) const {
  return stiffness_.bilinear(a, b);
}

FEField NseProblem::velocity_field(std::vector<double> coeffs) const {
  return FEField(space_, FieldKind::Velocity, std::move(coeffs));
}

FEField NseProblem::pressure_field(std::vector<double> coeffs) const {
  return FEField(space_, FieldKind::Pressure, std::move(coeffs));
}

NseProblem::LinearSolution NseProblem::solve_linearized(const SparseMatrix& c, std::span<const double> extra,
                                                        bool newton_pattern) const {
  std::vector<double> rhs = load_;
  if (!extra.empty()) {
    if (extra.size() != rhs.size()) throw std::invalid_argument("solve_linearized: rhs size mismatch");
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += extra[i];
  }
  const SaddleSystem sys = apply_dirichlet(add(viscous_, c), divergence_, rhs, bc_, mean_weights_);
  DirectSolver& solver = newton_pattern ? solvers_->newton : solvers_->picard;
  SaddleSolution sol = solve_saddle(sys, solver);
  return {bc_.reconstruct(sol.velocity), std::move(sol.pressure)};
}

double NseProblem::nonlinear_residual_norm(std::span<const double> u, std::span<const double> p) const {
  const SparseMatrix n = assemble_convection(*space_, velocity_field({u.begin(), u.end()}));
  std::vector<double> r = viscous_.multiply(u);
  n.multiply_add(1.0, u, r);
  const std::vector<double> btp = divergence_.transpose().multiply(p);
  double sum = 0.0;
  for (int i : bc_.free()) {
    const double v = r[i] - btp[i] - load_[i];
    sum += v * v;
  }
  const std::vector<double> div = divergence_.multiply(u);
  sum += dot(div, div);
  return std::sqrt(sum);
}

std::vector<double> NseProblem::initial_velocity(const InitialGuess& guess) const {
  std::vector<double> u(space_->num_velocity_dofs(), 0.0);
  switch (guess.kind) {
    case InitialGuess::Kind::Zero:
      break;
    case InitialGuess::Kind::Constant:
      std::fill(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(space_->num_scalar_dofs()), guess.c);
      break;
    case InitialGuess::Kind::Field:
      if (guess.coeffs.size() != u.size()) throw std::invalid_argument("initial guess has the wrong length");
      u = guess.coeffs;
      break;
  }
  bc_.impose(u);
  return u;
}

// ---------------------------------------------------------------------------

LinearSolution picard_step(const NseProblem& problem, std::span<const double> u) {
  const SparseMatrix n = assemble_convection(*problem.space(), problem.velocity_field({u.begin(), u.end()}));
  return problem.solve_linearized(n, {}, false);
}

LinearSolution newton_step(const NseProblem& problem, std::span<const double> u_hat) {
  const FEField a = problem.velocity_field({u_hat.begin(), u_hat.end()});
  const SparseMatrix n = assemble_convection(*problem.space(), a);
  const SparseMatrix r = assemble_newton_reaction(*problem.space(), a);
  const std::vector<double> extra = n.multiply(u_hat);
  return problem.solve_linearized(add(n, r), extra, true);
}

PicardNewtonStep picard_newton_step(const NseProblem& problem, std::span<const double> u) {
  PicardNewtonStep step;
  step.picard = picard_step(problem, u);
  step.newton = newton_step(problem, step.picard.velocity);
  return step;
}

LineSearchStep newton_line_search_step(const NseProblem& problem, std::span<const double> u,
                                       std::span<const double> p) {
  const std::size_t np = problem.space()->num_pressure_dofs();
  std::vector<double> p0(np, 0.0);
  if (p.size() == np) p0.assign(p.begin(), p.end());

  LineSearchStep out;
  out.residual_before = problem.nonlinear_residual_norm(u, p0);
  const LinearSolution full = newton_step(problem, u);
  const std::vector<double> du = subtract(full.velocity, u);
  const std::vector<double> dp = subtract(full.pressure, p0);

  for (double s = 1.0; s >= kMinLineSearchStep; s *= 0.5) {
    LinearSolution trial;
    trial.velocity.resize(u.size());
    trial.pressure.resize(np);
    for (std::size_t i = 0; i < u.size(); ++i) trial.velocity[i] = u[i] + s * du[i];
    for (std::size_t i = 0; i < np; ++i) trial.pressure[i] = p0[i] + s * dp[i];
    const double r = problem.nonlinear_residual_norm(trial.velocity, trial.pressure);
    out.result = std::move(trial);
    out.step_size = s;
    out.residual_after = r;
    if (r < out.residual_before) return out;
  }
  out.flagged = true;
  return out;
}

// ---------------------------------------------------------------------------

Depth1Alpha aa_depth1_alpha(const SparseMatrix& gram, std::span<const double> x1, std::span<const double> x2) {
  const std::vector<double> d = subtract(x2, x1);
  const double dd = gram.bilinear(d, d);
  const double scale = std::sqrt(std::max({0.0, gram.bilinear(x1, x1), gram.bilinear(x2, x2)}));
  if (!(std::sqrt(std::max(0.0, dd)) > 1e-14 * scale)) return {0.0, true};
  return {gram.bilinear(x2, d) / dd, false};
}

AndersonResult anderson_general(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& w,
                                int m, double beta, const SparseMatrix& gram) {
  if (x.empty() || x.size() != w.size()) throw std::invalid_argument("anderson_general: history size mismatch");
  if (m < 0 || !(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("anderson_general: bad depth or damping");
  const std::size_t n = w.size() - 1;  // newest entry
  const std::size_t dim = w[n].size();
  const double wn_norm = std::sqrt(std::max(0.0, gram.bilinear(w[n], w[n])));

  // Columns d_j = w_n - w_j, newest history entry first so truncation drops
  // the oldest.
  int depth = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(m), n));
  std::vector<double> gamma;
  while (depth > 0) {
    std::vector<std::vector<double>> q;
    std::vector<std::vector<double>> r(depth, std::vector<double>(depth, 0.0));
    bool deficient = false;
    for (int c = 0; c < depth && !deficient; ++c) {
      const std::size_t j = n - 1 - c;
      std::vector<double> v = subtract(w[n], w[j]);
      const double v_norm = std::sqrt(std::max(0.0, gram.bilinear(v, v)));
      const double wj_norm = std::sqrt(std::max(0.0, gram.bilinear(w[j], w[j])));
      if (!(v_norm > 1e-14 * std::max(wn_norm, wj_norm))) {
        deficient = true;
        break;
      }
      for (int i = 0; i < c; ++i) {
        const double rij = gram.bilinear(q[i], v);
        r[i][c] = rij;
        for (std::size_t t = 0; t < dim; ++t) v[t] -= rij * q[i][t];
      }
      const double rcc = std::sqrt(std::max(0.0, gram.bilinear(v, v)));
      if (!(rcc > 1e-10 * v_norm)) {
        deficient = true;
        break;
      }
      r[c][c] = rcc;
      for (double& e : v) e /= rcc;
      q.push_back(std::move(v));
    }
    if (deficient) {
      --depth;
      continue;
    }
    std::vector<double> rhs(depth);
    for (int i = 0; i < depth; ++i) rhs[i] = gram.bilinear(q[i], w[n]);
    gamma.assign(depth, 0.0);
    for (int i = depth - 1; i >= 0; --i) {
      double s = rhs[i];
      for (int k = i + 1; k < depth; ++k) s -= r[i][k] * gamma[k];
      gamma[i] = s / r[i][i];
    }
    break;
  }

  AndersonResult out;
  out.depth_used = depth;
  std::vector<double> xbar = x[n];
  std::vector<double> wbar = w[n];
  double newest = 1.0;
  for (int c = 0; c < depth; ++c) {
    const std::size_t j = n - 1 - c;
    for (std::size_t t = 0; t < dim; ++t) {
      xbar[t] -= gamma[c] * (x[n][t] - x[j][t]);
      wbar[t] -= gamma[c] * (w[n][t] - w[j][t]);
    }
    newest -= gamma[c];
  }
  out.alphas.resize(depth + 1);
  for (int c = 0; c < depth; ++c) out.alphas[depth - 1 - c] = gamma[c];
  out.alphas[depth] = newest;

  out.next.resize(dim);
  for (std::size_t t = 0; t < dim; ++t) out.next[t] = xbar[t] + beta * wbar[t];
  const double wbar_norm = std::sqrt(std::max(0.0, gram.bilinear(wbar, wbar)));
  out.theta = wn_norm > 0.0 ? wbar_norm / wn_norm : 0.0;
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> ConvergenceHistory::residuals(ResidualNorm norm) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(norm == ResidualNorm::L2 ? r.res_l2 : r.res_h1);
  return out;
}

namespace {

struct StepOutput {
  LinearSolution next;
  IterationRecord record;
};

class Runner {
 public:
  Runner(const SolverConfig& config, const NseProblem& problem, const SolverHooks& hooks)
      : config_(config), problem_(problem), hooks_(hooks) {}

  SolveResult run() {
    SolveResult result;
    ConvergenceHistory& h = result.history;
    std::vector<double> u = problem_.initial_velocity(config_.u0);
    std::vector<double> p(problem_.space()->num_pressure_dofs(), 0.0);
    bool done = false;
    for (int k = 1; k <= config_.max_iterations && !done; ++k) {
      StepOutput step;
      try {
        step = advance(k, u, p, h);
      } catch (const SingularSystemError&) {
        h.status = Status::SingularLinearization;
        done = true;
        break;
      }
      const std::vector<double> diff = subtract(step.next.velocity, u);
      step.record.k = k;
      step.record.res_l2 = problem_.l2_norm(diff);
      step.record.res_h1 = problem_.h1_seminorm(diff);
      h.records.push_back(step.record);
      u = std::move(step.next.velocity);
      p = std::move(step.next.pressure);

      const double gate = config_.gate == ResidualNorm::L2 ? step.record.res_l2 : step.record.res_h1;
      if (!std::isfinite(gate) || gate > config_.blowup) {
        h.status = Status::Blowup;
        done = true;
      } else if (gate <= config_.tol) {
        h.status = Status::Converged;
        done = true;
      }
    }
    if (!done) h.status = Status::Failed;
    h.iterations = static_cast<int>(h.records.size());
    result.velocity = std::move(u);
    result.pressure = std::move(p);
    return result;
  }

 private:
  LinearSolution picard(std::span<const double> u, ConvergenceHistory& h) {
    LinearSolution s = picard_step(problem_, u);
    h.picard_half_steps.push_back(problem_.h1_seminorm(s.velocity));
    if (hooks_.on_picard_output) hooks_.on_picard_output(s.velocity);
    return s;
  }

  LinearSolution newton(std::span<const double> u_hat) {
    LinearSolution s = newton_step(problem_, u_hat);
    if (hooks_.on_newton_output) hooks_.on_newton_output(s.velocity);
    return s;
  }

  StepOutput advance(int k, const std::vector<double>& u, const std::vector<double>& p, ConvergenceHistory& h) {
    StepOutput out;
    switch (config_.method) {
      case Method::Picard:
        out.next = picard(u, h);
        break;
      case Method::Newton:
        out.next = newton(u);
        break;
      case Method::NewtonLineSearch: {
        LineSearchStep ls = newton_line_search_step(problem_, u, p);
        out.next = std::move(ls.result);
        if (hooks_.on_newton_output) hooks_.on_newton_output(out.next.velocity);
        out.record.step_size = ls.step_size;
        out.record.step_flagged = ls.flagged;
        break;
      }
      case Method::PicardNewton: {
        const LinearSolution hat = picard(u, h);
        out.next = newton(hat.velocity);
        break;
      }
      case Method::AAPicardNewton:
        out = aa_picard_newton(k, u, h);
        break;
      case Method::AAPicard:
        out = aa_picard(u, h);
        break;
    }
    return out;
  }

  // Two Picard solves, a depth-1 Anderson combination of their residuals,
  // then one Newton solve. The AA history restarts every outer step.
  StepOutput aa_picard_newton(int k, const std::vector<double>& u, ConvergenceHistory& h) {
    const LinearSolution u1 = picard(u, h);
    const LinearSolution u2 = picard(u1.velocity, h);
    const std::vector<double> w1 = subtract(u1.velocity, u);
    const std::vector<double> w2 = subtract(u2.velocity, u1.velocity);
    const Depth1Alpha a = aa_depth1_alpha(problem_.stiffness(), w1, w2);
    const double beta = config_.aa_beta;

    std::vector<double> hat(u.size()), wbar(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      wbar[i] = (1.0 - a.alpha) * w2[i] + a.alpha * w1[i];
      hat[i] = (1.0 - a.alpha) * (u1.velocity[i] + beta * w2[i]) + a.alpha * (u[i] + beta * w1[i]);
    }
    const double w2_norm = problem_.h1_seminorm(w2);
    const double theta = w2_norm > 0.0 ? problem_.h1_seminorm(wbar) / w2_norm : 0.0;
    if (hooks_.on_aa_step) hooks_.on_aa_step({k, w1, w2, a.alpha, theta, a.degenerate});

    StepOutput out;
    out.next = newton(hat);
    out.record.alpha = a.alpha;
    out.record.theta = theta;
    return out;
  }

  StepOutput aa_picard(const std::vector<double>& u, ConvergenceHistory& h) {
    LinearSolution gx = picard(u, h);
    xs_.push_back(u);
    ws_.push_back(subtract(gx.velocity, u));
    while (xs_.size() > static_cast<std::size_t>(config_.aa_depth) + 1) {
      xs_.pop_front();
      ws_.pop_front();
    }
    const std::vector<std::vector<double>> xs(xs_.begin(), xs_.end());
    const std::vector<std::vector<double>> ws(ws_.begin(), ws_.end());
    AndersonResult aa = anderson_general(xs, ws, config_.aa_depth, config_.aa_beta, problem_.stiffness());

    StepOutput out;
    out.record.theta = aa.theta;
    out.record.alpha = 1.0 - aa.alphas.back();
    if (aa.depth_used == 0 && config_.aa_beta == 1.0) {
      out.next = std::move(gx);
    } else {
      problem_.bc().impose(aa.next);
      out.next = {std::move(aa.next), std::move(gx.pressure)};
    }
    if (hooks_.on_aa_step && xs.size() >= 2) {
      const std::size_t n = ws.size() - 1;
      hooks_.on_aa_step({static_cast<int>(h.records.size()) + 1, ws[n - 1], ws[n], *out.record.alpha, aa.theta,
                         aa.depth_used == 0});
    }
    return out;
  }

  const SolverConfig& config_;
  const NseProblem& problem_;
  const SolverHooks& hooks_;
  std::deque<std::vector<double>> xs_;
  std::deque<std::vector<double>> ws_;
};

}  // namespace

SolveResult run_solver(const SolverConfig& config, const NseProblem& problem, const SolverHooks& hooks) {
  config.validate();
  return Runner(config, problem, hooks).run();
}

double estimate_order(std::span<const double> residuals, int tail) {
  std::vector<double> usable;
  for (double r : residuals) {
    if (!(r > 1e-12) || !std::isfinite(r)) break;
    usable.push_back(r);
  }
  if (tail > 0 && usable.size() > static_cast<std::size_t>(tail)) {
    usable.erase(usable.begin(), usable.end() - tail);
  }
  if (usable.size() < 4) {
    throw InsufficientDataError("need at least 3 residual pairs above 1e-12, have " +
                                std::to_string(usable.empty() ? 0 : usable.size() - 1));
  }
  const std::size_t n = usable.size() - 1;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += std::log(usable[i]);
    sy += std::log(usable[i + 1]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(usable[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(usable[i + 1]) - my);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("residuals are constant; slope undefined");
  return sxy / sxx;
}

StabilityReport iterate_stability_report(const ConvergenceHistory& history, const NseProblem& problem) {
  StabilityReport rep;
  rep.bound = problem.load_hminus1_norm() / problem.nu();
  rep.asserted = problem.bc().is_homogeneous();
  for (double v : history.picard_half_steps) {
    rep.max_half_step = std::max(rep.max_half_step, v);
    if (v > rep.bound * (1.0 + 1e-8)) ++rep.violations;
  }
  return rep;
}

}  // namespace nsfem
