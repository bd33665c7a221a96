#include <doctest.h>

#include <cmath>

#include "nsfem/assembly.hpp"
#include "nsfem/bench.hpp"
#include "nsfem/linsolve.hpp"
#include "support.hpp"

using namespace nsfem;

namespace {

// Stokes with the analytical pair: -lap u = 2u for u = (cos x sin y, -sin x cos y).
VectorFunction stokes_forcing(double nu) {
  return [nu](double x, double y) {
    const Vec2 u = exact_velocity(x, y);
    return Vec2{2 * nu * u.x + 0.5 * std::sin(2 * x) + 1.0, 2 * nu * u.y + 0.5 * std::sin(2 * y) + 1.0};
  };
}

struct Stokes {
  std::shared_ptr<const MixedSpace> space;
  BCData bc;
  SaddleSystem system;
};

Stokes stokes(int n, double nu = 1.0) {
  auto s = testing::space(n);
  BCData bc = BCData::from_function(s, exact_velocity);
  SaddleSystem sys = apply_dirichlet(assemble_viscous(*s, nu), assemble_divergence(*s),
                                     assemble_source(*s, stokes_forcing(nu)), bc, pressure_mean_weights(*s));
  return {s, std::move(bc), std::move(sys)};
}

double stokes_error(int n) {
  const Stokes st = stokes(n);
  const SaddleSolution sol = solve_saddle(st.system);
  return l2_error(FEField(st.space, FieldKind::Velocity, st.bc.reconstruct(sol.velocity)), exact_velocity);
}

// The full Lagrange-multiplier system, built independently of the pinned path.
SparseMatrix bordered(const SaddleSystem& s) {
  const std::size_t nu = s.num_velocity(), np = s.num_pressure();
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < nu; ++i)
    for (int k = s.a.row_ptr()[i]; k < s.a.row_ptr()[i + 1]; ++k) t.push_back({int(i), s.a.col_idx()[k], s.a.values()[k]});
  for (std::size_t q = 0; q < np; ++q)
    for (int k = s.b.row_ptr()[q]; k < s.b.row_ptr()[q + 1]; ++k) {
      t.push_back({int(nu + q), s.b.col_idx()[k], -s.b.values()[k]});
      t.push_back({s.b.col_idx()[k], int(nu + q), -s.b.values()[k]});
    }
  for (std::size_t q = 0; q < np; ++q) {
    t.push_back({int(nu + q), int(nu + np), s.mean_weights[q]});
    t.push_back({int(nu + np), int(nu + q), s.mean_weights[q]});
  }
  return SparseMatrix::from_triplets(nu + np + 1, nu + np + 1, t);
}

}  // namespace

TEST_CASE("pinned solve matches the bordered multiplier system") {
  for (int n : {1, 2, 3}) {
    auto s = testing::space(n);
    const BCData bc = BCData::from_function(s, [](double x, double y) { return Vec2{y * y, x}; });
    const FEField wind = interpolate(s, [](double x, double y) { return Vec2{x - y, x * y}; });
    const SparseMatrix l = add(assemble_viscous(*s, 0.1), assemble_convection(*s, wind));
    const SaddleSystem sys = apply_dirichlet(l, assemble_divergence(*s), testing::random_vector(s->num_velocity_dofs()),
                                             bc, pressure_mean_weights(*s));
    const SaddleSolution sol = solve_saddle(sys);

    std::vector<double> rhs(sys.g);
    for (double h : sys.h) rhs.push_back(-h);
    rhs.push_back(0.0);
    DirectSolver direct;
    direct.factorize(bordered(sys));
    const auto ref = direct.solve(rhs);

    const std::size_t nu = sys.num_velocity(), np = sys.num_pressure();
    double scale = 0.0;
    for (double v : ref) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < nu; ++i) CHECK(std::abs(sol.velocity[i] - ref[i]) <= 1e-10 * scale);
    for (std::size_t q = 0; q < np; ++q) CHECK(std::abs(sol.pressure[q] - ref[nu + q]) <= 1e-10 * scale);
    CHECK(std::abs(sol.multiplier - ref[nu + np]) <= 1e-10 * std::max(1.0, std::abs(ref[nu + np])));
    CHECK(algebraic_residual(sys, sol) <= 1e-10);
  }
}

TEST_CASE("Stokes velocity converges at third order") {
  const double e8 = stokes_error(8), e16 = stokes_error(16);
  const double rate = std::log2(e8 / e16);
  MESSAGE("Stokes L2 errors " << e8 << " " << e16 << " rate " << rate);
  CHECK(rate >= 2.7);
  CHECK(rate <= 3.3);
}

TEST_CASE("saddle solution properties") {
  const Stokes st = stokes(4, 0.5);
  const SaddleSolution sol = solve_saddle(st.system);
  CHECK(algebraic_residual(st.system, sol) <= 1e-10);
  CHECK(std::abs(dot(st.system.mean_weights, sol.pressure)) <= 1e-12);
  // Discretely divergence free.
  const auto bu = st.system.b.multiply(sol.velocity);
  for (std::size_t q = 0; q < bu.size(); ++q) CHECK(std::abs(bu[q] - st.system.h[q]) <= 1e-11);

  const SaddleSolution again = solve_saddle(st.system);
  CHECK(again.velocity == sol.velocity);
  CHECK(again.pressure == sol.pressure);

  SaddleSystem zero = st.system;
  std::fill(zero.g.begin(), zero.g.end(), 0.0);
  std::fill(zero.h.begin(), zero.h.end(), 0.0);
  const SaddleSolution z = solve_saddle(zero);
  for (double v : z.velocity) CHECK(v == 0.0);
  for (double v : z.pressure) CHECK(v == 0.0);
  CHECK(algebraic_residual(zero, z) == 0.0);
}

TEST_CASE("residual grows linearly with a perturbation") {
  const Stokes st = stokes(3);
  const SaddleSolution sol = solve_saddle(st.system);
  const auto e = testing::random_vector(sol.velocity.size());
  auto perturbed = [&](double eps) {
    SaddleSolution s = sol;
    for (std::size_t i = 0; i < e.size(); ++i) s.velocity[i] += eps * e[i];
    return algebraic_residual(st.system, s);
  };
  const double r1 = perturbed(1e-6), r2 = perturbed(2e-6), r4 = perturbed(4e-6);
  CHECK(r1 > 1e-9);
  CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(r4 / r2 == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("direct solver") {
  const auto a = SparseMatrix::from_triplets(3, 3, {{0, 0, 4}, {0, 1, 1}, {1, 0, 1}, {1, 1, 3}, {2, 2, 2}, {2, 0, -1}});
  DirectSolver s;
  s.factorize(a);
  const std::vector<double> x{1.0, -2.0, 0.5};
  const auto y = s.solve(a.multiply(x));
  for (int i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-14));
  CHECK(s.pivot_ratio() > 0.0);

  CHECK(s.symbolic_reuses() == 0);
  s.factorize(a.scaled(2.0));
  CHECK(s.symbolic_reuses() == 1);
  const auto y2 = s.solve(a.multiply(x));
  for (int i = 0; i < 3; ++i) CHECK(y2[i] == doctest::Approx(x[i] / 2).epsilon(1e-14));

  CHECK_THROWS_AS(s.solve(std::vector<double>(2)), std::invalid_argument);
  CHECK_THROWS_AS(s.factorize(SparseMatrix(2, 3)), std::invalid_argument);
}

TEST_CASE("singular systems are reported") {
  DirectSolver s;
  CHECK_THROWS_AS(s.factorize(SparseMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}})),
                  SingularSystemError);
  CHECK_THROWS_AS(s.factorize(SparseMatrix::from_triplets(2, 2, {{0, 0, 1}})), SingularSystemError);

  // P2 / P1dc on the unrefined single-square mesh: one interior velocity node
  // cannot control six pressures.
  auto sp = testing::space(1, false);
  const BCData bc = BCData::homogeneous(sp);
  const SaddleSystem sys = apply_dirichlet(assemble_viscous(*sp, 1.0), assemble_divergence(*sp),
                                           std::vector<double>(sp->num_velocity_dofs(), 1.0), bc,
                                           pressure_mean_weights(*sp));
  CHECK_THROWS_AS(solve_saddle(sys), SingularSystemError);
}
