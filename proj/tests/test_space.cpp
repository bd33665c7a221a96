#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nsfem/assembly.hpp"
#include "nsfem/quadrature.hpp"
#include "nsfem/space.hpp"
#include "support.hpp"

using namespace nsfem;
using std::numbers::pi;

namespace {

const auto sine_bump = [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
const auto exact_u = [](double x, double y) {
  return Vec2{std::cos(x) * std::sin(y), -std::sin(x) * std::cos(y)};
};

}  // namespace

TEST_CASE("dof counts") {
  const auto s32 = testing::space(32);
  CHECK(s32->num_velocity_dofs() == 24834);
  CHECK(s32->num_pressure_dofs() == 18432);
  const double total = static_cast<double>(s32->num_velocity_dofs() + s32->num_pressure_dofs());
  CHECK(total == 43266);
  CHECK(std::abs(total - 42000.0) / 42000.0 < 0.05);

  const auto s1 = testing::space(1);
  CHECK(s1->num_velocity_dofs() == 34);
  CHECK(s1->num_pressure_dofs() == 18);
  CHECK(s1->inf_sup_safe());
  CHECK_FALSE(testing::space(2, false)->inf_sup_safe());

  for (int n = 1; n <= 6; ++n) {
    const auto s = testing::space(n);
    CHECK(s->num_pressure_dofs() % 3 == 0);
    CHECK(s->num_velocity_dofs() == 2 * (s->mesh().num_vertices() + s->mesh().num_edges()));
    CHECK(s->boundary_scalar_dofs().size() + s->interior_scalar_dofs().size() == s->num_scalar_dofs());
    std::vector<int> seen(s->num_scalar_dofs(), 0);
    for (int d : s->boundary_scalar_dofs()) ++seen[d];
    for (int d : s->interior_scalar_dofs()) ++seen[d];
    for (int v : seen) CHECK(v == 1);
  }
}

TEST_CASE("boundary dofs per tag lie on their side") {
  const auto s = testing::space(3);
  for (BoundaryTag tag : kAllBoundaryTags) {
    CHECK(s->boundary_scalar_dofs(tag).size() == 7);  // 2n + 1 points per side
    for (int d : s->boundary_scalar_dofs(tag)) {
      const Vec2 p = s->dof_point(d);
      switch (tag) {
        case BoundaryTag::Bottom: CHECK(p.y == 0.0); break;
        case BoundaryTag::Top: CHECK(p.y == 1.0); break;
        case BoundaryTag::Left: CHECK(p.x == 0.0); break;
        case BoundaryTag::Right: CHECK(p.x == 1.0); break;
      }
    }
  }
}

TEST_CASE("P2 basis is a partition of unity with zero-sum gradients") {
  const auto s = testing::space(2);
  for (std::size_t t = 0; t < s->mesh().num_triangles(); ++t) {
    for (int d : {2, 5, 8}) {
      const QuadratureRule& q = triangle_quadrature(d);
      for (const auto& b : q.points) {
        double sum = 0.0;
        for (double v : p2_values(b)) sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-14);
        Vec2 g;
        for (const Vec2& gi : p2_gradients(b, s->geometry(t))) {
          g.x += gi.x;
          g.y += gi.y;
        }
        CHECK(std::abs(g.x) <= 1e-11);
        CHECK(std::abs(g.y) <= 1e-11);
      }
    }
  }
}

TEST_CASE("interpolation") {
  const auto s = testing::space(4);
  const FEField c = interpolate(s, [](double, double) { return Vec2{1.0, 0.0}; });
  const std::size_t n = s->num_scalar_dofs();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(c.coefficients()[i] == 1.0);
    CHECK(c.coefficients()[n + i] == 0.0);
  }

  const FEField lin = interpolate(s, [](double x, double y) { return Vec2{x, y}; });
  for (int k = 0; k < 200; ++k) {
    const Vec2 p{testing::uniform(0, 1), testing::uniform(0, 1)};
    const Vec2 v = lin.evaluate_velocity(p);
    CHECK(std::abs(v.x - p.x) <= 1e-14);
    CHECK(std::abs(v.y - p.y) <= 1e-14);
  }

  const FEField p1 = interpolate_pressure(s, [](double x, double y) { return 2 * x - y + 0.5; });
  for (std::size_t t = 0; t < s->mesh().num_triangles(); t += 7) {
    const std::array<double, 3> b{0.2, 0.3, 0.5};
    const Vec2 x = s->geometry(t).map(b);
    CHECK(std::abs(p1.pressure_at(t, b) - (2 * x.x - x.y + 0.5)) <= 1e-14);
  }
}

TEST_CASE("interpolant of the analytical velocity on the refined n=32 mesh") {
  const auto s = testing::space(32);
  CHECK(l2_error(interpolate(s, exact_u), exact_u) <= 1e-4);
}

TEST_CASE("norms") {
  const auto s = testing::space(4);
  const FEField zero(s, FieldKind::Velocity);
  CHECK(l2_norm(zero) == 0.0);
  CHECK(h1_seminorm(zero) == 0.0);
  CHECK(div_l2_norm(zero) == 0.0);

  const FEField sheared = interpolate(s, [](double x, double y) { return Vec2{x, -y}; });
  CHECK(div_l2_norm(sheared) <= 1e-13);

  // (x, 0): |grad|^2 = 1 over the unit square, |u|^2 integrates to 1/3.
  const FEField xfield = interpolate(s, [](double x, double) { return Vec2{x, 0.0}; });
  CHECK(std::abs(h1_seminorm(xfield) - 1.0) <= 1e-13);
  CHECK(std::abs(l2_norm(xfield) - std::sqrt(1.0 / 3.0)) <= 1e-13);
  CHECK(std::abs(div_l2_norm(xfield) - 1.0) <= 1e-13);

  for (int n : {8, 16}) {
    const FEField bump = interpolate_component(testing::space(n), 0, sine_bump);
    CHECK(std::abs(l2_norm(bump) - 0.5) <= 2.0 / (n * n));
  }
}

TEST_CASE("norms scale with the field") {
  const auto s = testing::space(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto coeffs = testing::random_vector(s->num_velocity_dofs());
    const double c = testing::uniform(-5, 5);
    std::vector<double> scaled = coeffs;
    for (double& v : scaled) v *= c;
    const FEField f(s, FieldKind::Velocity, coeffs), g(s, FieldKind::Velocity, scaled);
    CHECK(testing::rel_diff(l2_norm(g), std::abs(c) * l2_norm(f)) <= 1e-12);
    CHECK(testing::rel_diff(h1_seminorm(g), std::abs(c) * h1_seminorm(f)) <= 1e-12);
    CHECK(testing::rel_diff(div_l2_norm(g), std::abs(c) * div_l2_norm(f)) <= 1e-12);
  }
}

TEST_CASE("field length must match the space") {
  const auto s = testing::space(1);
  CHECK_THROWS_AS(FEField(s, FieldKind::Velocity, std::vector<double>(3)), std::invalid_argument);
  CHECK_THROWS_AS(FEField(s, FieldKind::Pressure, std::vector<double>(34)), std::invalid_argument);
}

TEST_CASE("discrete H^-1 norm") {
  const auto s = testing::space(32);
  CHECK(discrete_hminus1_norm(s, ScalarFunction([](double, double) { return 0.0; })) == 0.0);

  // sin(pi x) sin(pi y) is a Dirichlet eigenfunction with eigenvalue 2 pi^2.
  const double expected = 1.0 / (2.0 * std::sqrt(2.0) * pi);
  const double v = discrete_hminus1_norm(s, ScalarFunction(sine_bump));
  CHECK(std::abs(v - expected) / expected < 0.01);

  const double v2 = discrete_hminus1_norm(s, ScalarFunction([](double x, double y) { return 2 * sine_bump(x, y); }));
  CHECK(std::abs(v2 - 2 * v) <= 1e-12 * v);
}

TEST_CASE("discrete H^-1 norm obeys the Poincare bound") {
  const auto s = testing::space(8);
  const double cp = 1.0 / (std::sqrt(2.0) * pi);
  const std::vector<ScalarFunction> fs = {
      sine_bump,
      [](double x, double y) { return x * y + 1.0; },
      [](double x, double y) { return std::exp(x - 2 * y); },
      [](double x, double y) { return std::cos(3 * x) * std::sin(5 * y); },
  };
  for (const auto& f : fs) {
    const double lhs = discrete_hminus1_norm(s, f);
    const double rhs = cp * l2_norm(interpolate_component(s, 0, f));
    CHECK(lhs <= rhs * 1.02);
  }
}

TEST_CASE("vtk export") {
  const auto s = testing::space(1);
  const FEField u = interpolate(s, exact_u);
  const FEField p = interpolate_pressure(s, [](double x, double) { return x; });
  std::ostringstream out;
  write_vtk(u, p, out);
  const std::string t = out.str();
  CHECK(t.find("# vtk DataFile Version") == 0);
  CHECK(t.find("UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(t.find("POINT_DATA 6") != std::string::npos);
  CHECK(t.find("CELL_DATA 6") != std::string::npos);
  CHECK(t.find("6.666666667e-01") != std::string::npos);
}
