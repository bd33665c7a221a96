#include "nsfem/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "nsfem/quadrature.hpp"

namespace nsfem {

Vec2 ElementGeometry::map(const std::array<double, 3>& bary) const {
  return {bary[0] * vertices[0].x + bary[1] * vertices[1].x + bary[2] * vertices[2].x,
          bary[0] * vertices[0].y + bary[1] * vertices[1].y + bary[2] * vertices[2].y};
}

ElementGeometry element_geometry(const Mesh& mesh, std::size_t t) {
  ElementGeometry g;
  const auto& tri = mesh.triangles()[t];
  for (int i = 0; i < 3; ++i) g.vertices[i] = mesh.vertices()[tri[i]];
  const Vec2& a = g.vertices[0];
  const Vec2& b = g.vertices[1];
  const Vec2& c = g.vertices[2];
  const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  g.area = 0.5 * det;
  // grad(lambda_i) = rot(opposite edge) / det
  g.grad_lambda[0] = {(b.y - c.y) / det, (c.x - b.x) / det};
  g.grad_lambda[1] = {(c.y - a.y) / det, (a.x - c.x) / det};
  g.grad_lambda[2] = {(a.y - b.y) / det, (b.x - a.x) / det};
  return g;
}

std::array<double, 6> p2_values(const std::array<double, 3>& l) {
  return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[0] * l[1], 4.0 * l[1] * l[2], 4.0 * l[2] * l[0]};
}

std::array<Vec2, 6> p2_gradients(const std::array<double, 3>& l, const ElementGeometry& geo) {
  const auto& g = geo.grad_lambda;
  std::array<Vec2, 6> out;
  for (int i = 0; i < 3; ++i) {
    const double s = 4.0 * l[i] - 1.0;
    out[i] = {s * g[i].x, s * g[i].y};
  }
  for (int e = 0; e < 3; ++e) {
    const int i = e, j = (e + 1) % 3;
    out[3 + e] = {4.0 * (l[j] * g[i].x + l[i] * g[j].x), 4.0 * (l[j] * g[i].y + l[i] * g[j].y)};
  }
  return out;
}

MixedSpace::MixedSpace(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  if (!mesh_) throw std::invalid_argument("MixedSpace: null mesh");
  const Mesh& m = *mesh_;
  const std::size_t nv = m.num_vertices();
  n_scalar_ = nv + m.num_edges();

  dof_points_.reserve(n_scalar_);
  dof_points_.insert(dof_points_.end(), m.vertices().begin(), m.vertices().end());
  for (const Edge& e : m.edges()) {
    const Vec2& a = m.vertices()[e.v0];
    const Vec2& b = m.vertices()[e.v1];
    dof_points_.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
  }

  geometry_.reserve(m.num_triangles());
  for (std::size_t t = 0; t < m.num_triangles(); ++t) geometry_.push_back(element_geometry(m, t));

  std::vector<char> on_boundary(n_scalar_, 0);
  for (const auto& be : m.boundary_edges()) {
    const int e = m.find_edge(be.a, be.b);
    if (e < 0) throw std::invalid_argument("MixedSpace: boundary edge not present in triangulation");
    auto& list = boundary_by_tag_[static_cast<int>(be.tag)];
    for (int s : {be.a, be.b, static_cast<int>(nv) + e}) {
      list.push_back(s);
      on_boundary[s] = 1;
    }
  }
  for (auto& list : boundary_by_tag_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  for (std::size_t s = 0; s < n_scalar_; ++s) {
    (on_boundary[s] ? boundary_all_ : interior_).push_back(static_cast<int>(s));
  }
}

std::array<int, 6> MixedSpace::element_dofs(std::size_t t) const {
  const auto& tri = mesh_->triangles()[t];
  const auto& te = mesh_->triangle_edges()[t];
  const int nv = static_cast<int>(mesh_->num_vertices());
  return {tri[0], tri[1], tri[2], nv + te[0], nv + te[1], nv + te[2]};
}

int MixedSpace::locate(Vec2 p, std::array<double, 3>& bary) const {
  constexpr double tol = 1e-12;
  for (std::size_t t = 0; t < geometry_.size(); ++t) {
    const auto& g = geometry_[t];
    std::array<double, 3> l{};
    for (int i = 0; i < 3; ++i) {
      const Vec2& o = g.vertices[(i + 1) % 3];
      l[i] = g.grad_lambda[i].x * (p.x - o.x) + g.grad_lambda[i].y * (p.y - o.y);
    }
    if (l[0] >= -tol && l[1] >= -tol && l[2] >= -tol) {
      bary = l;
      return static_cast<int>(t);
    }
  }
  return -1;
}

FEField::FEField(std::shared_ptr<const MixedSpace> space, FieldKind kind)
    : space_(std::move(space)), kind_(kind) {
  if (!space_) throw std::invalid_argument("FEField: null space");
  coeffs_.assign(kind_ == FieldKind::Velocity ? space_->num_velocity_dofs() : space_->num_pressure_dofs(), 0.0);
}

FEField::FEField(std::shared_ptr<const MixedSpace> space, FieldKind kind, std::vector<double> coefficients)
    : space_(std::move(space)), kind_(kind), coeffs_(std::move(coefficients)) {
  if (!space_) throw std::invalid_argument("FEField: null space");
  const std::size_t expect =
      kind_ == FieldKind::Velocity ? space_->num_velocity_dofs() : space_->num_pressure_dofs();
  if (coeffs_.size() != expect) throw std::invalid_argument("FEField: coefficient length does not match space");
}

Vec2 FEField::velocity_at(std::size_t t, const std::array<double, 3>& bary) const {
  const auto dofs = space_->element_dofs(t);
  const auto phi = p2_values(bary);
  const std::size_t n = space_->num_scalar_dofs();
  Vec2 u;
  for (int a = 0; a < 6; ++a) {
    u.x += coeffs_[dofs[a]] * phi[a];
    u.y += coeffs_[n + dofs[a]] * phi[a];
  }
  return u;
}

Vec2 FEField::velocity_gradient_row(int component, std::size_t t, const std::array<double, 3>& bary) const {
  const auto dofs = space_->element_dofs(t);
  const auto grad = p2_gradients(bary, space_->geometry(t));
  const std::size_t off = component * space_->num_scalar_dofs();
  Vec2 g;
  for (int a = 0; a < 6; ++a) {
    g.x += coeffs_[off + dofs[a]] * grad[a].x;
    g.y += coeffs_[off + dofs[a]] * grad[a].y;
  }
  return g;
}

double FEField::divergence_at(std::size_t t, const std::array<double, 3>& bary) const {
  return velocity_gradient_row(0, t, bary).x + velocity_gradient_row(1, t, bary).y;
}

double FEField::pressure_at(std::size_t t, const std::array<double, 3>& bary) const {
  return bary[0] * coeffs_[3 * t] + bary[1] * coeffs_[3 * t + 1] + bary[2] * coeffs_[3 * t + 2];
}

Vec2 FEField::evaluate_velocity(Vec2 p) const {
  std::array<double, 3> bary{};
  const int t = space_->locate(p, bary);
  if (t < 0) throw std::out_of_range("FEField::evaluate_velocity: point outside mesh");
  return velocity_at(static_cast<std::size_t>(t), bary);
}

FEField interpolate(std::shared_ptr<const MixedSpace> space, const VectorFunction& u) {
  FEField f(space, FieldKind::Velocity);
  const std::size_t n = space->num_scalar_dofs();
  auto& c = f.coefficients();
  for (std::size_t s = 0; s < n; ++s) {
    const Vec2 p = space->dof_point(static_cast<int>(s));
    const Vec2 v = u(p.x, p.y);
    c[s] = v.x;
    c[n + s] = v.y;
  }
  return f;
}

FEField interpolate_component(std::shared_ptr<const MixedSpace> space, int component,
                              const ScalarFunction& f) {
  return interpolate(std::move(space), [&](double x, double y) {
    const double v = f(x, y);
    return component == 0 ? Vec2{v, 0.0} : Vec2{0.0, v};
  });
}

FEField interpolate_pressure(std::shared_ptr<const MixedSpace> space, const ScalarFunction& p) {
  FEField f(space, FieldKind::Pressure);
  auto& c = f.coefficients();
  for (std::size_t t = 0; t < space->mesh().num_triangles(); ++t) {
    const auto& g = space->geometry(t);
    for (int i = 0; i < 3; ++i) c[3 * t + i] = p(g.vertices[i].x, g.vertices[i].y);
  }
  return f;
}

namespace {

template <class Integrand>
double integrate(const MixedSpace& space, int degree, Integrand&& integrand) {
  const auto& rule = triangle_quadrature(degree);
  double total = 0.0;
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto& g = space.geometry(t);
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) local += rule.weights[q] * integrand(t, rule.points[q]);
    total += 2.0 * g.area * local;
  }
  return total;
}

}  // namespace

double l2_norm(const FEField& field) {
  const MixedSpace& s = field.space();
  if (field.kind() == FieldKind::Velocity) {
    return std::sqrt(integrate(s, 4, [&](std::size_t t, const auto& b) {
      const Vec2 u = field.velocity_at(t, b);
      return u.x * u.x + u.y * u.y;
    }));
  }
  return std::sqrt(integrate(s, 2, [&](std::size_t t, const auto& b) {
    const double p = field.pressure_at(t, b);
    return p * p;
  }));
}

double h1_seminorm(const FEField& field) {
  const MixedSpace& s = field.space();
  if (field.kind() == FieldKind::Velocity) {
    return std::sqrt(integrate(s, 2, [&](std::size_t t, const auto& b) {
      const Vec2 gx = field.velocity_gradient_row(0, t, b);
      const Vec2 gy = field.velocity_gradient_row(1, t, b);
      return gx.x * gx.x + gx.y * gx.y + gy.x * gy.x + gy.y * gy.y;
    }));
  }
  // Broken gradient of the discontinuous pressure.
  const auto& c = field.coefficients();
  double total = 0.0;
  for (std::size_t t = 0; t < s.mesh().num_triangles(); ++t) {
    const auto& g = s.geometry(t);
    Vec2 grad;
    for (int i = 0; i < 3; ++i) {
      grad.x += c[3 * t + i] * g.grad_lambda[i].x;
      grad.y += c[3 * t + i] * g.grad_lambda[i].y;
    }
    total += g.area * (grad.x * grad.x + grad.y * grad.y);
  }
  return std::sqrt(total);
}

double div_l2_norm(const FEField& velocity) {
  if (velocity.kind() != FieldKind::Velocity) throw std::invalid_argument("div_l2_norm: velocity field required");
  return std::sqrt(integrate(velocity.space(), 2, [&](std::size_t t, const auto& b) {
    const double d = velocity.divergence_at(t, b);
    return d * d;
  }));
}

double l2_error(const FEField& velocity, const VectorFunction& exact) {
  if (velocity.kind() != FieldKind::Velocity) throw std::invalid_argument("l2_error: velocity field required");
  const MixedSpace& s = velocity.space();
  return std::sqrt(integrate(s, 8, [&](std::size_t t, const auto& b) {
    const Vec2 uh = velocity.velocity_at(t, b);
    const Vec2 p = s.geometry(t).map(b);
    const Vec2 u = exact(p.x, p.y);
    return (uh.x - u.x) * (uh.x - u.x) + (uh.y - u.y) * (uh.y - u.y);
  }));
}

double l2_error(const FEField& pressure, const ScalarFunction& exact, bool remove_mean) {
  if (pressure.kind() != FieldKind::Pressure) throw std::invalid_argument("l2_error: pressure field required");
  const MixedSpace& s = pressure.space();
  double shift = 0.0;
  if (remove_mean) {
    const double exact_mean = integrate(s, 8, [&](std::size_t t, const auto& b) {
      const Vec2 p = s.geometry(t).map(b);
      return exact(p.x, p.y);
    });
    shift = exact_mean - pressure_mean(pressure);
  }
  return std::sqrt(integrate(s, 8, [&](std::size_t t, const auto& b) {
    const Vec2 p = s.geometry(t).map(b);
    const double d = pressure.pressure_at(t, b) + shift - exact(p.x, p.y);
    return d * d;
  }));
}

double pressure_mean(const FEField& pressure) {
  const auto& c = pressure.coefficients();
  const MixedSpace& s = pressure.space();
  double total = 0.0;
  for (std::size_t t = 0; t < s.mesh().num_triangles(); ++t) {
    total += s.geometry(t).area * (c[3 * t] + c[3 * t + 1] + c[3 * t + 2]) / 3.0;
  }
  return total;
}

void write_vtk(const FEField& velocity, const FEField& pressure, std::ostream& out) {
  if (velocity.kind() != FieldKind::Velocity || pressure.kind() != FieldKind::Pressure) {
    throw std::invalid_argument("write_vtk: expected (velocity, pressure)");
  }
  const Mesh& mesh = velocity.space().mesh();
  const std::size_t n = velocity.space().num_scalar_dofs();
  const auto& u = velocity.coefficients();
  const auto& p = pressure.coefficients();
  char buf[128];
  out << "# vtk DataFile Version 3.0\n";
  out << "nsfem velocity/pressure\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.9e %.9e %.9e\n", v.x, v.y, 0.0);
    out << buf;
  }
  out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) out << "5\n";
  out << "POINT_DATA " << mesh.num_vertices() << '\n';
  out << "VECTORS velocity double\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    std::snprintf(buf, sizeof buf, "%.9e %.9e %.9e\n", u[v], u[n + v], 0.0);
    out << buf;
  }
  out << "CELL_DATA " << mesh.num_triangles() << '\n';
  out << "SCALARS pressure double 1\n";
  out << "LOOKUP_TABLE default\n";
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    std::snprintf(buf, sizeof buf, "%.9e\n", (p[3 * t] + p[3 * t + 1] + p[3 * t + 2]) / 3.0);
    out << buf;
  }
}

}  // namespace nsfem
