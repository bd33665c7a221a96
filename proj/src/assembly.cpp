#include "nsfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "nsfem/quadrature.hpp"

namespace nsfem {

namespace {

void require_same_space(const MixedSpace& space, const FEField& a, const char* what) {
  if (&a.space() != &space && a.space().mesh_ptr() != space.mesh_ptr()) {
    throw std::invalid_argument(std::string(what) + ": field lives on a different space");
  }
  if (a.kind() != FieldKind::Velocity) throw std::invalid_argument(std::string(what) + ": velocity field required");
}

// Value and gradient rows of a velocity field on one element at one point.
struct LocalVelocity {
  Vec2 value;
  Vec2 grad_x;  // grad of the x component
  Vec2 grad_y;  // grad of the y component
  double div() const { return grad_x.x + grad_y.y; }
};

LocalVelocity local_velocity(std::span<const double> coeffs, std::size_t n, const std::array<int, 6>& dofs,
                             const std::array<double, 6>& phi, const std::array<Vec2, 6>& grad) {
  LocalVelocity v;
  for (int a = 0; a < 6; ++a) {
    const double cx = coeffs[dofs[a]];
    const double cy = coeffs[n + dofs[a]];
    v.value.x += cx * phi[a];
    v.value.y += cy * phi[a];
    v.grad_x.x += cx * grad[a].x;
    v.grad_x.y += cx * grad[a].y;
    v.grad_y.x += cy * grad[a].x;
    v.grad_y.y += cy * grad[a].y;
  }
  return v;
}

template <class LocalKernel>
SparseMatrix assemble_scalar(const MixedSpace& space, int degree, LocalKernel&& kernel) {
  const auto& rule = triangle_quadrature(degree);
  const std::size_t nt = space.mesh().num_triangles();
  std::vector<Triplet> triplets;
  triplets.reserve(36 * nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& geo = space.geometry(t);
    const auto dofs = space.element_dofs(t);
    double local[6][6] = {};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wq = 2.0 * geo.area * rule.weights[q];
      const auto phi = p2_values(rule.points[q]);
      const auto grad = p2_gradients(rule.points[q], geo);
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) local[i][j] += wq * kernel(phi, grad, i, j);
      }
    }
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) triplets.push_back({dofs[i], dofs[j], local[i][j]});
    }
  }
  const std::size_t n = space.num_scalar_dofs();
  return SparseMatrix::from_triplets(n, n, std::move(triplets));
}

}  // namespace

SparseMatrix assemble_scalar_stiffness(const MixedSpace& space) {
  return assemble_scalar(space, 2, [](const auto&, const auto& grad, int i, int j) {
    return grad[i].x * grad[j].x + grad[i].y * grad[j].y;
  });
}

SparseMatrix assemble_scalar_mass(const MixedSpace& space) {
  return assemble_scalar(space, 4, [](const auto& phi, const auto&, int i, int j) { return phi[i] * phi[j]; });
}

SparseMatrix velocity_block_diagonal(const SparseMatrix& scalar) {
  const std::size_t n = scalar.rows();
  std::vector<int> row_ptr(2 * n + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  cols.reserve(2 * scalar.nnz());
  vals.reserve(2 * scalar.nnz());
  for (int c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = scalar.row_ptr()[i]; k < scalar.row_ptr()[i + 1]; ++k) {
        cols.push_back(scalar.col_idx()[k] + c * static_cast<int>(n));
        vals.push_back(scalar.values()[k]);
      }
      row_ptr[c * n + i + 1] = static_cast<int>(cols.size());
    }
  }
  return SparseMatrix(2 * n, 2 * n, std::move(row_ptr), std::move(cols), std::move(vals));
}

SparseMatrix assemble_viscous(const MixedSpace& space, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("assemble_viscous: nu must be > 0");
  return velocity_block_diagonal(assemble_scalar_stiffness(space)).scaled(nu);
}

SparseMatrix assemble_divergence(const MixedSpace& space) {
  const auto& rule = triangle_quadrature(2);
  const std::size_t nt = space.mesh().num_triangles();
  const int n = static_cast<int>(space.num_scalar_dofs());
  std::vector<Triplet> triplets;
  triplets.reserve(36 * nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& geo = space.geometry(t);
    const auto dofs = space.element_dofs(t);
    double bx[3][6] = {}, by[3][6] = {};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wq = 2.0 * geo.area * rule.weights[q];
      const auto& lam = rule.points[q];
      const auto grad = p2_gradients(lam, geo);
      for (int k = 0; k < 3; ++k) {
        for (int a = 0; a < 6; ++a) {
          bx[k][a] += wq * lam[k] * grad[a].x;
          by[k][a] += wq * lam[k] * grad[a].y;
        }
      }
    }
    for (int k = 0; k < 3; ++k) {
      const int row = static_cast<int>(3 * t) + k;
      for (int a = 0; a < 6; ++a) {
        triplets.push_back({row, dofs[a], bx[k][a]});
        triplets.push_back({row, n + dofs[a], by[k][a]});
      }
    }
  }
  return SparseMatrix::from_triplets(space.num_pressure_dofs(), space.num_velocity_dofs(), std::move(triplets));
}

SparseMatrix assemble_convection(const MixedSpace& space, const FEField& a) {
  require_same_space(space, a, "assemble_convection");
  const auto& rule = triangle_quadrature(5);
  const std::size_t nt = space.mesh().num_triangles();
  const std::size_t n = space.num_scalar_dofs();
  const auto& coeffs = a.coefficients();
  std::vector<Triplet> triplets;
  triplets.reserve(72 * nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& geo = space.geometry(t);
    const auto dofs = space.element_dofs(t);
    double local[6][6] = {};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wq = 2.0 * geo.area * rule.weights[q];
      const auto phi = p2_values(rule.points[q]);
      const auto grad = p2_gradients(rule.points[q], geo);
      const LocalVelocity av = local_velocity(coeffs, n, dofs, phi, grad);
      const double half_div = 0.5 * av.div();
      for (int j = 0; j < 6; ++j) {
        const double adv = av.value.x * grad[j].x + av.value.y * grad[j].y + half_div * phi[j];
        for (int i = 0; i < 6; ++i) local[i][j] += wq * adv * phi[i];
      }
    }
    for (int c = 0; c < 2; ++c) {
      const int off = c * static_cast<int>(n);
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) triplets.push_back({off + dofs[i], off + dofs[j], local[i][j]});
      }
    }
  }
  return SparseMatrix::from_triplets(2 * n, 2 * n, std::move(triplets));
}

SparseMatrix assemble_newton_reaction(const MixedSpace& space, const FEField& a) {
  require_same_space(space, a, "assemble_newton_reaction");
  const auto& rule = triangle_quadrature(5);
  const std::size_t nt = space.mesh().num_triangles();
  const std::size_t n = space.num_scalar_dofs();
  const auto& coeffs = a.coefficients();
  std::vector<Triplet> triplets;
  triplets.reserve(144 * nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& geo = space.geometry(t);
    const auto dofs = space.element_dofs(t);
    // local[c][d][i][j]: test component c / dof i, trial component d / dof j.
    double local[2][2][6][6] = {};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wq = 2.0 * geo.area * rule.weights[q];
      const auto phi = p2_values(rule.points[q]);
      const auto grad = p2_gradients(rule.points[q], geo);
      const LocalVelocity av = local_velocity(coeffs, n, dofs, phi, grad);
      const double a_c[2] = {av.value.x, av.value.y};
      // d_d a_c
      const double da[2][2] = {{av.grad_x.x, av.grad_x.y}, {av.grad_y.x, av.grad_y.y}};
      for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
          for (int j = 0; j < 6; ++j) {
            const double dphi_j = d == 0 ? grad[j].x : grad[j].y;
            const double trial = phi[j] * da[c][d] + 0.5 * dphi_j * a_c[c];
            for (int i = 0; i < 6; ++i) local[c][d][i][j] += wq * trial * phi[i];
          }
        }
      }
    }
    for (int c = 0; c < 2; ++c) {
      for (int d = 0; d < 2; ++d) {
        for (int i = 0; i < 6; ++i) {
          for (int j = 0; j < 6; ++j) {
            triplets.push_back({c * static_cast<int>(n) + dofs[i], d * static_cast<int>(n) + dofs[j],
                                local[c][d][i][j]});
          }
        }
      }
    }
  }
  return SparseMatrix::from_triplets(2 * n, 2 * n, std::move(triplets));
}

double eval_trilinear(const FEField& v, const FEField& w, const FEField& z) {
  const MixedSpace& space = v.space();
  if (w.space().mesh_ptr() != space.mesh_ptr() || z.space().mesh_ptr() != space.mesh_ptr()) {
    throw std::invalid_argument("eval_trilinear: fields live on different spaces");
  }
  const auto& rule = triangle_quadrature(6);
  double total = 0.0;
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    const double area = space.geometry(t).area;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& b = rule.points[q];
      const Vec2 vv = v.velocity_at(t, b);
      const Vec2 zz = z.velocity_at(t, b);
      const Vec2 ww = w.velocity_at(t, b);
      const Vec2 gwx = w.velocity_gradient_row(0, t, b);
      const Vec2 gwy = w.velocity_gradient_row(1, t, b);
      const double conv_x = vv.x * gwx.x + vv.y * gwx.y;
      const double conv_y = vv.x * gwy.x + vv.y * gwy.y;
      const double div_v = v.divergence_at(t, b);
      const double value = conv_x * zz.x + conv_y * zz.y + 0.5 * div_v * (ww.x * zz.x + ww.y * zz.y);
      total += 2.0 * area * rule.weights[q] * value;
    }
  }
  return total;
}

std::vector<double> assemble_source(const MixedSpace& space, const VectorFunction& f) {
  const auto& rule = triangle_quadrature(6);
  const std::size_t n = space.num_scalar_dofs();
  std::vector<double> load(2 * n, 0.0);
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto& geo = space.geometry(t);
    const auto dofs = space.element_dofs(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double wq = 2.0 * geo.area * rule.weights[q];
      const Vec2 p = geo.map(rule.points[q]);
      const Vec2 fv = f(p.x, p.y);
      const auto phi = p2_values(rule.points[q]);
      for (int a = 0; a < 6; ++a) {
        load[dofs[a]] += wq * fv.x * phi[a];
        load[n + dofs[a]] += wq * fv.y * phi[a];
      }
    }
  }
  return load;
}

std::vector<double> assemble_scalar_source(const MixedSpace& space, const ScalarFunction& f) {
  const auto full = assemble_source(space, [&](double x, double y) { return Vec2{f(x, y), 0.0}; });
  return {full.begin(), full.begin() + static_cast<std::ptrdiff_t>(space.num_scalar_dofs())};
}

std::vector<double> pressure_mean_weights(const MixedSpace& space) {
  std::vector<double> m(space.num_pressure_dofs());
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    const double w = space.geometry(t).area / 3.0;
    m[3 * t] = m[3 * t + 1] = m[3 * t + 2] = w;
  }
  return m;
}

BCData::BCData(std::shared_ptr<const MixedSpace> space) : space_(std::move(space)) {
  if (!space_) throw std::invalid_argument("BCData: null space");
  lifting_.assign(space_->num_velocity_dofs(), 0.0);
}

void BCData::finalize(const std::vector<char>& is_constrained) {
  constrained_.clear();
  free_.clear();
  for (std::size_t i = 0; i < is_constrained.size(); ++i) {
    (is_constrained[i] ? constrained_ : free_).push_back(static_cast<int>(i));
  }
}

BCData BCData::homogeneous(std::shared_ptr<const MixedSpace> space) {
  return from_tags(std::move(space), {});
}

BCData BCData::from_function(std::shared_ptr<const MixedSpace> space, const VectorFunction& g) {
  return from_tags(std::move(space), {g, g, g, g});
}

BCData BCData::from_tags(std::shared_ptr<const MixedSpace> space, const std::array<VectorFunction, 4>& per_tag) {
  BCData bc(std::move(space));
  const MixedSpace& s = *bc.space_;
  const std::size_t n = s.num_scalar_dofs();
  std::vector<char> is_constrained(2 * n, 0);
  for (BoundaryTag tag : {BoundaryTag::Bottom, BoundaryTag::Right, BoundaryTag::Left, BoundaryTag::Top}) {
    const auto& g = per_tag[static_cast<int>(tag)];
    for (int dof : s.boundary_scalar_dofs(tag)) {
      Vec2 value;
      if (g) {
        const Vec2 p = s.dof_point(dof);
        value = g(p.x, p.y);
      }
      bc.lifting_[dof] = value.x;
      bc.lifting_[n + dof] = value.y;
      is_constrained[dof] = is_constrained[n + dof] = 1;
    }
  }
  bc.finalize(is_constrained);
  return bc;
}

bool BCData::is_homogeneous() const {
  return std::all_of(lifting_.begin(), lifting_.end(), [](double v) { return v == 0.0; });
}

std::vector<double> BCData::reconstruct(std::span<const double> free_values) const {
  if (free_values.size() != free_.size()) throw std::invalid_argument("BCData::reconstruct: size mismatch");
  std::vector<double> full = lifting_;
  for (std::size_t i = 0; i < free_.size(); ++i) full[free_[i]] = free_values[i];
  return full;
}

std::vector<double> BCData::restrict_free(std::span<const double> full) const {
  if (full.size() != lifting_.size()) throw std::invalid_argument("BCData::restrict_free: size mismatch");
  std::vector<double> out(free_.size());
  for (std::size_t i = 0; i < free_.size(); ++i) out[i] = full[free_[i]];
  return out;
}

void BCData::impose(std::span<double> full) const {
  if (full.size() != lifting_.size()) throw std::invalid_argument("BCData::impose: size mismatch");
  for (int i : constrained_) full[i] = lifting_[i];
}

SaddleSystem apply_dirichlet(const SparseMatrix& l, const SparseMatrix& b, std::span<const double> f,
                             const BCData& bc, std::span<const double> mean_weights) {
  const std::size_t nu = bc.lifting().size();
  if (l.rows() != nu || l.cols() != nu || b.cols() != nu || f.size() != nu || mean_weights.size() != b.rows()) {
    throw std::invalid_argument("apply_dirichlet: dimension mismatch");
  }
  std::vector<int> all_p(b.rows());
  for (std::size_t i = 0; i < all_p.size(); ++i) all_p[i] = static_cast<int>(i);
  const auto& fr = bc.free();
  const auto& cn = bc.constrained();

  std::vector<double> uc(cn.size());
  for (std::size_t i = 0; i < cn.size(); ++i) uc[i] = bc.lifting()[cn[i]];

  SaddleSystem sys;
  sys.a = l.submatrix(fr, fr);
  sys.b = b.submatrix(all_p, fr);
  sys.g.resize(fr.size());
  for (std::size_t i = 0; i < fr.size(); ++i) sys.g[i] = f[fr[i]];
  sys.h.assign(b.rows(), 0.0);
  if (!bc.is_homogeneous()) {
    const std::vector<double> lu = l.submatrix(fr, cn).multiply(uc);
    for (std::size_t i = 0; i < fr.size(); ++i) sys.g[i] -= lu[i];
    const std::vector<double> bu = b.submatrix(all_p, cn).multiply(uc);
    for (std::size_t i = 0; i < bu.size(); ++i) sys.h[i] = -bu[i];
  }
  sys.mean_weights.assign(mean_weights.begin(), mean_weights.end());
  return sys;
}

}  // namespace nsfem
