#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "nsfem/mesh.hpp"

namespace nsfem {

using ScalarFunction = std::function<double(double, double)>;
using VectorFunction = std::function<Vec2(double, double)>;

/// Affine data of one triangle: vertices, area and the (constant)
/// gradients of the barycentric coordinates.
struct ElementGeometry {
  std::array<Vec2, 3> vertices;
  double area = 0.0;
  std::array<Vec2, 3> grad_lambda;

  Vec2 map(const std::array<double, 3>& bary) const;
};

ElementGeometry element_geometry(const Mesh& mesh, std::size_t t);

/// Quadratic Lagrange basis in barycentric form. Local order: vertices 0,1,2
/// then midpoints of edges (0,1), (1,2), (2,0).
std::array<double, 6> p2_values(const std::array<double, 3>& bary);
std::array<Vec2, 6> p2_gradients(const std::array<double, 3>& bary, const ElementGeometry& geo);

/// Scott-Vogelius pair: continuous P2 velocity, discontinuous P1 pressure.
///
/// Scalar P2 dofs are numbered vertices first, then edge midpoints in global
/// edge order. Velocity dof for (component c, scalar dof s) is c*N + s with
/// N the scalar dof count. Pressure dof i of triangle t is 3t + i, attached
/// to local vertex i.
class MixedSpace {
 public:
  explicit MixedSpace(std::shared_ptr<const Mesh> mesh);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }

  std::size_t num_scalar_dofs() const { return n_scalar_; }
  std::size_t num_velocity_dofs() const { return 2 * n_scalar_; }
  std::size_t num_pressure_dofs() const { return 3 * mesh_->num_triangles(); }

  /// Scott-Vogelius is only inf-sup stable on barycenter-refined meshes.
  bool inf_sup_safe() const { return mesh_->barycenter_refined(); }

  std::array<int, 6> element_dofs(std::size_t t) const;
  int velocity_dof(int component, int scalar_dof) const {
    return component * static_cast<int>(n_scalar_) + scalar_dof;
  }
  Vec2 dof_point(int scalar_dof) const { return dof_points_[scalar_dof]; }
  const ElementGeometry& geometry(std::size_t t) const { return geometry_[t]; }

  /// Scalar dofs on edges carrying `tag` (corners belong to two tags).
  const std::vector<int>& boundary_scalar_dofs(BoundaryTag tag) const {
    return boundary_by_tag_[static_cast<int>(tag)];
  }
  /// Sorted union over all tags.
  const std::vector<int>& boundary_scalar_dofs() const { return boundary_all_; }
  const std::vector<int>& interior_scalar_dofs() const { return interior_; }

  /// Triangle containing (x, y) and its barycentric coordinates; -1 if none.
  int locate(Vec2 p, std::array<double, 3>& bary) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::size_t n_scalar_ = 0;
  std::vector<Vec2> dof_points_;
  std::vector<ElementGeometry> geometry_;
  std::array<std::vector<int>, 4> boundary_by_tag_;
  std::vector<int> boundary_all_;
  std::vector<int> interior_;
};

enum class FieldKind { Velocity, Pressure };

/// Coefficient vector bound to a space.
class FEField {
 public:
  FEField(std::shared_ptr<const MixedSpace> space, FieldKind kind);
  FEField(std::shared_ptr<const MixedSpace> space, FieldKind kind, std::vector<double> coefficients);

  const MixedSpace& space() const { return *space_; }
  const std::shared_ptr<const MixedSpace>& space_ptr() const { return space_; }
  FieldKind kind() const { return kind_; }

  const std::vector<double>& coefficients() const { return coeffs_; }
  std::vector<double>& coefficients() { return coeffs_; }

  Vec2 velocity_at(std::size_t t, const std::array<double, 3>& bary) const;
  Vec2 velocity_gradient_row(int component, std::size_t t, const std::array<double, 3>& bary) const;
  double divergence_at(std::size_t t, const std::array<double, 3>& bary) const;
  double pressure_at(std::size_t t, const std::array<double, 3>& bary) const;

  /// Point evaluation (velocity fields), locating the containing triangle.
  Vec2 evaluate_velocity(Vec2 p) const;

 private:
  std::shared_ptr<const MixedSpace> space_;
  FieldKind kind_;
  std::vector<double> coeffs_;
};

FEField interpolate(std::shared_ptr<const MixedSpace> space, const VectorFunction& u);
FEField interpolate_pressure(std::shared_ptr<const MixedSpace> space, const ScalarFunction& p);
/// Scalar function placed into velocity component `component`, other component zero.
FEField interpolate_component(std::shared_ptr<const MixedSpace> space, int component,
                              const ScalarFunction& f);

double l2_norm(const FEField& field);
double h1_seminorm(const FEField& field);
double div_l2_norm(const FEField& velocity);

double l2_error(const FEField& velocity, const VectorFunction& exact);
double l2_error(const FEField& pressure, const ScalarFunction& exact, bool remove_mean);

/// Integral of the pressure field.
double pressure_mean(const FEField& pressure);

/// ||f||_{-1} realized on the discrete space: solve (grad phi, grad v) = (f, v)
/// over P2 with zero boundary values and return ||grad phi||. The load uses the
/// same degree-6 quadrature as assemble_source.
double discrete_hminus1_norm(const std::shared_ptr<const MixedSpace>& space, const VectorFunction& f);
double discrete_hminus1_norm(const std::shared_ptr<const MixedSpace>& space, const ScalarFunction& f);
/// Same for a discrete velocity-length load vector (f, v_i).
double discrete_hminus1_norm_of_load(const MixedSpace& space, std::span<const double> load);

/// Legacy ASCII VTK: P2 vertex values as point data, element-mean pressure
/// as cell data. Floats printed with %.9e.
void write_vtk(const FEField& velocity, const FEField& pressure, std::ostream& out);

}  // namespace nsfem
