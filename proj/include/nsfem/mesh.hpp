#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace nsfem {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class BoundaryTag { Bottom = 0, Right = 1, Top = 2, Left = 3 };

inline constexpr std::array<BoundaryTag, 4> kAllBoundaryTags = {
    BoundaryTag::Bottom, BoundaryTag::Right, BoundaryTag::Top, BoundaryTag::Left};

const char* to_string(BoundaryTag tag);

using Triangle = std::array<int, 3>;

struct BoundaryEdge {
  int a = -1;
  int b = -1;
  BoundaryTag tag = BoundaryTag::Bottom;
};

/// Unique undirected edge; v0 < v1. `triangles[1] == -1` on the boundary.
struct Edge {
  int v0 = -1;
  int v1 = -1;
  std::array<int, 2> triangles = {-1, -1};
  int incidence = 0;
};

/// Immutable triangulation of the unit square.
///
/// Triangles are stored counterclockwise. The edge table is built once at
/// construction; `triangle_edges()[t][i]` is the global edge joining local
/// vertices i and (i+1)%3 of triangle t.
class Mesh {
 public:
  /// Builds the edge table from raw data. No validation beyond index range
  /// checks is done here; see validate_mesh().
  Mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
       std::vector<BoundaryEdge> boundary_edges, bool barycenter_refined = false);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  bool barycenter_refined() const { return barycenter_refined_; }

  double signed_area(std::size_t t) const;
  Vec2 barycenter(std::size_t t) const;

  /// Index of the edge {a, b}, or -1.
  int find_edge(int a, int b) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::unordered_map<std::uint64_t, int> edge_index_;
  bool barycenter_refined_ = false;
};

/// n x n grid of cells, each split along the lower-left to upper-right
/// diagonal. Vertices are numbered j*(n+1)+i for grid point (i, j).
Mesh uniform_square_mesh(int n);

/// Alfeld split: every triangle is replaced by the three triangles formed
/// with its barycenter. Barycenters are appended after the parent vertices
/// in triangle order; child c of parent t is triangle 3t+c.
Mesh barycenter_refine(const Mesh& mesh);

struct MeshCheck {
  std::string name;
  bool passed = true;
  std::vector<std::size_t> offenders;
};

struct MeshReport {
  std::vector<MeshCheck> checks;

  bool ok() const;
  const MeshCheck* find(const std::string& name) const;
};

/// Checks: "orientation", "manifold", "boundary_tags", "area", "euler".
MeshReport validate_mesh(const Mesh& mesh);

/// `vertices V triangles T`, then `x y` rows, then `i j k` rows.
void write_mesh_ascii(const Mesh& mesh, std::ostream& out);

}  // namespace nsfem
