#include "nsfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <utility>

namespace nsfem {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Bottom: return "bottom";
    case BoundaryTag::Right: return "right";
    case BoundaryTag::Top: return "top";
    case BoundaryTag::Left: return "left";
  }
  return "unknown";
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
           std::vector<BoundaryEdge> boundary_edges, bool barycenter_refined)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)),
      barycenter_refined_(barycenter_refined) {
  const auto nv = static_cast<int>(vertices_.size());
  auto in_range = [nv](int v) { return v >= 0 && v < nv; };
  for (const auto& tri : triangles_) {
    for (int v : tri) {
      if (!in_range(v)) throw std::invalid_argument("mesh: triangle vertex index out of range");
    }
  }
  for (const auto& be : boundary_edges_) {
    if (!in_range(be.a) || !in_range(be.b)) {
      throw std::invalid_argument("mesh: boundary edge vertex index out of range");
    }
  }

  auto& index = edge_index_;
  index.reserve(triangles_.size() * 2);
  triangle_edges_.resize(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i];
      const int b = tri[(i + 1) % 3];
      auto [it, inserted] = index.try_emplace(edge_key(a, b), static_cast<int>(edges_.size()));
      if (inserted) {
        Edge e;
        e.v0 = std::min(a, b);
        e.v1 = std::max(a, b);
        edges_.push_back(e);
      }
      Edge& e = edges_[it->second];
      if (e.incidence < 2) e.triangles[e.incidence] = static_cast<int>(t);
      ++e.incidence;
      triangle_edges_[t][i] = it->second;
    }
  }
}

double Mesh::signed_area(std::size_t t) const {
  const auto& tri = triangles_.at(t);
  const Vec2& a = vertices_[tri[0]];
  const Vec2& b = vertices_[tri[1]];
  const Vec2& c = vertices_[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Vec2 Mesh::barycenter(std::size_t t) const {
  const auto& tri = triangles_.at(t);
  const Vec2& a = vertices_[tri[0]];
  const Vec2& b = vertices_[tri[1]];
  const Vec2& c = vertices_[tri[2]];
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

int Mesh::find_edge(int a, int b) const {
  const auto it = edge_index_.find(edge_key(a, b));
  return it == edge_index_.end() ? -1 : it->second;
}

Mesh uniform_square_mesh(int n) {
  if (n < 1) throw std::invalid_argument("uniform_square_mesh: n must be >= 1");
  const int np = n + 1;
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(np) * np);
  const double h = 1.0 / n;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      // Pin the far edge to exactly 1.0.
      vertices.push_back({i == n ? 1.0 : i * h, j == n ? 1.0 : j * h});
    }
  }
  auto id = [np](int i, int j) { return j * np + i; };

  std::vector<Triangle> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  }

  std::vector<BoundaryEdge> boundary;
  boundary.reserve(4 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) boundary.push_back({id(i, 0), id(i + 1, 0), BoundaryTag::Bottom});
  for (int j = 0; j < n; ++j) boundary.push_back({id(n, j), id(n, j + 1), BoundaryTag::Right});
  for (int i = n; i > 0; --i) boundary.push_back({id(i, n), id(i - 1, n), BoundaryTag::Top});
  for (int j = n; j > 0; --j) boundary.push_back({id(0, j), id(0, j - 1), BoundaryTag::Left});

  return Mesh(std::move(vertices), std::move(triangles), std::move(boundary), false);
}

Mesh barycenter_refine(const Mesh& mesh) {
  std::vector<Vec2> vertices = mesh.vertices();
  const std::size_t nv = vertices.size();
  std::vector<Triangle> triangles;
  triangles.reserve(3 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    vertices.push_back(mesh.barycenter(t));
    const int c = static_cast<int>(nv + t);
    triangles.push_back({tri[0], tri[1], c});
    triangles.push_back({tri[1], tri[2], c});
    triangles.push_back({tri[2], tri[0], c});
  }
  return Mesh(std::move(vertices), std::move(triangles), mesh.boundary_edges(), true);
}

bool MeshReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const MeshCheck& c) { return c.passed; });
}

const MeshCheck* MeshReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

MeshReport validate_mesh(const Mesh& mesh) {
  MeshReport report;

  MeshCheck orientation{"orientation", true, {}};
  double total_area = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double a = mesh.signed_area(t);
    total_area += a;
    if (!(a > 0.0)) orientation.offenders.push_back(t);
  }
  orientation.passed = orientation.offenders.empty();
  report.checks.push_back(orientation);

  // Boundary edges listed by the mesh, keyed by unordered vertex pair.
  std::map<std::pair<int, int>, std::size_t> listed;
  for (std::size_t i = 0; i < mesh.boundary_edges().size(); ++i) {
    const auto& be = mesh.boundary_edges()[i];
    listed[{std::min(be.a, be.b), std::max(be.a, be.b)}] = i;
  }

  MeshCheck manifold{"manifold", true, {}};
  std::size_t incidence_one = 0;
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edges()[e];
    const bool is_listed = listed.count({edge.v0, edge.v1}) > 0;
    if (edge.incidence == 1) ++incidence_one;
    const bool ok = (edge.incidence == 2 && !is_listed) || (edge.incidence == 1 && is_listed);
    if (!ok) manifold.offenders.push_back(e);
  }
  // Listed boundary edges that no triangle uses are dangling.
  for (const auto& [key, i] : listed) {
    if (mesh.find_edge(key.first, key.second) < 0) manifold.offenders.push_back(mesh.num_edges() + i);
  }
  manifold.passed = manifold.offenders.empty() && incidence_one == listed.size();
  report.checks.push_back(manifold);

  MeshCheck tags{"boundary_tags", true, {}};
  for (std::size_t i = 0; i < mesh.boundary_edges().size(); ++i) {
    const auto& be = mesh.boundary_edges()[i];
    const Vec2& a = mesh.vertices()[be.a];
    const Vec2& b = mesh.vertices()[be.b];
    double expect = 0.0;
    double ca = 0.0, cb = 0.0;
    switch (be.tag) {
      case BoundaryTag::Bottom: ca = a.y; cb = b.y; expect = 0.0; break;
      case BoundaryTag::Top: ca = a.y; cb = b.y; expect = 1.0; break;
      case BoundaryTag::Left: ca = a.x; cb = b.x; expect = 0.0; break;
      case BoundaryTag::Right: ca = a.x; cb = b.x; expect = 1.0; break;
    }
    if (std::abs(ca - expect) > 1e-14 || std::abs(cb - expect) > 1e-14) tags.offenders.push_back(i);
  }
  tags.passed = tags.offenders.empty();
  report.checks.push_back(tags);

  MeshCheck area{"area", std::abs(total_area - 1.0) <= 1e-12, {}};
  report.checks.push_back(area);

  const auto V = static_cast<long long>(mesh.num_vertices());
  const auto E = static_cast<long long>(mesh.num_edges());
  const auto T = static_cast<long long>(mesh.num_triangles());
  MeshCheck euler{"euler", V - E + T == 1, {}};
  report.checks.push_back(euler);

  return report;
}

void write_mesh_ascii(const Mesh& mesh, std::ostream& out) {
  out << "vertices " << mesh.num_vertices() << " triangles " << mesh.num_triangles() << '\n';
  char buf[64];
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
    out << buf;
  }
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace nsfem
