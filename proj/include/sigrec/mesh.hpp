#ifndef SIGREC_MESH_HPP
#define SIGREC_MESH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigrec/core.hpp"
#include "sigrec/quadrature.hpp"

namespace sigrec {

// Boundary side markers for the unit square.
enum class BoundaryTag : int { interior = -1, bottom = 0, right = 1, top = 2, left = 3 };

struct Triangle {
  std::array<int, 3> v;  // vertex indices, counterclockwise
};

// Interior edges carry both incident triangles; the stored normal is unit
// length and points away from `left` (left lies on the -n side). Boundary
// edges have right = -1 and an outward normal.
struct Edge {
  int v0, v1;
  int left, right;
  Vec2 normal;
  double length;
  BoundaryTag tag;
  bool is_boundary() const { return right < 0; }
};

class Mesh {
public:
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<Edge> edges;
  double h = 0.0;  // max triangle diameter

  int n_subdivisions = 0;  // structured n (0 if not structured)

  std::size_t n_triangles() const { return triangles.size(); }

  Vec2 vertex(int i) const { return vertices[i]; }

  Vec2 centroid(int t) const {
    const auto& tri = triangles[t];
    Vec2 c{0.0, 0.0};
    for (int i = 0; i < 3; ++i) c = c + vertices[tri.v[i]];
    return (1.0 / 3.0) * c;
  }

  double area(int t) const {
    const auto& tri = triangles[t];
    const Vec2 a = vertices[tri.v[0]], b = vertices[tri.v[1]], c = vertices[tri.v[2]];
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
  }

  // affine map x = v0 + J * ref
  struct AffineMap {
    Vec2 v0;
    double J[2][2];
    double Jinv[2][2];
    double detJ;
    Vec2 to_physical(const Vec2& r) const {
      return {v0[0] + J[0][0] * r[0] + J[0][1] * r[1], v0[1] + J[1][0] * r[0] + J[1][1] * r[1]};
    }
    Vec2 to_reference(const Vec2& x) const {
      const double dx = x[0] - v0[0], dy = x[1] - v0[1];
      return {Jinv[0][0] * dx + Jinv[0][1] * dy, Jinv[1][0] * dx + Jinv[1][1] * dy};
    }
    // physical gradient from a reference gradient: J^{-T} g
    Vec2 push_gradient(const Vec2& g) const {
      return {Jinv[0][0] * g[0] + Jinv[1][0] * g[1], Jinv[0][1] * g[0] + Jinv[1][1] * g[1]};
    }
  };

  const AffineMap& map(int t) const { return maps_[t]; }

  // Element containing x. `hint` (when given) nudges ties toward the element
  // on that side, which is how one-sided traces on shared edges are selected.
  int locate(Vec2 x, const Vec2* hint = nullptr) const {
    if (n_subdivisions <= 0) throw std::logic_error("locate: mesh is not structured");
    if (hint) x = x + 1e-9 * (*hint - x);
    const int n = n_subdivisions;
    const int ci = std::clamp(static_cast<int>(std::floor(x[0] * n)), 0, n - 1);
    const int cj = std::clamp(static_cast<int>(std::floor(x[1] * n)), 0, n - 1);
    const double xi = x[0] * n - ci, ps = x[1] * n - cj;
    return 2 * (cj * n + ci) + (ps <= xi ? 0 : 1);
  }

  void finalize() {
    build_edges();
    build_maps();
    compute_h();
  }

private:
  std::vector<AffineMap> maps_;

  void build_edges() {
    edges.clear();
    std::map<std::pair<int, int>, int> seen;
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
      const auto& tri = triangles[t];
      for (int e = 0; e < 3; ++e) {
        const int a = tri.v[e], b = tri.v[(e + 1) % 3];
        const auto key = std::minmax(a, b);
        auto it = seen.find(key);
        if (it == seen.end()) {
          seen.emplace(key, static_cast<int>(edges.size()));
          edges.push_back(Edge{a, b, t, -1, {0, 0}, 0.0, BoundaryTag::interior});
        } else {
          edges[it->second].right = t;
        }
      }
    }
    for (auto& e : edges) {
      const Vec2 a = vertices[e.v0], b = vertices[e.v1];
      const Vec2 tvec = b - a;
      e.length = norm(tvec);
      Vec2 n{tvec[1] / e.length, -tvec[0] / e.length};
      const Vec2 mid = 0.5 * (a + b);
      Vec2 cl{0, 0};
      for (int i = 0; i < 3; ++i) cl = cl + vertices[triangles[e.left].v[i]];
      cl = (1.0 / 3.0) * cl;
      if (dot(n, cl - mid) > 0) n = {-n[0], -n[1]};
      e.normal = n;
      if (e.is_boundary()) e.tag = side_of(a, b);
    }
  }

  BoundaryTag side_of(const Vec2& a, const Vec2& b) const {
    const double tol = 1e-12;
    if (std::abs(a[1]) < tol && std::abs(b[1]) < tol) return BoundaryTag::bottom;
    if (std::abs(a[0] - 1) < tol && std::abs(b[0] - 1) < tol) return BoundaryTag::right;
    if (std::abs(a[1] - 1) < tol && std::abs(b[1] - 1) < tol) return BoundaryTag::top;
    if (std::abs(a[0]) < tol && std::abs(b[0]) < tol) return BoundaryTag::left;
    return BoundaryTag::interior;  // boundary edge of a non-square domain
  }

  void build_maps() {
    maps_.resize(triangles.size());
    for (std::size_t t = 0; t < triangles.size(); ++t) {
      const auto& tri = triangles[t];
      AffineMap& m = maps_[t];
      m.v0 = vertices[tri.v[0]];
      const Vec2 e1 = vertices[tri.v[1]] - m.v0, e2 = vertices[tri.v[2]] - m.v0;
      m.J[0][0] = e1[0];
      m.J[1][0] = e1[1];
      m.J[0][1] = e2[0];
      m.J[1][1] = e2[1];
      m.detJ = e1[0] * e2[1] - e1[1] * e2[0];
      m.Jinv[0][0] = m.J[1][1] / m.detJ;
      m.Jinv[0][1] = -m.J[0][1] / m.detJ;
      m.Jinv[1][0] = -m.J[1][0] / m.detJ;
      m.Jinv[1][1] = m.J[0][0] / m.detJ;
    }
  }

  void compute_h() {
    h = 0.0;
    for (const auto& tri : triangles)
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          h = std::max(h, norm(vertices[tri.v[i]] - vertices[tri.v[j]]));
  }
};

// Uniform n x n cells on [0,1]^2, each split along the diagonal from
// (i/n, j/n) to ((i+1)/n, (j+1)/n); 2n^2 triangles, h = sqrt(2)/n.
inline Mesh build_structured_mesh(int n) {
  if (n < 1) throw std::invalid_argument("build_structured_mesh: n must be >= 1");
  Mesh mesh;
  mesh.n_subdivisions = n;
  const int N = n + 1;
  mesh.vertices.reserve(static_cast<std::size_t>(N) * N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
  mesh.triangles.reserve(2u * n * n);
  for (int cj = 0; cj < n; ++cj) {
    for (int ci = 0; ci < n; ++ci) {
      const int v00 = cj * N + ci, v10 = v00 + 1, v01 = v00 + N, v11 = v01 + 1;
      mesh.triangles.push_back({{v00, v10, v11}});  // lower
      mesh.triangles.push_back({{v00, v11, v01}});  // upper
    }
  }
  mesh.finalize();
  return mesh;
}

enum class EdgeFlow { inflow, outflow, characteristic };

struct BoundaryClassification {
  std::vector<int> boundary_edges;   // edge indices into mesh.edges
  std::vector<EdgeFlow> labels;      // parallel to boundary_edges
  double separation_distance = 0.0;  // min distance between inflow and outflow sets
  double inflow_measure = 0.0;
  double outflow_measure = 0.0;
};

namespace detail {
// min distance between two segments (0 if they intersect or touch)
inline double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
  return norm(p - (a + t * ab));
}
inline double segment_segment_dist(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  double m = point_segment_dist(a, c, d);
  m = std::min(m, point_segment_dist(b, c, d));
  m = std::min(m, point_segment_dist(c, a, b));
  m = std::min(m, point_segment_dist(d, a, b));
  return m;
}
}  // namespace detail

// Labels each boundary edge by the sign of int_e beta.n ds against a
// roundoff-scaled tolerance; degenerate beta yields all-characteristic.
template <typename BetaFn>
BoundaryClassification classify_boundary(const Mesh& mesh, BetaFn&& beta, int quad_degree = 8) {
  const QuadratureRule rule = edge_quadrature(quad_degree);
  BoundaryClassification out;
  for (int e = 0; e < static_cast<int>(mesh.edges.size()); ++e) {
    const Edge& edge = mesh.edges[e];
    if (!edge.is_boundary()) continue;
    const Vec2 a = mesh.vertices[edge.v0], b = mesh.vertices[edge.v1];
    double flux = 0.0, bmax = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Vec2 x = a + rule.points[q][0] * (b - a);
      const Vec2 bv = beta(x);
      flux += rule.weights[q] * edge.length * dot(bv, edge.normal);
      bmax = std::max(bmax, norm(bv));
    }
    const double tol = 1e-12 * edge.length * bmax;
    EdgeFlow label = EdgeFlow::characteristic;
    if (flux < -tol) label = EdgeFlow::inflow;
    else if (flux > tol) label = EdgeFlow::outflow;
    out.boundary_edges.push_back(e);
    out.labels.push_back(label);
    if (label == EdgeFlow::inflow) out.inflow_measure += edge.length;
    if (label == EdgeFlow::outflow) out.outflow_measure += edge.length;
  }
  // min distance between the inflow and outflow edge point sets
  double sep = std::numeric_limits<double>::infinity();
  bool have_pair = false;
  for (std::size_t i = 0; i < out.boundary_edges.size(); ++i) {
    if (out.labels[i] != EdgeFlow::inflow) continue;
    const Edge& ei = mesh.edges[out.boundary_edges[i]];
    for (std::size_t j = 0; j < out.boundary_edges.size(); ++j) {
      if (out.labels[j] != EdgeFlow::outflow) continue;
      const Edge& ej = mesh.edges[out.boundary_edges[j]];
      have_pair = true;
      sep = std::min(sep, detail::segment_segment_dist(mesh.vertices[ei.v0], mesh.vertices[ei.v1],
                                                       mesh.vertices[ej.v0], mesh.vertices[ej.v1]));
    }
  }
  out.separation_distance = have_pair ? sep : 0.0;
  return out;
}

// Legacy ASCII VTK unstructured grid (triangle cell type 5), geometry only.
inline void write_mesh_vtk(const Mesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw data_error("write_mesh_vtk: cannot open " + path);
  os << "# vtk DataFile Version 3.0\nmesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.vertices.size() << " double\n";
  for (const auto& v : mesh.vertices) os << v[0] << " " << v[1] << " 0\n";
  os << "CELLS " << mesh.n_triangles() << " " << 4 * mesh.n_triangles() << "\n";
  for (const auto& t : mesh.triangles) os << "3 " << t.v[0] << " " << t.v[1] << " " << t.v[2] << "\n";
  os << "CELL_TYPES " << mesh.n_triangles() << "\n";
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) os << "5\n";
}

}  // namespace sigrec

#endif
