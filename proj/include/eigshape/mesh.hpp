#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace eigshape {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class Domain { UnitSquare, UnitDisk, LShape };

inline std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::UnitSquare: return "square";
    case Domain::UnitDisk: return "disk";
    case Domain::LShape: return "lshape";
  }
  return "unknown";
}

inline Domain parse_domain(std::string_view s) {
  if (s == "square" || s == "unit_square") return Domain::UnitSquare;
  if (s == "disk" || s == "unit_disk") return Domain::UnitDisk;
  if (s == "lshape" || s == "l_shape" || s == "L") return Domain::LShape;
  throw std::invalid_argument("unknown domain '" + std::string(s) + "'");
}

/// Exact area of the continuous domain.
inline double domain_area(Domain d) {
  switch (d) {
    case Domain::UnitSquare: return 1.0;
    case Domain::UnitDisk: return std::numbers::pi;
    case Domain::LShape: return 3.0;
  }
  return 0.0;
}

/// Boundary facet. `v` is ordered counterclockwise as seen from the
/// adjacent triangle, so the domain lies to the left of v[0] -> v[1].
struct BoundaryEdge {
  std::array<int, 2> v;
  int triangle;
};

/// Conforming triangulation. Immutable once built.
class Mesh {
 public:
  Mesh(Domain domain, int level, std::vector<Vec2> vertices,
       std::vector<std::array<int, 3>> triangles)
      : domain_(domain),
        level_(level),
        vertices_(std::move(vertices)),
        triangles_(std::move(triangles)) {
    for (auto& t : triangles_) {
      if (signed_area(t) < 0.0) std::swap(t[1], t[2]);
    }
    build_edges();
  }

  Domain domain() const { return domain_; }
  int level() const { return level_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool is_boundary_vertex(int v) const { return on_boundary_[v] != 0; }

  double signed_area(const std::array<int, 3>& t) const {
    const Vec2 a = vertices_[t[1]] - vertices_[t[0]];
    const Vec2 b = vertices_[t[2]] - vertices_[t[0]];
    return 0.5 * (a.x() * b.y() - a.y() * b.x());
  }
  double area(std::size_t t) const { return signed_area(triangles_[t]); }

  /// Longest edge of triangle t.
  double diameter(std::size_t t) const {
    const auto& tri = triangles_[t];
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      d = std::max(d, (vertices_[tri[(i + 1) % 3]] - vertices_[tri[i]]).norm());
    return d;
  }

  /// Mesh size h = max_K diam(K).
  double h() const {
    double d = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) d = std::max(d, diameter(t));
    return d;
  }

  double min_diameter() const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < triangles_.size(); ++t) d = std::min(d, diameter(t));
    return d;
  }

  double total_area() const {
    double a = 0.0;
    for (std::size_t t = 0; t < triangles_.size(); ++t) a += area(t);
    return a;
  }

  double boundary_length() const {
    double len = 0.0;
    for (const auto& e : boundary_edges_)
      len += (vertices_[e.v[1]] - vertices_[e.v[0]]).norm();
    return len;
  }

  /// Index into boundary_edges() of the facet {a, b}, or -1.
  int find_boundary_edge(int a, int b) const {
    const auto it = boundary_lookup_.find(edge_key(a, b));
    return it == boundary_lookup_.end() ? -1 : it->second;
  }

  static std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  }

 private:
  void build_edges() {
    struct HalfEdge {
      std::uint64_t key;
      int a, b, tri;
    };
    std::vector<HalfEdge> half;
    half.reserve(3 * triangles_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      const auto& tri = triangles_[t];
      for (int i = 0; i < 3; ++i) {
        const int a = tri[i], b = tri[(i + 1) % 3];
        half.push_back({edge_key(a, b), a, b, static_cast<int>(t)});
      }
    }
    std::sort(half.begin(), half.end(), [](const HalfEdge& l, const HalfEdge& r) {
      return l.key != r.key ? l.key < r.key : l.tri < r.tri;
    });
    on_boundary_.assign(vertices_.size(), 0);
    std::vector<BoundaryEdge> found;
    edge_count_ = 0;
    for (std::size_t i = 0; i < half.size();) {
      std::size_t j = i;
      while (j < half.size() && half[j].key == half[i].key) ++j;
      if (j - i > 2) throw std::invalid_argument("Mesh: edge shared by more than two triangles");
      if (j - i == 1) found.push_back({{half[i].a, half[i].b}, half[i].tri});
      ++edge_count_;
      i = j;
    }
    // order facets by adjacent triangle for reproducible traversal
    std::sort(found.begin(), found.end(), [](const BoundaryEdge& l, const BoundaryEdge& r) {
      return l.triangle != r.triangle ? l.triangle < r.triangle : l.v < r.v;
    });
    boundary_edges_ = std::move(found);
    boundary_lookup_.clear();
    for (std::size_t e = 0; e < boundary_edges_.size(); ++e) {
      const auto& be = boundary_edges_[e];
      on_boundary_[be.v[0]] = 1;
      on_boundary_[be.v[1]] = 1;
      boundary_lookup_.emplace(edge_key(be.v[0], be.v[1]), static_cast<int>(e));
    }
  }

  Domain domain_;
  int level_;
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::unordered_map<std::uint64_t, int> boundary_lookup_;
  std::vector<char> on_boundary_;
  std::size_t edge_count_ = 0;
};

namespace detail {

// Uniform right-triangle grid on [x0, x0 + w] x [y0, y0 + w] with `cells`
// cells per side, every cell split along its lower-left to upper-right
// diagonal. `keep(i, j)` selects cells.
template <class Keep>
Mesh structured_grid(Domain domain, int level, double x0, double y0, double w, int cells,
                     Keep keep) {
  const int nv = cells + 1;
  std::vector<int> id(static_cast<std::size_t>(nv) * nv, -1);
  std::vector<Vec2> verts;
  std::vector<std::array<int, 3>> tris;
  const auto vertex = [&](int i, int j) {
    int& slot = id[static_cast<std::size_t>(j) * nv + i];
    if (slot < 0) {
      slot = static_cast<int>(verts.size());
      verts.emplace_back(x0 + w * i / cells, y0 + w * j / cells);
    }
    return slot;
  };
  // number vertices row by row first so indices do not depend on cell order
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nv; ++i) {
      const bool used = (i > 0 && j > 0 && keep(i - 1, j - 1)) ||
                        (i < cells && j > 0 && keep(i, j - 1)) ||
                        (i > 0 && j < cells && keep(i - 1, j)) ||
                        (i < cells && j < cells && keep(i, j));
      if (used) vertex(i, j);
    }
  for (int j = 0; j < cells; ++j)
    for (int i = 0; i < cells; ++i) {
      if (!keep(i, j)) continue;
      const int v00 = vertex(i, j), v10 = vertex(i + 1, j);
      const int v01 = vertex(i, j + 1), v11 = vertex(i + 1, j + 1);
      tris.push_back({v00, v10, v11});
      tris.push_back({v00, v11, v01});
    }
  return Mesh(domain, level, std::move(verts), std::move(tris));
}

}  // namespace detail

/// Quadrisect every triangle through its edge midpoints. On the disk,
/// midpoints of boundary facets are projected onto the unit circle.
inline Mesh refine(const Mesh& m) {
  std::vector<Vec2> verts = m.vertices();
  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(m.edge_count());
  const bool project = m.domain() == Domain::UnitDisk;
  const auto mid = [&](int a, int b) {
    const auto key = Mesh::edge_key(a, b);
    const auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec2 p = 0.5 * (m.vertices()[a] + m.vertices()[b]);
    if (project && m.find_boundary_edge(a, b) >= 0) p.normalize();
    const int idx = static_cast<int>(verts.size());
    verts.push_back(p);
    midpoint.emplace(key, idx);
    return idx;
  };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * m.triangle_count());
  for (const auto& t : m.triangles()) {
    const int m01 = mid(t[0], t[1]);
    const int m12 = mid(t[1], t[2]);
    const int m20 = mid(t[2], t[0]);
    tris.push_back({t[0], m01, m20});
    tris.push_back({m01, t[1], m12});
    tris.push_back({m20, m12, t[2]});
    tris.push_back({m01, m12, m20});
  }
  return Mesh(m.domain(), m.level() + 1, std::move(verts), std::move(tris));
}

/// Level-`level` mesh of one of the three study domains.
///
/// Square: n x n right-triangle grid with n = 2^(level+1), h = sqrt(2)/n.
/// L-shape: (-1,1)^2 minus the upper-right quarter, three unit squares at
/// the same resolution. Disk: fan of 8 triangles on an inscribed regular
/// octagon, refined `level` times with boundary projection.
inline Mesh generate(Domain domain, int level) {
  if (level < 0) throw std::invalid_argument("generate: level must be >= 0");
  if (level > 12) throw std::invalid_argument("generate: level too large");
  const int n = 1 << (level + 1);
  switch (domain) {
    case Domain::UnitSquare:
      return detail::structured_grid(domain, level, 0.0, 0.0, 1.0, n,
                                     [](int, int) { return true; });
    case Domain::LShape:
      return detail::structured_grid(domain, level, -1.0, -1.0, 2.0, 2 * n,
                                     [n](int i, int j) { return i < n || j < n; });
    case Domain::UnitDisk: {
      std::vector<Vec2> verts{Vec2(0.0, 0.0)};
      std::vector<std::array<int, 3>> tris;
      for (int k = 0; k < 8; ++k) {
        const double a = std::numbers::pi * k / 4.0;
        verts.emplace_back(std::cos(a), std::sin(a));
      }
      for (int k = 0; k < 8; ++k) tris.push_back({0, 1 + k, 1 + (k + 1) % 8});
      Mesh m(domain, 0, std::move(verts), std::move(tris));
      for (int l = 0; l < level; ++l) m = refine(m);
      return m;
    }
  }
  throw std::invalid_argument("generate: unknown domain");
}

/// Outward unit normal of boundary facet `edge` (index into boundary_edges()).
inline Vec2 boundary_normal(const Mesh& m, std::size_t edge) {
  if (edge >= m.boundary_edges().size())
    throw std::out_of_range("boundary_normal: edge index out of range");
  const auto& e = m.boundary_edges()[edge];
  const Vec2 d = m.vertices()[e.v[1]] - m.vertices()[e.v[0]];
  return Vec2(d.y(), -d.x()).normalized();
}

/// Outward unit normal of the facet joining vertices a and b.
inline Vec2 boundary_normal(const Mesh& m, int a, int b) {
  const int e = m.find_boundary_edge(a, b);
  if (e < 0) throw std::invalid_argument("boundary_normal: edge is not on the boundary");
  return boundary_normal(m, static_cast<std::size_t>(e));
}

/// Plain-text dump: "vertices N triangles M", coordinates, connectivity.
inline void write_mesh(std::ostream& os, const Mesh& m) {
  os << "vertices " << m.vertex_count() << " triangles " << m.triangle_count() << '\n';
  os.precision(17);
  for (const auto& v : m.vertices()) os << v.x() << ' ' << v.y() << '\n';
  for (const auto& t : m.triangles()) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace eigshape
