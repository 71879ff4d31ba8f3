#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "eigshape/mesh.hpp"

namespace eigshape {

enum class BoundaryCondition { Dirichlet, Neumann };

inline std::string_view to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

inline BoundaryCondition parse_bc(std::string_view s) {
  if (s == "dirichlet" || s == "D") return BoundaryCondition::Dirichlet;
  if (s == "neumann" || s == "N") return BoundaryCondition::Neumann;
  throw std::invalid_argument("unknown boundary condition '" + std::string(s) + "'");
}

/// Symmetric sparse matrix; both triangles are stored and mirrored
/// entries are bitwise equal.
using SparseSymMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Continuous P1 space on a mesh. Dirichlet eliminates boundary vertices.
class FemSpace {
 public:
  FemSpace(std::shared_ptr<const Mesh> mesh, BoundaryCondition bc)
      : mesh_(std::move(mesh)), bc_(bc) {
    if (!mesh_) throw std::invalid_argument("FemSpace: null mesh");
    dof_of_vertex_.assign(mesh_->vertex_count(), -1);
    for (std::size_t v = 0; v < mesh_->vertex_count(); ++v) {
      if (bc_ == BoundaryCondition::Dirichlet && mesh_->is_boundary_vertex(static_cast<int>(v)))
        continue;
      dof_of_vertex_[v] = static_cast<int>(vertex_of_dof_.size());
      vertex_of_dof_.push_back(static_cast<int>(v));
    }
  }

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  BoundaryCondition bc() const { return bc_; }
  int dof_count() const { return static_cast<int>(vertex_of_dof_.size()); }
  /// -1 for constrained vertices.
  int dof(int vertex) const { return dof_of_vertex_[vertex]; }
  int vertex(int dof) const { return vertex_of_dof_[dof]; }

  /// Expand dof coefficients to one value per vertex (constrained = 0).
  Vector nodal_values(const Vector& coeffs) const {
    if (coeffs.size() != dof_count())
      throw std::invalid_argument("nodal_values: coefficient vector has wrong size");
    Vector out = Vector::Zero(static_cast<Eigen::Index>(mesh_->vertex_count()));
    for (int d = 0; d < dof_count(); ++d) out[vertex_of_dof_[d]] = coeffs[d];
    return out;
  }

  /// Nodal interpolant of f restricted to the free dofs.
  template <class F>
  Vector interpolate(F&& f) const {
    Vector c(dof_count());
    for (int d = 0; d < dof_count(); ++d) c[d] = f(mesh_->vertices()[vertex_of_dof_[d]]);
    return c;
  }

 private:
  std::shared_ptr<const Mesh> mesh_;
  BoundaryCondition bc_;
  std::vector<int> dof_of_vertex_;
  std::vector<int> vertex_of_dof_;
};

/// Gradients of the three barycentric functions of triangle t.
inline std::array<Vec2, 3> barycentric_gradients(const Mesh& m, std::size_t t) {
  const auto& tri = m.triangles()[t];
  const Vec2& p0 = m.vertices()[tri[0]];
  const Vec2& p1 = m.vertices()[tri[1]];
  const Vec2& p2 = m.vertices()[tri[2]];
  const double two_area = 2.0 * m.area(t);
  const auto perp = [two_area](const Vec2& e) -> Vec2 { return Vec2(-e.y(), e.x()) / two_area; };
  // grad phi_i is the inward edge normal opposite vertex i, scaled by 1/(2T)
  return {perp(p2 - p1), perp(p0 - p2), perp(p1 - p0)};
}

/// Local P1 stiffness: area * grad phi_i . grad phi_j.
inline Eigen::Matrix3d local_stiffness(const Mesh& m, std::size_t t) {
  const auto g = barycentric_gradients(m, t);
  const double area = m.area(t);
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) k(i, j) = k(j, i) = area * g[i].dot(g[j]);
  return k;
}

/// Local P1 mass: (area / 12) [[2,1,1],[1,2,1],[1,1,2]].
inline Eigen::Matrix3d local_mass(const Mesh& m, std::size_t t) {
  const double a = m.area(t) / 12.0;
  Eigen::Matrix3d k;
  k << 2 * a, a, a, a, 2 * a, a, a, a, 2 * a;
  return k;
}

namespace detail {

template <class Local>
SparseSymMatrix assemble(const FemSpace& space, Local local) {
  const Mesh& m = space.mesh();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * m.triangle_count());
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    const Eigen::Matrix3d k = local(m, t);
    const auto& tri = m.triangles()[t];
    for (int i = 0; i < 3; ++i) {
      const int di = space.dof(tri[i]);
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = space.dof(tri[j]);
        if (dj < 0) continue;
        trip.emplace_back(di, dj, k(i, j));
      }
    }
  }
  SparseSymMatrix a(space.dof_count(), space.dof_count());
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  return a;
}

}  // namespace detail

inline SparseSymMatrix assemble_stiffness(const FemSpace& space) {
  return detail::assemble(space, local_stiffness);
}

inline SparseSymMatrix assemble_mass(const FemSpace& space) {
  return detail::assemble(space, local_mass);
}

/// Constant gradient of the P1 function on triangle t, from nodal values.
inline Vec2 element_gradient_nodal(const Mesh& m, const Vector& nodal, std::size_t t) {
  const auto g = barycentric_gradients(m, t);
  const auto& tri = m.triangles()[t];
  return nodal[tri[0]] * g[0] + nodal[tri[1]] * g[1] + nodal[tri[2]] * g[2];
}

/// Constant gradient of the P1 function with dof coefficients `coeffs` on
/// triangle t; constrained vertices contribute zero.
inline Vec2 element_gradient(const FemSpace& space, const Vector& coeffs, std::size_t triangle) {
  if (coeffs.size() != space.dof_count())
    throw std::invalid_argument("element_gradient: coefficient vector has wrong size");
  const Mesh& m = space.mesh();
  const auto g = barycentric_gradients(m, triangle);
  const auto& tri = m.triangles()[triangle];
  Vec2 out = Vec2::Zero();
  for (int i = 0; i < 3; ++i) {
    const int d = space.dof(tri[i]);
    if (d >= 0) out += coeffs[d] * g[i];
  }
  return out;
}

}  // namespace eigshape
