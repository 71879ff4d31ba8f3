#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "eigshape/eig.hpp"
#include "eigshape/fem.hpp"
#include "eigshape/quadrature.hpp"
#include "eigshape/velocity.hpp"

namespace eigshape {

enum class Formula { Volume, Boundary };

inline std::string_view to_string(Formula f) { return f == Formula::Volume ? "volume" : "boundary"; }

struct GradientSample {
  double value = 0.0;
  Formula formula = Formula::Volume;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  int field_index = -1;
};

/// l x l matrix of directional derivatives of a multiple eigenvalue and
/// its ascending eigenvalues.
struct DirectionalMatrix {
  Eigen::MatrixXd entries;
  Eigen::VectorXd sigma;
};

namespace detail {

inline int field_degree(std::span<const VelocityField> fields) {
  int d = 0;
  for (const auto& f : fields) d = std::max(d, f.degree());
  return d;
}

// Volume-form l x l matrices for every field at once:
//   m_ij = int -(DV + DV^T) g_i . g_j + div V (g_i . g_j - lambda u_i u_j).
// For l = 1 the first term is -2 g . DV g.
inline std::vector<Eigen::MatrixXd> volume_matrices(const FemSpace& space,
                                                    std::span<const Vector> basis,
                                                    double lambda,
                                                    std::span<const VelocityField> fields) {
  const Mesh& mesh = space.mesh();
  const int l = static_cast<int>(basis.size());
  const int deg = field_degree(fields);
  const TriangleRule rule = triangle_rule(std::max(6, deg + 2));
  std::vector<Vector> nodal;
  for (const auto& c : basis) nodal.push_back(space.nodal_values(c));

  std::vector<Eigen::MatrixXd> out(fields.size(), Eigen::MatrixXd::Zero(l, l));
  std::vector<Vec2> g(l);
  std::vector<double> u(l);
  Eigen::MatrixXd gg(l, l);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const auto bg = barycentric_gradients(mesh, t);
    for (int i = 0; i < l; ++i)
      g[i] = nodal[i][tri[0]] * bg[0] + nodal[i][tri[1]] * bg[1] + nodal[i][tri[2]] * bg[2];
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) gg(i, j) = g[i].dot(g[j]);
    const double area = mesh.area(t);
    const Vec2& p0 = mesh.vertices()[tri[0]];
    const Vec2& p1 = mesh.vertices()[tri[1]];
    const Vec2& p2 = mesh.vertices()[tri[2]];
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const auto& b = rule.points[q];
      const PowerTable pw(b[0] * p0 + b[1] * p1 + b[2] * p2, deg);
      const double w = rule.weights[q] * area;
      for (int i = 0; i < l; ++i)
        u[i] = b[0] * nodal[i][tri[0]] + b[1] * nodal[i][tri[1]] + b[2] * nodal[i][tri[2]];
      for (std::size_t f = 0; f < fields.size(); ++f) {
        const FieldValue fv = fields[f].eval(pw);
        auto& m = out[f];
        if (l == 1) {
          m(0, 0) += w * (-2.0 * g[0].dot(fv.DV * g[0]) + fv.div * (gg(0, 0) - lambda * u[0] * u[0]));
          continue;
        }
        const Mat2 sym = fv.DV + fv.DV.transpose();
        for (int i = 0; i < l; ++i)
          for (int j = i; j < l; ++j) {
            const double v =
                -g[i].dot(sym * g[j]) + fv.div * (gg(i, j) - lambda * u[i] * u[j]);
            m(i, j) += w * v;
          }
      }
    }
  }
  for (auto& m : out)
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < i; ++j) m(i, j) = m(j, i);
  return out;
}

// Boundary-form matrices. Dirichlet: -int dn u_i dn u_j V_n ds.
// Neumann: int (grad_G u_i . grad_G u_j - lambda u_i u_j) V_n ds.
// Traces come from the single triangle adjacent to each facet.
inline std::vector<Eigen::MatrixXd> boundary_matrices(const FemSpace& space,
                                                      std::span<const Vector> basis,
                                                      double lambda,
                                                      std::span<const VelocityField> fields) {
  const Mesh& mesh = space.mesh();
  const int l = static_cast<int>(basis.size());
  const bool dirichlet = space.bc() == BoundaryCondition::Dirichlet;
  const int deg = field_degree(fields);
  const LineRule rule = line_rule_for_degree(dirichlet ? deg : deg + 2);
  std::vector<Vector> nodal;
  for (const auto& c : basis) nodal.push_back(space.nodal_values(c));

  std::vector<Eigen::MatrixXd> out(fields.size(), Eigen::MatrixXd::Zero(l, l));
  std::vector<Vec2> g(l);
  std::vector<double> ua(l), ub(l), u(l);
  Eigen::MatrixXd coeff(l, l);
  for (std::size_t e = 0; e < mesh.boundary_edges().size(); ++e) {
    const auto& be = mesh.boundary_edges()[e];
    const Vec2 n = boundary_normal(mesh, e);
    const Vec2& a = mesh.vertices()[be.v[0]];
    const Vec2& b = mesh.vertices()[be.v[1]];
    const double len = (b - a).norm();
    for (int i = 0; i < l; ++i) {
      g[i] = element_gradient_nodal(mesh, nodal[i], static_cast<std::size_t>(be.triangle));
      ua[i] = nodal[i][be.v[0]];
      ub[i] = nodal[i][be.v[1]];
    }
    if (dirichlet) {
      for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) coeff(i, j) = -g[i].dot(n) * g[j].dot(n);
    } else {
      for (int i = 0; i < l; ++i) g[i] -= g[i].dot(n) * n;
    }
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = rule.nodes[q];
      const Vec2 x = (1.0 - s) * a + s * b;
      const PowerTable pw(x, deg);
      const double w = rule.weights[q] * len;
      if (!dirichlet) {
        for (int i = 0; i < l; ++i) u[i] = (1.0 - s) * ua[i] + s * ub[i];
        for (int i = 0; i < l; ++i)
          for (int j = 0; j < l; ++j) coeff(i, j) = g[i].dot(g[j]) - lambda * u[i] * u[j];
      }
      for (std::size_t f = 0; f < fields.size(); ++f) {
        const double vx = fields[f].component(0).eval(pw);
        const double vy = fields[f].component(1).eval(pw);
        const double vn = vx * n.x() + vy * n.y();
        out[f] += (w * vn) * coeff;
      }
    }
  }
  return out;
}

inline void require_bc(const FemSpace& space, BoundaryCondition bc, const char* who) {
  if (space.bc() != bc)
    throw std::invalid_argument(std::string(who) + ": wrong boundary condition for this formula");
}

}  // namespace detail

/// Discrete volume-form Eulerian derivative for every field of `fields`:
/// int [-2 grad u_h . DV grad u_h + div V (|grad u_h|^2 - lambda_h u_h^2)].
inline std::vector<double> volume_gradients(const FemSpace& space, const EigenPair& pair,
                                            std::span<const VelocityField> fields) {
  const Vector basis[1] = {pair.coeffs};
  const auto mats = detail::volume_matrices(space, basis, pair.lambda, fields);
  std::vector<double> out;
  for (const auto& m : mats) out.push_back(m(0, 0));
  return out;
}

inline double volume_gradient(const FemSpace& space, const EigenPair& pair,
                              const VelocityField& field) {
  return volume_gradients(space, pair, std::span<const VelocityField>(&field, 1)).front();
}

/// Discrete boundary-form derivative; the Dirichlet or Neumann variant is
/// chosen by the space's boundary condition.
inline std::vector<double> boundary_gradients(const FemSpace& space, const EigenPair& pair,
                                              std::span<const VelocityField> fields) {
  const Vector basis[1] = {pair.coeffs};
  const auto mats = detail::boundary_matrices(space, basis, pair.lambda, fields);
  std::vector<double> out;
  for (const auto& m : mats) out.push_back(m(0, 0));
  return out;
}

/// -sum_e (du_h/dn)_e^2 int_e V.n ds
inline double boundary_gradient_dirichlet(const FemSpace& space, const EigenPair& pair,
                                          const VelocityField& field) {
  detail::require_bc(space, BoundaryCondition::Dirichlet, "boundary_gradient_dirichlet");
  return boundary_gradients(space, pair, std::span<const VelocityField>(&field, 1)).front();
}

/// sum_e int_e (|grad_G u_h|^2 - lambda_h u_h^2) V.n ds
inline double boundary_gradient_neumann(const FemSpace& space, const EigenPair& pair,
                                        const VelocityField& field) {
  detail::require_bc(space, BoundaryCondition::Neumann, "boundary_gradient_neumann");
  if (pair.zero_mode)
    throw std::invalid_argument("boundary_gradient_neumann: constant mode has no derivative");
  return boundary_gradients(space, pair, std::span<const VelocityField>(&field, 1)).front();
}

inline GradientSample gradient_sample(const FemSpace& space, const EigenPair& pair,
                                      const VelocityField& field, Formula formula,
                                      int field_index = -1) {
  GradientSample s;
  s.formula = formula;
  s.bc = space.bc();
  s.field_index = field_index;
  s.value = formula == Formula::Volume ? volume_gradient(space, pair, field)
            : space.bc() == BoundaryCondition::Dirichlet
                ? boundary_gradient_dirichlet(space, pair, field)
                : boundary_gradient_neumann(space, pair, field);
  return s;
}

/// Symmetrize and diagonalize an l x l matrix.
inline DirectionalMatrix make_directional(Eigen::MatrixXd m) {
  DirectionalMatrix d;
  d.entries = 0.5 * (m + m.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.entries, Eigen::EigenvaluesOnly);
  d.sigma = es.eigenvalues();
  return d;
}

/// Directional-derivative matrix of a (possibly multiple) eigenvalue
/// cluster; lambda in the entries is the cluster-mean discrete eigenvalue.
inline DirectionalMatrix directional_matrix(const FemSpace& space, const EigenCluster& cluster,
                                            const VelocityField& field, Formula formula) {
  if (cluster.basis.empty()) throw std::invalid_argument("directional_matrix: empty cluster");
  const double lambda = cluster.mean_lambda();
  const std::span<const VelocityField> f(&field, 1);
  const auto mats = formula == Formula::Volume
                        ? detail::volume_matrices(space, cluster.basis, lambda, f)
                        : detail::boundary_matrices(space, cluster.basis, lambda, f);
  return make_directional(mats.front());
}

struct WeylBound {
  double max_eig_dev = 0.0;
  double bound = 0.0;
};

/// max_i |theta_i - theta_i^h| and sqrt(l) ||A - A^h||_inf for symmetric
/// l x l matrices; the first never exceeds the second.
inline WeylBound weyl_bound(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Ah) {
  if (A.rows() != A.cols() || Ah.rows() != Ah.cols() || A.rows() != Ah.rows())
    throw std::invalid_argument("weyl_bound: dimension mismatch");
  const auto l = A.rows();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A, Eigen::EigenvaluesOnly);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(Ah, Eigen::EigenvaluesOnly);
  WeylBound w;
  w.max_eig_dev = (ea.eigenvalues() - eh.eigenvalues()).cwiseAbs().maxCoeff();
  w.bound = std::sqrt(static_cast<double>(l)) * (A - Ah).cwiseAbs().rowwise().sum().maxCoeff();
  return w;
}

}  // namespace eigshape
