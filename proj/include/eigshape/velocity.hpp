#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eigshape/eig.hpp"
#include "eigshape/mesh.hpp"
#include "eigshape/quadrature.hpp"

namespace eigshape {

/// Powers x^0..x^d and y^0..y^d at one point.
struct PowerTable {
  std::array<double, 16> x{};
  std::array<double, 16> y{};

  PowerTable(const Vec2& p, int degree) {
    x[0] = y[0] = 1.0;
    for (int i = 1; i <= degree; ++i) {
      x[i] = x[i - 1] * p.x();
      y[i] = y[i - 1] * p.y();
    }
  }
};

/// Bivariate polynomial sum_{a+b<=deg} c_{ab} x^a y^b.
class Polynomial2 {
 public:
  static constexpr int max_degree = 14;

  Polynomial2() : Polynomial2(0) {}
  explicit Polynomial2(int degree)
      : degree_(degree), coeffs_(static_cast<std::size_t>(size_for(degree)), 0.0) {
    if (degree < 0 || degree > max_degree)
      throw std::invalid_argument("Polynomial2: degree out of range");
  }

  static int size_for(int degree) { return (degree + 1) * (degree + 2) / 2; }
  /// Graded index: total degree first, then increasing power of y.
  static int index(int a, int b) {
    const int t = a + b;
    return t * (t + 1) / 2 + b;
  }
  static Polynomial2 monomial(int a, int b, double c = 1.0) {
    Polynomial2 p(a + b);
    p.coeff(a, b) = c;
    return p;
  }

  int degree() const { return degree_; }
  double& coeff(int a, int b) { return coeffs_[static_cast<std::size_t>(index(a, b))]; }
  double coeff(int a, int b) const {
    return a + b > degree_ ? 0.0 : coeffs_[static_cast<std::size_t>(index(a, b))];
  }

  double eval(const PowerTable& pw) const {
    double s = 0.0;
    for (int t = 0; t <= degree_; ++t)
      for (int b = 0; b <= t; ++b) {
        const double c = coeffs_[static_cast<std::size_t>(index(t - b, b))];
        if (c != 0.0) s += c * pw.x[t - b] * pw.y[b];
      }
    return s;
  }
  double eval(const Vec2& p) const { return eval(PowerTable(p, degree_)); }

  /// Value and gradient in one sweep.
  void eval_with_gradient(const PowerTable& pw, double& value, Vec2& grad) const {
    value = 0.0;
    grad.setZero();
    for (int t = 0; t <= degree_; ++t)
      for (int b = 0; b <= t; ++b) {
        const int a = t - b;
        const double c = coeffs_[static_cast<std::size_t>(index(a, b))];
        if (c == 0.0) continue;
        value += c * pw.x[a] * pw.y[b];
        if (a > 0) grad.x() += c * a * pw.x[a - 1] * pw.y[b];
        if (b > 0) grad.y() += c * b * pw.x[a] * pw.y[b - 1];
      }
  }

  Polynomial2 derivative(int dim) const {
    Polynomial2 d(std::max(0, degree_ - 1));
    for (int t = 1; t <= degree_; ++t)
      for (int b = 0; b <= t; ++b) {
        const int a = t - b;
        const double c = coeff(a, b);
        if (dim == 0 && a > 0) d.coeff(a - 1, b) += a * c;
        if (dim == 1 && b > 0) d.coeff(a, b - 1) += b * c;
      }
    return d;
  }

  friend Polynomial2 operator*(const Polynomial2& p, const Polynomial2& q) {
    Polynomial2 r(p.degree_ + q.degree_);
    for (int t1 = 0; t1 <= p.degree_; ++t1)
      for (int b1 = 0; b1 <= t1; ++b1) {
        const double c1 = p.coeff(t1 - b1, b1);
        if (c1 == 0.0) continue;
        for (int t2 = 0; t2 <= q.degree_; ++t2)
          for (int b2 = 0; b2 <= t2; ++b2) {
            const double c2 = q.coeff(t2 - b2, b2);
            if (c2 != 0.0) r.coeff(t1 - b1 + t2 - b2, b1 + b2) += c1 * c2;
          }
      }
    return r;
  }

  friend Polynomial2 operator+(const Polynomial2& p, const Polynomial2& q) {
    Polynomial2 r(std::max(p.degree_, q.degree_));
    for (int t = 0; t <= r.degree_; ++t)
      for (int b = 0; b <= t; ++b) r.coeff(t - b, b) = p.coeff(t - b, b) + q.coeff(t - b, b);
    return r;
  }

  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  int degree_;
  std::vector<double> coeffs_;
};

/// V(x), its Jacobian DV (rows = components) and div V at one point.
struct FieldValue {
  Vec2 V;
  Mat2 DV;
  double div;
};

/// Polynomial vector field (p_1(x), p_2(x)).
class VelocityField {
 public:
  VelocityField() = default;
  VelocityField(Polynomial2 first, Polynomial2 second, std::string label = {})
      : comp_{std::move(first), std::move(second)}, label_(std::move(label)) {}

  static VelocityField constant(double c1, double c2) {
    return {Polynomial2::monomial(0, 0, c1), Polynomial2::monomial(0, 0, c2), "const"};
  }
  static VelocityField identity() {
    return {Polynomial2::monomial(1, 0), Polynomial2::monomial(0, 1), "identity"};
  }
  /// (-x2, x1)
  static VelocityField rotation() {
    return {Polynomial2::monomial(0, 1, -1.0), Polynomial2::monomial(1, 0), "rot"};
  }
  /// x1^a x2^b in component `component` (0 or 1).
  static VelocityField monomial(int a, int b, int component) {
    if (component != 0 && component != 1)
      throw std::invalid_argument("VelocityField::monomial: component must be 0 or 1");
    Polynomial2 m = Polynomial2::monomial(a, b);
    Polynomial2 z(0);
    std::string label = "mono:" + std::to_string(a) + "," + std::to_string(b) + "," +
                        std::to_string(component);
    return component == 0 ? VelocityField(m, z, label) : VelocityField(z, m, label);
  }

  const Polynomial2& component(int i) const { return comp_[i]; }
  int degree() const { return std::max(comp_[0].degree(), comp_[1].degree()); }
  const std::string& label() const { return label_; }

  FieldValue eval(const PowerTable& pw) const {
    FieldValue f;
    Vec2 g0, g1;
    comp_[0].eval_with_gradient(pw, f.V.x(), g0);
    comp_[1].eval_with_gradient(pw, f.V.y(), g1);
    f.DV.row(0) = g0.transpose();
    f.DV.row(1) = g1.transpose();
    f.div = f.DV.trace();
    return f;
  }
  FieldValue eval(const Vec2& p) const { return eval(PowerTable(p, degree())); }

 private:
  std::array<Polynomial2, 2> comp_{Polynomial2(0), Polynomial2(0)};
  std::string label_;
};

/// Monomial basis of P_{gamma,gamma}(R^2; R^2).
struct VelocityBasis {
  int gamma = 0;
  std::vector<VelocityField> fields;

  std::size_t size() const { return fields.size(); }
  int max_degree() const { return gamma; }
};

/// q = 2 C(gamma + 2, 2) fields ordered by total degree, then increasing
/// power of x2, then component; the basis of a smaller gamma is a prefix.
inline VelocityBasis build_basis(int gamma) {
  if (gamma < 0 || gamma > 6) throw std::invalid_argument("build_basis: gamma must be in [0, 6]");
  VelocityBasis basis;
  basis.gamma = gamma;
  for (int t = 0; t <= gamma; ++t)
    for (int b = 0; b <= t; ++b)
      for (int c = 0; c < 2; ++c) basis.fields.push_back(VelocityField::monomial(t - b, b, c));
  return basis;
}

/// Monomial moments int_Omega_h x^a y^b over the mesh, exact up to `degree`.
class MomentTable {
 public:
  MomentTable(const Mesh& mesh, int degree) : degree_(degree), mu_(Polynomial2::size_for(degree)) {
    const TriangleRule rule = triangle_rule(std::max(1, degree));
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
      const auto& tri = mesh.triangles()[t];
      const Vec2& p0 = mesh.vertices()[tri[0]];
      const Vec2& p1 = mesh.vertices()[tri[1]];
      const Vec2& p2 = mesh.vertices()[tri[2]];
      const double area = mesh.area(t);
      for (std::size_t q = 0; q < rule.weights.size(); ++q) {
        const auto& l = rule.points[q];
        const PowerTable pw(l[0] * p0 + l[1] * p1 + l[2] * p2, degree);
        const double w = rule.weights[q] * area;
        for (int s = 0; s <= degree; ++s)
          for (int b = 0; b <= s; ++b)
            mu_[static_cast<std::size_t>(Polynomial2::index(s - b, b))] += w * pw.x[s - b] * pw.y[b];
      }
    }
  }

  int degree() const { return degree_; }
  double moment(int a, int b) const {
    if (a + b > degree_) throw std::out_of_range("MomentTable: moment degree exceeds table");
    return mu_[static_cast<std::size_t>(Polynomial2::index(a, b))];
  }
  double integrate(const Polynomial2& p) const {
    double s = 0.0;
    for (int t = 0; t <= p.degree(); ++t)
      for (int b = 0; b <= t; ++b) {
        const double c = p.coeff(t - b, b);
        if (c != 0.0) s += c * moment(t - b, b);
      }
    return s;
  }

 private:
  int degree_;
  std::vector<double> mu_;
};

/// H^1(Omega_h) Gramian of a velocity basis with its Cholesky factor.
struct Gramian {
  Eigen::MatrixXd K;
  Eigen::LLT<Eigen::MatrixXd> llt;
  double condition_number = 0.0;
};

/// K_ij = int (V_i . V_j + DV_i : DV_j) over the mesh, integrated exactly
/// (quadrature of degree 2 gamma).
inline Gramian gramian(const VelocityBasis& basis, const Mesh& mesh) {
  const int q = static_cast<int>(basis.size());
  int deg = 0;
  for (const auto& f : basis.fields) deg = std::max(deg, f.degree());
  const MomentTable moments(mesh, 2 * deg);
  std::vector<std::array<Polynomial2, 2>> dx(q), dy(q);
  for (int i = 0; i < q; ++i)
    for (int c = 0; c < 2; ++c) {
      dx[i][c] = basis.fields[i].component(c).derivative(0);
      dy[i][c] = basis.fields[i].component(c).derivative(1);
    }
  Gramian g;
  g.K.resize(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = i; j < q; ++j) {
      double s = 0.0;
      for (int c = 0; c < 2; ++c) {
        const auto& pi = basis.fields[i].component(c);
        const auto& pj = basis.fields[j].component(c);
        s += moments.integrate(pi * pj);
        s += moments.integrate(dx[i][c] * dx[j][c]);
        s += moments.integrate(dy[i][c] * dy[j][c]);
      }
      g.K(i, j) = g.K(j, i) = s;
    }
  g.llt.compute(g.K);
  if (g.llt.info() != Eigen::Success)
    throw FactorizationFailure("gramian: Cholesky factorization failed (K not numerically SPD)");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.K, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (!(lo > 0.0))
    throw FactorizationFailure("gramian: K has a nonpositive eigenvalue");
  g.condition_number = es.eigenvalues().maxCoeff() / lo;
  return g;
}

/// E = sqrt(w^T K^{-1} w) via the Cholesky factor.
inline double dual_norm(const Eigen::VectorXd& w, const Gramian& g) {
  if (w.size() != g.K.rows()) throw std::invalid_argument("dual_norm: dimension mismatch");
  if (g.llt.info() != Eigen::Success) throw FactorizationFailure("dual_norm: Gramian not factorized");
  const Eigen::VectorXd z = g.llt.matrixL().solve(w);
  return z.norm();
}

}  // namespace eigshape
