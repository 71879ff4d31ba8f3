#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eigshape/bessel.hpp"
#include "eigshape/fem.hpp"
#include "eigshape/mesh.hpp"
#include "eigshape/quadrature.hpp"
#include "eigshape/velocity.hpp"

namespace eigshape {

class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed-form L2-normalized eigenpair on the continuous domain.
struct ExactEigenpair {
  double lambda = 0.0;
  std::function<double(const Vec2&)> u;
  std::function<Vec2(const Vec2&)> grad;
  Domain domain = Domain::UnitSquare;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
};

/// Separable square mode: 2 sin(m pi x) sin(n pi y) (Dirichlet, m,n >= 1)
/// or 2 cos(m pi x) cos(n pi y) (Neumann, m,n >= 1).
inline ExactEigenpair square_mode(int m, int n, BoundaryCondition bc) {
  if (m < 1 || n < 1) throw std::invalid_argument("square_mode: m, n must be >= 1");
  constexpr double pi = std::numbers::pi;
  ExactEigenpair e;
  e.lambda = (m * m + n * n) * pi * pi;
  e.domain = Domain::UnitSquare;
  e.bc = bc;
  const double a = m * pi, b = n * pi;
  if (bc == BoundaryCondition::Dirichlet) {
    e.u = [a, b](const Vec2& p) { return 2.0 * std::sin(a * p.x()) * std::sin(b * p.y()); };
    e.grad = [a, b](const Vec2& p) {
      return Vec2(2.0 * a * std::cos(a * p.x()) * std::sin(b * p.y()),
                  2.0 * b * std::sin(a * p.x()) * std::cos(b * p.y()));
    };
  } else {
    e.u = [a, b](const Vec2& p) { return 2.0 * std::cos(a * p.x()) * std::cos(b * p.y()); };
    e.grad = [a, b](const Vec2& p) {
      return Vec2(-2.0 * a * std::sin(a * p.x()) * std::cos(b * p.y()),
                  -2.0 * b * std::cos(a * p.x()) * std::sin(b * p.y()));
    };
  }
  return e;
}

/// Radially symmetric disk mode J0(k r) / (sqrt(pi) |J0(k)| or |J0'(k)|).
inline ExactEigenpair disk_radial_mode(double k, BoundaryCondition bc) {
  ExactEigenpair e;
  e.lambda = k * k;
  e.domain = Domain::UnitDisk;
  e.bc = bc;
  const double edge = bc == BoundaryCondition::Dirichlet ? std::abs(bessel::j0_prime(k))
                                                         : std::abs(bessel::j0(k));
  const double c = 1.0 / (std::sqrt(std::numbers::pi) * edge);
  e.u = [k, c](const Vec2& p) { return c * bessel::j0(k * p.norm()); };
  e.grad = [k, c](const Vec2& p) -> Vec2 {
    const double r = p.norm();
    if (r == 0.0) return Vec2::Zero();
    return (-c * k * bessel::j1(k * r) / r) * p;
  };
  return e;
}

/// The study eigenpair of each smooth domain: square Dirichlet
/// (2 pi^2, 2 sin sin), square Neumann (2 pi^2, 2 cos cos), disk Dirichlet
/// (j01^2, ...), disk Neumann with the radial mode of the first zero of J0'.
inline ExactEigenpair exact_eigenpair(Domain domain, BoundaryCondition bc) {
  switch (domain) {
    case Domain::UnitSquare: return square_mode(1, 1, bc);
    case Domain::UnitDisk:
      return disk_radial_mode(
          bc == BoundaryCondition::Dirichlet ? bessel::j0_zero() : bessel::j0_prime_zero(), bc);
    case Domain::LShape:
      throw Unsupported("exact_eigenpair: no closed-form eigenpair on the L-shape");
  }
  throw Unsupported("exact_eigenpair: unknown domain");
}

/// Composite Gauss quadrature over the continuous boundary. The callback
/// receives (point, outward normal) and returns the integrand; square sides
/// and the circle (parametrised by angle) are split into `panels` panels.
template <class F>
double integrate_boundary(Domain domain, F&& f, int panels = 64, int points = 10) {
  const LineRule g = gauss_legendre(points);
  double sum = 0.0;
  if (domain == Domain::UnitSquare) {
    const Vec2 corners[4] = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
    const Vec2 normals[4] = {Vec2(0, -1), Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0)};
    for (int s = 0; s < 4; ++s) {
      const Vec2 a = corners[s], b = corners[(s + 1) % 4];
      for (int p = 0; p < panels; ++p)
        for (std::size_t q = 0; q < g.nodes.size(); ++q) {
          const double t = (p + g.nodes[q]) / panels;
          sum += g.weights[q] / panels * f(Vec2((1 - t) * a + t * b), normals[s]);
        }
    }
    return sum;
  }
  if (domain == Domain::UnitDisk) {
    const double two_pi = 2.0 * std::numbers::pi;
    for (int p = 0; p < panels; ++p)
      for (std::size_t q = 0; q < g.nodes.size(); ++q) {
        const double th = two_pi * (p + g.nodes[q]) / panels;
        const Vec2 n(std::cos(th), std::sin(th));
        sum += two_pi * g.weights[q] / panels * f(n, n);
      }
    return sum;
  }
  throw Unsupported("integrate_boundary: only square and disk boundaries are parametrised");
}

/// Continuous boundary-form directional matrix for L2-orthonormal exact
/// eigenfunctions sharing one eigenvalue.
inline Eigen::MatrixXd continuous_directional_matrix(const std::vector<ExactEigenpair>& modes,
                                                     const VelocityField& field,
                                                     int panels = 64, int points = 10) {
  if (modes.empty()) throw std::invalid_argument("continuous_directional_matrix: no modes");
  const int l = static_cast<int>(modes.size());
  const Domain domain = modes.front().domain;
  const BoundaryCondition bc = modes.front().bc;
  const double lambda = modes.front().lambda;
  Eigen::MatrixXd m(l, l);
  for (int i = 0; i < l; ++i)
    for (int j = i; j < l; ++j) {
      const auto& ui = modes[i];
      const auto& uj = modes[j];
      const double v = integrate_boundary(
          domain,
          [&](const Vec2& x, const Vec2& n) {
            const Vec2 V = field.eval(x).V;
            const double vn = V.dot(n);
            const Vec2 gi = ui.grad(x), gj = uj.grad(x);
            if (bc == BoundaryCondition::Dirichlet) return -gi.dot(n) * gj.dot(n) * vn;
            const Vec2 ti = gi - gi.dot(n) * n, tj = gj - gj.dot(n) * n;
            return (ti.dot(tj) - lambda * ui.u(x) * uj.u(x)) * vn;
          },
          panels, points);
      m(i, j) = m(j, i) = v;
    }
  return m;
}

/// True when both components are constant.
inline bool is_translation(const VelocityField& f) {
  for (int c = 0; c < 2; ++c) {
    const auto& p = f.component(c);
    for (int t = 1; t <= p.degree(); ++t)
      for (int b = 0; b <= t; ++b)
        if (p.coeff(t - b, b) != 0.0) return false;
  }
  return true;
}

enum class Provenance { Analytic, FineMesh };

/// Continuous Eulerian derivatives of the study eigenvalue for each basis
/// field.
struct ReferenceDerivatives {
  std::vector<double> values;
  Provenance provenance = Provenance::Analytic;
  double lambda = 0.0;
  /// FineMesh only: finest level used.
  int reference_level = -1;
  /// FineMesh only: extrapolation rate, NaN when not extrapolated.
  double extrapolation_rate = std::numeric_limits<double>::quiet_NaN();
};

/// Boundary-form derivatives of the exact eigenpair, integrated on the
/// true boundary.
inline ReferenceDerivatives continuous_derivatives(const ExactEigenpair& exact,
                                                   const VelocityBasis& basis, int panels = 64,
                                                   int points = 10) {
  ReferenceDerivatives r;
  r.provenance = Provenance::Analytic;
  r.lambda = exact.lambda;
  const std::vector<ExactEigenpair> one{exact};
  for (const auto& f : basis.fields) {
    if (is_translation(f)) {
      // translations leave every eigenvalue unchanged
      r.values.push_back(0.0);
      continue;
    }
    r.values.push_back(continuous_directional_matrix(one, f, panels, points)(0, 0));
  }
  return r;
}

inline ReferenceDerivatives continuous_derivatives(Domain domain, BoundaryCondition bc,
                                                   const VelocityBasis& basis, int panels = 64,
                                                   int points = 10) {
  return continuous_derivatives(exact_eigenpair(domain, bc), basis, panels, points);
}

}  // namespace eigshape
