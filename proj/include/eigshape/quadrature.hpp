#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace eigshape {

/// One-dimensional rule on [0, 1]; weights sum to 1.
struct LineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Triangle rule in barycentric coordinates; weights sum to 1, so
/// multiply by the element area.
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;
};

/// n-point Gauss-Legendre rule mapped to [0, 1], exact for degree 2n-1.
inline LineRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  LineRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const auto legendre = [n](double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
  };
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

/// Gauss-Legendre rule with the fewest points exact for `degree`.
inline LineRule line_rule_for_degree(int degree) {
  return gauss_legendre(std::max(1, degree / 2 + 1));
}

namespace detail {

inline void add_orbit3(TriangleRule& r, double a, double b, double w) {
  r.points.push_back({a, b, b});
  r.points.push_back({b, a, b});
  r.points.push_back({b, b, a});
  for (int i = 0; i < 3; ++i) r.weights.push_back(w);
}

inline void add_orbit6(TriangleRule& r, double a, double b, double c, double w) {
  r.points.push_back({a, b, c});
  r.points.push_back({a, c, b});
  r.points.push_back({b, a, c});
  r.points.push_back({b, c, a});
  r.points.push_back({c, a, b});
  r.points.push_back({c, b, a});
  for (int i = 0; i < 6; ++i) r.weights.push_back(w);
}

// Collapsed (Duffy) tensor Gauss rule; exact for any degree given enough
// points along each direction.
inline TriangleRule collapsed_gauss(int degree) {
  const LineRule g = gauss_legendre(degree / 2 + 2);
  TriangleRule r;
  r.degree = degree;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const double s = g.nodes[i];
      const double t = g.nodes[j];
      const double x = s * (1.0 - t);
      const double y = t;
      // reference triangle area 1/2; Jacobian (1 - t); normalise weights to 1
      r.points.push_back({1.0 - x - y, x, y});
      r.weights.push_back(2.0 * g.weights[i] * g.weights[j] * (1.0 - t));
    }
  }
  return r;
}

}  // namespace detail

/// Symmetric rule exact for polynomials of total degree <= `degree`.
/// Degrees 1, 2 and 6 use the classical symmetric rules (centroid,
/// three edge-interior points, twelve-point Dunavant); other degrees fall
/// back to a collapsed Gauss product rule.
inline TriangleRule triangle_rule(int degree) {
  TriangleRule r;
  if (degree <= 1) {
    r.degree = 1;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(1.0);
    return r;
  }
  if (degree == 2) {
    r.degree = 2;
    detail::add_orbit3(r, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0);
    return r;
  }
  if (degree <= 6) {
    r.degree = 6;
    detail::add_orbit3(r, 0.501426509658179, 0.249286745170910, 0.116786275726379);
    detail::add_orbit3(r, 0.873821971016996, 0.063089014491502, 0.050844906370207);
    detail::add_orbit6(r, 0.053145049844817, 0.310352451033784, 0.636502499121399,
                       0.082851075618374);
    return r;
  }
  return detail::collapsed_gauss(degree);
}

}  // namespace eigshape
