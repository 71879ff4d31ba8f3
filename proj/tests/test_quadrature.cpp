#include <cmath>

#include <gtest/gtest.h>

#include "eigshape/quadrature.hpp"

using namespace eigshape;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// int over the reference triangle of x^a y^b = a! b! / (a + b + 2)!
double simplex_moment(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

double apply(const TriangleRule& r, int a, int b) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.weights.size(); ++q)
    s += r.weights[q] * std::pow(r.points[q][1], a) * std::pow(r.points[q][2], b);
  return 0.5 * s;
}

}  // namespace

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int n = 1; n <= 12; ++n) {
    const LineRule g = gauss_legendre(n);
    ASSERT_EQ(g.nodes.size(), static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], p);
      EXPECT_NEAR(s, 1.0 / (p + 1), 1e-14) << "n=" << n << " p=" << p;
    }
  }
}

TEST(GaussLegendre, RuleForDegree) {
  for (int d = 0; d <= 15; ++d) {
    const LineRule g = line_rule_for_degree(d);
    EXPECT_GE(2 * static_cast<int>(g.nodes.size()) - 1, d);
  }
}

TEST(TriangleRule, WeightsSumToOneAndPointsInside) {
  for (int d = 0; d <= 14; ++d) {
    const TriangleRule r = triangle_rule(d);
    double s = 0.0;
    for (std::size_t q = 0; q < r.weights.size(); ++q) {
      s += r.weights[q];
      for (double l : r.points[q]) EXPECT_GE(l, -1e-15);
      EXPECT_NEAR(r.points[q][0] + r.points[q][1] + r.points[q][2], 1.0, 1e-15);
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
    EXPECT_GE(r.degree, d);
  }
}

TEST(TriangleRule, ExactForMonomialsUpToDegree) {
  for (int d = 0; d <= 14; ++d) {
    const TriangleRule r = triangle_rule(d);
    for (int t = 0; t <= d; ++t)
      for (int b = 0; b <= t; ++b)
        EXPECT_NEAR(apply(r, t - b, b), simplex_moment(t - b, b), 1e-15)
            << "rule " << d << " monomial x^" << t - b << " y^" << b;
  }
}

TEST(TriangleRule, DegreeSixUsesTwelvePoints) { EXPECT_EQ(triangle_rule(6).weights.size(), 12u); }
