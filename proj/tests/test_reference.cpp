#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>
#include <gtest/gtest.h>

#include "eigshape/bessel.hpp"
#include "eigshape/exact.hpp"
#include "eigshape/reference.hpp"

using namespace eigshape;

namespace {

constexpr double pi = std::numbers::pi;

// Tensor/polar Gauss integration of f over the continuous domain.
template <class F>
double integrate_domain(Domain d, F&& f) {
  const LineRule g = gauss_legendre(20);
  double s = 0.0;
  if (d == Domain::UnitSquare) {
    const int panels = 4;
    for (int pi_ = 0; pi_ < panels; ++pi_)
      for (int pj = 0; pj < panels; ++pj)
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
          for (std::size_t j = 0; j < g.nodes.size(); ++j)
            s += g.weights[i] * g.weights[j] / (panels * panels) *
                 f(Vec2((pi_ + g.nodes[i]) / panels, (pj + g.nodes[j]) / panels));
    return s;
  }
  const int nth = 64;
  for (int k = 0; k < nth; ++k) {
    const double th = 2 * pi * k / nth;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double r = g.nodes[i];
      s += g.weights[i] * (2 * pi / nth) * r * f(Vec2(r * std::cos(th), r * std::sin(th)));
    }
  }
  return s;
}

}  // namespace

TEST(Bessel, MatchesBoost) {
  for (double x = 0.0; x <= 60.0; x += 0.037) {
    const double b0 = boost::math::cyl_bessel_j(0, x), b1 = boost::math::cyl_bessel_j(1, x);
    EXPECT_NEAR(bessel::j0(x), b0, 1e-14 * std::max(1.0, std::abs(b0)) + 2e-15) << "x=" << x;
    EXPECT_NEAR(bessel::j1(x), b1, 1e-14 * std::max(1.0, std::abs(b1)) + 2e-15) << "x=" << x;
  }
  for (double x : {100.0, 250.5, 1000.0}) {
    EXPECT_NEAR(bessel::j0(x), boost::math::cyl_bessel_j(0, x), 1e-13);
    EXPECT_NEAR(bessel::j1(x), boost::math::cyl_bessel_j(1, x), 1e-13);
  }
  EXPECT_EQ(bessel::j0(0.0), 1.0);
  EXPECT_EQ(bessel::j1(0.0), 0.0);
  EXPECT_THROW(bessel::j0(-1.0), std::domain_error);
}

TEST(Bessel, DerivativeIdentity) {
  for (double x : {0.5, 2.0, 7.3, 31.0}) EXPECT_EQ(bessel::j0_prime(x), -bessel::j1(x));
}

TEST(Bessel, ZerosMatchBoost) {
  for (int n = 1; n <= 5; ++n) {
    EXPECT_NEAR(bessel::j0_zero(n), boost::math::cyl_bessel_j_zero(0.0, n), 1e-13);
    EXPECT_NEAR(bessel::j0_prime_zero(n), boost::math::cyl_bessel_j_zero(1.0, n), 1e-13);
  }
  const double j = boost::math::cyl_bessel_j_zero(0.0, 1);
  EXPECT_NEAR(j * j, 5.7831859629467, 1e-12);
}

TEST(Exact, Eigenvalues) {
  EXPECT_NEAR(exact_eigenpair(Domain::UnitSquare, BoundaryCondition::Dirichlet).lambda, 2 * pi * pi, 1e-13);
  EXPECT_NEAR(exact_eigenpair(Domain::UnitSquare, BoundaryCondition::Neumann).lambda, 2 * pi * pi, 1e-13);
  const double j01 = boost::math::cyl_bessel_j_zero(0.0, 1);
  EXPECT_NEAR(exact_eigenpair(Domain::UnitDisk, BoundaryCondition::Dirichlet).lambda, j01 * j01, 1e-12);
  const double j11 = boost::math::cyl_bessel_j_zero(1.0, 1);
  EXPECT_NEAR(exact_eigenpair(Domain::UnitDisk, BoundaryCondition::Neumann).lambda, j11 * j11, 1e-12);
  EXPECT_THROW(exact_eigenpair(Domain::LShape, BoundaryCondition::Dirichlet), Unsupported);
}

TEST(Exact, NormalizationAndRayleighQuotient) {
  for (Domain d : {Domain::UnitSquare, Domain::UnitDisk})
    for (BoundaryCondition bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
      const ExactEigenpair e = exact_eigenpair(d, bc);
      const double mass = integrate_domain(d, [&](const Vec2& x) { return e.u(x) * e.u(x); });
      const double stiff = integrate_domain(d, [&](const Vec2& x) { return e.grad(x).squaredNorm(); });
      EXPECT_NEAR(mass, 1.0, 1e-8) << to_string(d) << ' ' << to_string(bc);
      EXPECT_NEAR(stiff / mass, e.lambda, 1e-8 * e.lambda) << to_string(d) << ' ' << to_string(bc);
    }
}

TEST(Exact, PdeAndBoundaryResidual) {
  const double hh = 1e-4;
  for (Domain d : {Domain::UnitSquare, Domain::UnitDisk})
    for (BoundaryCondition bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
      const ExactEigenpair e = exact_eigenpair(d, bc);
      for (const Vec2& x : {Vec2(0.31, 0.22), Vec2(0.5, 0.4), Vec2(0.12, 0.61)}) {
        const double lap = (e.u(x + Vec2(hh, 0)) + e.u(x - Vec2(hh, 0)) + e.u(x + Vec2(0, hh)) +
                            e.u(x - Vec2(0, hh)) - 4 * e.u(x)) /
                           (hh * hh);
        EXPECT_NEAR(-lap, e.lambda * e.u(x), 1e-4 * e.lambda);
        const Vec2 fd((e.u(x + Vec2(hh, 0)) - e.u(x - Vec2(hh, 0))) / (2 * hh),
                      (e.u(x + Vec2(0, hh)) - e.u(x - Vec2(0, hh))) / (2 * hh));
        EXPECT_NEAR((fd - e.grad(x)).norm(), 0.0, 1e-6 * e.lambda);
      }
      const double bres = integrate_boundary(d, [&](const Vec2& x, const Vec2& n) {
        const double v = bc == BoundaryCondition::Dirichlet ? e.u(x) : e.grad(x).dot(n);
        return v * v;
      });
      EXPECT_LT(bres, 1e-20);
    }
}

TEST(Continuous, SymmetryValues) {
  for (Domain d : {Domain::UnitSquare, Domain::UnitDisk})
    for (BoundaryCondition bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
      const ExactEigenpair e = exact_eigenpair(d, bc);
      const std::vector<ExactEigenpair> one{e};
      EXPECT_NEAR(continuous_directional_matrix(one, VelocityField::constant(1, 0))(0, 0), 0.0, 1e-10);
      EXPECT_NEAR(continuous_directional_matrix(one, VelocityField::constant(0, 1))(0, 0), 0.0, 1e-10);
      EXPECT_NEAR(continuous_directional_matrix(one, VelocityField::identity())(0, 0), -2 * e.lambda,
                  1e-9 * e.lambda);
      if (d == Domain::UnitDisk)
        EXPECT_NEAR(continuous_directional_matrix(one, VelocityField::rotation())(0, 0), 0.0, 1e-10);
    }
}

TEST(Continuous, TranslationsExactlyZero) {
  const auto r = continuous_derivatives(Domain::UnitSquare, BoundaryCondition::Dirichlet, build_basis(0));
  ASSERT_EQ(r.values.size(), 2u);
  EXPECT_EQ(r.values[0], 0.0);
  EXPECT_EQ(r.values[1], 0.0);
  EXPECT_TRUE(is_translation(VelocityField::constant(2, 3)));
  EXPECT_FALSE(is_translation(VelocityField::rotation()));
}

TEST(Continuous, PanelDoubling) {
  const VelocityBasis b = build_basis(3);
  for (Domain d : {Domain::UnitSquare, Domain::UnitDisk})
    for (BoundaryCondition bc : {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann}) {
      const auto a = continuous_derivatives(d, bc, b, 64);
      const auto c = continuous_derivatives(d, bc, b, 128);
      double scale = 0.0;
      for (double v : a.values) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < a.values.size(); ++i)
        EXPECT_NEAR(a.values[i], c.values[i], 1e-9 * scale);
    }
}

TEST(Continuous, SquareDirichletX1ClosedForm) {
  // -int (du/dn)^2 x1 n1 ds = -int_0^1 (2 pi sin(pi y))^2 dy on the side x1 = 1
  const auto e = exact_eigenpair(Domain::UnitSquare, BoundaryCondition::Dirichlet);
  EXPECT_NEAR(continuous_directional_matrix({e}, VelocityField::monomial(1, 0, 0))(0, 0),
              -2 * pi * pi, 1e-10);
}

TEST(Richardson, SyntheticSequence) {
  const double exact = 3.0;
  const auto v = [&](int l) { return exact + 0.7 * std::pow(2.0, -1.5 * l); };
  const double p = richardson_rate(v(3), v(4), v(5));
  EXPECT_NEAR(p, 1.5, 1e-10);
  EXPECT_NEAR(richardson_extrapolate(v(4), v(5), p), exact, 1e-12);
  EXPECT_TRUE(std::isnan(richardson_rate(1.0, 1.0, 1.0)));
  EXPECT_TRUE(std::isnan(richardson_rate(1.0, 2.0, 3.0)));
}

TEST(FineMesh, LShapeIdentityFollowsScalingLaw) {
  std::vector<FineLevel> levels;
  const VelocityBasis b{1, {VelocityField::identity(), VelocityField::rotation()}};
  const auto r = finemesh_reference(Domain::LShape, BoundaryCondition::Dirichlet, b, 5, {}, &levels);
  ASSERT_EQ(levels.size(), 3u);
  EXPECT_EQ(r.provenance, Provenance::FineMesh);
  EXPECT_EQ(r.reference_level, 5);
  EXPECT_TRUE(std::isfinite(r.extrapolation_rate));
  EXPECT_GT(r.extrapolation_rate, 1.0);
  EXPECT_NEAR(r.values[0], -2 * r.lambda, 1e-9 * r.lambda);
  EXPECT_NEAR(r.values[1], 0.0, 1e-9 * r.lambda);
  // extrapolated eigenvalue lies below the finest discrete one
  EXPECT_LT(r.lambda, levels.back().lambda);
}

TEST(FineMesh, LShapeEigenvalueRateAgainstExtrapolatedReference) {
  const VelocityBasis b = build_basis(0);
  const auto r = finemesh_reference(Domain::LShape, BoundaryCondition::Dirichlet, b, 7);
  std::vector<double> h, e;
  Mesh mesh = generate(Domain::LShape, 3);
  for (int level = 3; level <= 6; ++level) {
    if (level > 3) mesh = refine(mesh);
    const FemSpace s(std::make_shared<const Mesh>(mesh), BoundaryCondition::Dirichlet);
    const auto p = solve_lowest(assemble_stiffness(s), assemble_mass(s), 1, BoundaryCondition::Dirichlet);
    h.push_back(mesh.h());
    e.push_back(p[0].lambda - r.lambda);
  }
  std::vector<double> logh, loge;
  for (std::size_t i = 0; i < h.size(); ++i) {
    logh.push_back(std::log(h[i]));
    loge.push_back(std::log(e[i]));
  }
  const double n = static_cast<double>(h.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < h.size(); ++i) mx += logh[i] / n, my += loge[i] / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    sxy += (logh[i] - mx) * (loge[i] - my);
    sxx += (logh[i] - mx) * (logh[i] - mx);
  }
  const double slope = sxy / sxx;
  EXPECT_GE(slope, 1.1);
  EXPECT_LE(slope, 1.6);
  // published value of the lowest L-shape Dirichlet eigenvalue
  EXPECT_NEAR(r.lambda, 9.6397238440219, 1e-3);
}

TEST(FineMesh, ResourceBudget) {
  FineMeshOptions o;
  o.max_dofs = 100;
  EXPECT_THROW(finemesh_reference(Domain::LShape, BoundaryCondition::Dirichlet, build_basis(1), 5, o),
               ResourceError);
}
