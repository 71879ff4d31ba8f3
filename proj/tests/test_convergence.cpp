#include <cmath>

#include <gtest/gtest.h>

#include "eigshape/convergence.hpp"

using namespace eigshape;

TEST(FitLogLog, ExactPowerLaw) {
  std::vector<double> h, e;
  for (int l = 0; l < 5; ++l) {
    h.push_back(std::pow(0.5, l));
    e.push_back(h.back() * h.back());
  }
  const RateFit f = fit_loglog(h, e);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.residual, 0.0, 1e-12);
}

TEST(FitLogLog, LinearWithConstant) {
  std::vector<double> h{0.4, 0.2, 0.1, 0.05}, e;
  for (double x : h) e.push_back(3 * x);
  const RateFit f = fit_loglog(h, e);
  EXPECT_NEAR(f.slope, 1.0, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
}

TEST(FitLogLog, NoisyQuadratic) {
  std::vector<double> h, e;
  for (int l = 3; l <= 7; ++l) {
    h.push_back(std::sqrt(2.0) / std::pow(2.0, l + 1));
    e.push_back(h.back() * h.back() * (1 + 0.05 * std::sin(l)));
  }
  const RateFit f = fit_loglog(h, e);
  EXPECT_GE(f.slope, 1.9);
  EXPECT_LE(f.slope, 2.1);
}

TEST(FitLogLog, Errors) {
  std::vector<double> h{0.4, 0.2, 0.1}, zero{1.0, 0.0, 1.0};
  EXPECT_THROW(fit_loglog(h, zero), DegenerateFit);
  std::vector<double> two{1, 2};
  EXPECT_THROW(fit_loglog(two, two), std::invalid_argument);
  std::vector<double> e{1, 2};
  EXPECT_THROW(fit_loglog(h, e), std::invalid_argument);
}

TEST(FitRate, UsesWindow) {
  std::vector<StudyRecord> recs;
  for (int l = 0; l < 6; ++l) {
    StudyRecord r;
    r.level = l;
    r.h = std::pow(0.5, l);
    // pre-asymptotic first two levels
    r.E_volume = l < 2 ? 1.0 : r.h * r.h;
    r.E_boundary = r.h;
    recs.push_back(r);
  }
  EXPECT_NEAR(fit_rate(recs, Formula::Volume, 4).slope, 2.0, 1e-12);
  EXPECT_NEAR(fit_rate(recs, Formula::Boundary, 4).slope, 1.0, 1e-12);
  EXPECT_EQ(fit_rate(recs, Formula::Volume, 4).window, 4);
}

TEST(StudyConfig, Validation) {
  StudyConfig c;
  c.min_level = 5;
  c.max_level = 4;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.domain = Domain::LShape;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.reference = ReferenceSpec::finemesh(c.max_level + 1);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.reference = ReferenceSpec::finemesh(c.max_level + 2);
  EXPECT_NO_THROW(c.validate());
  c.gamma = 7;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Study, GammaZeroIsDegenerate) {
  StudyConfig c;
  c.gamma = 0;
  c.min_level = 2;
  c.max_level = 5;
  const StudyResult r = run_study(c);
  for (const auto& rec : r.records) EXPECT_EQ(rec.E_volume, 0.0);
  EXPECT_FALSE(r.volume_rate.has_value());
  EXPECT_NE(r.rate_note.find("volume"), std::string::npos);
}

TEST(Study, GammaOneGivesFiniteSlopes) {
  StudyConfig c;
  c.gamma = 1;
  c.min_level = 2;
  c.max_level = 5;
  const StudyResult r = run_study(c);
  ASSERT_TRUE(r.volume_rate && r.boundary_rate);
  EXPECT_TRUE(std::isfinite(r.volume_rate->slope));
  EXPECT_TRUE(std::isfinite(r.boundary_rate->slope));
}

TEST(Study, RecordsAndMonotoneError) {
  StudyConfig c;
  c.min_level = 2;
  c.max_level = 5;
  const StudyResult r = run_study(c);
  ASSERT_EQ(r.records.size(), 4u);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    EXPECT_EQ(r.records[i].level, 2 + static_cast<int>(i));
    EXPECT_NEAR(r.records[i].h, std::sqrt(2.0) / std::pow(2.0, 3 + i), 1e-15);
    if (i > 0) {
      EXPECT_LT(r.records[i].E_volume, r.records[i - 1].E_volume);
      EXPECT_LT(r.records[i].lambda_h, r.records[i - 1].lambda_h);
    }
  }
  EXPECT_EQ(r.volume_values.size(), 4u);
  EXPECT_EQ(r.volume_values[0].size(), 20u);
}

TEST(Study, SharedGammasMatchSeparateRuns) {
  StudyConfig c;
  c.min_level = 2;
  c.max_level = 4;
  const int g[2] = {2, 3};
  const auto both = run_study_gammas(c, g);
  c.gamma = 2;
  const StudyResult two = run_study(c);
  for (std::size_t i = 0; i < two.records.size(); ++i) {
    EXPECT_DOUBLE_EQ(both[0].records[i].E_volume, two.records[i].E_volume);
    EXPECT_DOUBLE_EQ(both[0].records[i].E_boundary, two.records[i].E_boundary);
  }
}

TEST(Study, AnalyticVersusFineMeshReference) {
  StudyConfig c;
  c.min_level = 2;
  c.max_level = 5;
  const StudyResult a = run_study(c);
  c.reference = ReferenceSpec::finemesh(7);
  const StudyResult f = run_study(c);
  ASSERT_TRUE(a.volume_rate && f.volume_rate && a.boundary_rate && f.boundary_rate);
  EXPECT_NEAR(a.volume_rate->slope, f.volume_rate->slope, 0.1);
  EXPECT_NEAR(a.boundary_rate->slope, f.boundary_rate->slope, 0.1);
}

TEST(Study, ErrorsCarryLevel) {
  StudyConfig c;
  c.min_level = 1;
  c.max_level = 3;
  c.solver.max_runs = 0;
  try {
    run_study(c);
    FAIL() << "expected NonConvergence";
  } catch (const NonConvergence& e) {
    EXPECT_NE(std::string(e.what()).find("level 1"), std::string::npos);
  }
}
