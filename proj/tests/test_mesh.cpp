#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "eigshape/mesh.hpp"

using namespace eigshape;

TEST(Generate, SquareLevelOneCounts) {
  const Mesh m = generate(Domain::UnitSquare, 1);
  EXPECT_EQ(m.vertex_count(), 25u);
  EXPECT_EQ(m.triangle_count(), 32u);
  EXPECT_NEAR(m.h(), std::sqrt(2.0) / 4.0, 1e-15);
}

TEST(Generate, SquareLevelSevenMeshSize) {
  EXPECT_NEAR(generate(Domain::UnitSquare, 7).h(), std::sqrt(2.0) / 256.0, 1e-15);
}

TEST(Generate, SquareCountsAllLevels) {
  for (int level = 0; level <= 5; ++level) {
    const Mesh m = generate(Domain::UnitSquare, level);
    const std::size_t n = std::size_t{1} << (level + 1);
    EXPECT_EQ(m.vertex_count(), (n + 1) * (n + 1));
    EXPECT_EQ(m.triangle_count(), 2 * n * n);
  }
}

TEST(Generate, LShapeArea) {
  EXPECT_NEAR(generate(Domain::LShape, 0).total_area(), 3.0, 1e-12);
  EXPECT_NEAR(generate(Domain::LShape, 4).total_area(), 3.0, 1e-12);
}

TEST(Generate, DiskCoarseIsOctagonFan) {
  const Mesh m = generate(Domain::UnitDisk, 0);
  EXPECT_EQ(m.vertex_count(), 9u);
  EXPECT_EQ(m.triangle_count(), 8u);
  EXPECT_NEAR(m.total_area(), 2.0 * std::sqrt(2.0), 1e-14);
}

TEST(Generate, RejectsBadLevel) {
  EXPECT_THROW(generate(Domain::UnitSquare, -1), std::invalid_argument);
  EXPECT_THROW(generate(Domain::UnitSquare, 13), std::invalid_argument);
}

TEST(ParseDomain, NamesAndErrors) {
  EXPECT_EQ(parse_domain("square"), Domain::UnitSquare);
  EXPECT_EQ(parse_domain("disk"), Domain::UnitDisk);
  EXPECT_EQ(parse_domain("lshape"), Domain::LShape);
  EXPECT_THROW(parse_domain("triangle"), std::invalid_argument);
}

TEST(Refine, Quadrisection) {
  const Mesh m = generate(Domain::UnitSquare, 1);
  const Mesh r = refine(m);
  EXPECT_EQ(r.triangle_count(), 128u);
  EXPECT_EQ(r.level(), 2);
  EXPECT_EQ(r.domain(), Domain::UnitSquare);
}

TEST(Refine, DiskBoundaryOnCircle) {
  for (int level = 0; level <= 5; ++level) {
    const Mesh m = generate(Domain::UnitDisk, level);
    for (const auto& e : m.boundary_edges())
      for (int v : e.v) EXPECT_NEAR(m.vertices()[v].norm(), 1.0, 1e-14);
  }
}

TEST(Refine, MeshSizeHalves) {
  // the disk's coarse octagon is pre-asymptotic; ratios settle from level 3
  for (Domain d : {Domain::UnitSquare, Domain::LShape, Domain::UnitDisk}) {
    Mesh m = generate(d, 3);
    for (int level = 4; level <= 7; ++level) {
      const Mesh r = refine(m);
      const double ratio = r.h() / m.h();
      if (d == Domain::UnitDisk) {
        EXPECT_NEAR(ratio, 0.5, 0.01) << to_string(d) << " level " << level;
      } else {
        EXPECT_DOUBLE_EQ(ratio, 0.5);
      }
      m = r;
    }
  }
}

TEST(Refine, OldBoundaryVerticesStayOnBoundary) {
  for (Domain d : {Domain::UnitSquare, Domain::LShape, Domain::UnitDisk}) {
    const Mesh m = generate(d, 2);
    const Mesh r = refine(m);
    for (std::size_t v = 0; v < m.vertex_count(); ++v) {
      EXPECT_EQ((r.vertices()[v] - m.vertices()[v]).norm(), 0.0);
      EXPECT_EQ(r.is_boundary_vertex(static_cast<int>(v)), m.is_boundary_vertex(static_cast<int>(v)));
    }
  }
}

TEST(Invariants, EulerCharacteristic) {
  for (Domain d : {Domain::UnitSquare, Domain::LShape, Domain::UnitDisk})
    for (int level = 0; level <= 5; ++level) {
      const Mesh m = generate(d, level);
      EXPECT_EQ(static_cast<long>(m.vertex_count()) - static_cast<long>(m.edge_count()) +
                    static_cast<long>(m.triangle_count()),
                1)
          << to_string(d) << " level " << level;
    }
}

TEST(Invariants, PositiveOrientation) {
  for (Domain d : {Domain::UnitSquare, Domain::LShape, Domain::UnitDisk})
    for (int level = 0; level <= 4; ++level) {
      const Mesh m = generate(d, level);
      for (std::size_t t = 0; t < m.triangle_count(); ++t) ASSERT_GT(m.signed_area(m.triangles()[t]), 0.0);
    }
}

TEST(Invariants, SquareBoundaryLength) {
  for (int level = 0; level <= 6; ++level)
    EXPECT_NEAR(generate(Domain::UnitSquare, level).boundary_length(), 4.0, 1e-12);
  EXPECT_NEAR(generate(Domain::LShape, 3).boundary_length(), 8.0, 1e-12);
}

TEST(Invariants, QuasiUniform) {
  for (Domain d : {Domain::UnitSquare, Domain::LShape, Domain::UnitDisk}) {
    const Mesh m = generate(d, 5);
    EXPECT_GE(m.min_diameter() / m.h(), 0.3) << to_string(d);
  }
}

TEST(Invariants, BoundaryEdgesAreCounterClockwise) {
  for (Domain d : {Domain::UnitSquare, Domain::LShape, Domain::UnitDisk}) {
    const Mesh m = generate(d, 3);
    double signed_sum = 0.0;
    for (const auto& e : m.boundary_edges()) {
      const Vec2 a = m.vertices()[e.v[0]], b = m.vertices()[e.v[1]];
      signed_sum += a.x() * b.y() - a.y() * b.x();
    }
    EXPECT_NEAR(0.5 * signed_sum, m.total_area(), 1e-12);
  }
}

TEST(Normals, SquareSides) {
  const Mesh m = generate(Domain::UnitSquare, 2);
  bool bottom = false, right = false;
  for (std::size_t i = 0; i < m.boundary_edges().size(); ++i) {
    const auto& e = m.boundary_edges()[i];
    const Vec2 mid = 0.5 * (m.vertices()[e.v[0]] + m.vertices()[e.v[1]]);
    const Vec2 n = boundary_normal(m, i);
    if (std::abs(mid.y()) < 1e-15) {
      EXPECT_NEAR((n - Vec2(0, -1)).norm(), 0.0, 1e-15);
      bottom = true;
    }
    if (std::abs(mid.x() - 1.0) < 1e-15) {
      EXPECT_NEAR((n - Vec2(1, 0)).norm(), 0.0, 1e-15);
      right = true;
    }
  }
  EXPECT_TRUE(bottom);
  EXPECT_TRUE(right);
}

TEST(Normals, DiskFacetsAlignWithRadius) {
  for (int level = 3; level <= 5; ++level) {
    const Mesh m = generate(Domain::UnitDisk, level);
    for (std::size_t i = 0; i < m.boundary_edges().size(); ++i) {
      const auto& e = m.boundary_edges()[i];
      const Vec2 mid = 0.5 * (m.vertices()[e.v[0]] + m.vertices()[e.v[1]]);
      EXPECT_GE(boundary_normal(m, i).dot(mid.normalized()), 0.999);
    }
  }
}

TEST(Normals, Errors) {
  const Mesh m = generate(Domain::UnitSquare, 1);
  EXPECT_THROW(boundary_normal(m, m.boundary_edges().size()), std::out_of_range);
  // an interior edge of the level-1 square: (1,1) - (2,2) grid vertices
  int interior = -1;
  for (std::size_t v = 0; v < m.vertex_count(); ++v)
    if (!m.is_boundary_vertex(static_cast<int>(v))) interior = static_cast<int>(v);
  ASSERT_GE(interior, 0);
  const auto& tri = m.triangles()[0];
  EXPECT_THROW(boundary_normal(m, interior, tri[0] == interior ? tri[1] : tri[0]),
               std::invalid_argument);
}

TEST(WriteMesh, Format) {
  const Mesh m = generate(Domain::UnitSquare, 0);
  std::ostringstream os;
  write_mesh(os, m);
  std::istringstream in(os.str());
  std::string w1, w2;
  std::size_t nv = 0, nt = 0;
  in >> w1 >> nv >> w2 >> nt;
  EXPECT_EQ(w1, "vertices");
  EXPECT_EQ(w2, "triangles");
  EXPECT_EQ(nv, m.vertex_count());
  EXPECT_EQ(nt, m.triangle_count());
}
