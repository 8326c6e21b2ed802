#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "../vendor/doctest.h"

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "smoothcontact/geometry.hpp"

using namespace smoothcontact;

namespace {

Polyline open_polyline(std::vector<Vec2> verts) {
  Polyline p;
  p.vertices = std::move(verts);
  return p;
}

Polyline closed_polyline(std::vector<Vec2> verts) {
  Polyline p = open_polyline(std::move(verts));
  p.closed = true;
  return p;
}

}  // namespace

TEST_CASE("point-segment distance: perpendicular foot at the midpoint") {
  const auto r = point_segment_distance({0, 1}, {-1, 0}, {1, 0});
  CHECK(r.distance == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.closest.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.closest.y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.bary == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("point-segment distance: clamps to the nearest endpoint") {
  const auto r = point_segment_distance({2, 0}, {-1, 0}, {1, 0});
  CHECK(r.distance == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.closest.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.closest.y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.bary == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("point-segment distance matches brute-force minimization") {
  const Vec2 p(0.3, 0.4), a(0, 0), b(1, 0);
  const auto r = point_segment_distance(p, a, b);

  double best = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  const int n = 1000000;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double d = (p - (a + t * (b - a))).norm();
    if (d < best) {
      best = d;
      best_t = t;
    }
  }
  CHECK(r.distance == doctest::Approx(best).epsilon(1e-9));
  CHECK(r.bary == doctest::Approx(best_t).epsilon(1e-5));
  CHECK(r.distance == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r.closest.x() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("point-segment distance rejects degenerate segments") {
  CHECK_THROWS_AS(point_segment_distance({0, 0}, {1, 1}, {1, 1}), GeometryError);
}

TEST_CASE("point-segment distance is 1-Lipschitz in the query point") {
  for (int trial = 0; trial < 200; ++trial) {
    const Vec2 a(testutil::uniform(-2, 2), testutil::uniform(-2, 2));
    Vec2 b(testutil::uniform(-2, 2), testutil::uniform(-2, 2));
    if ((b - a).norm() < 1e-6) b += Vec2(1, 0);
    const Vec2 p(testutil::uniform(-3, 3), testutil::uniform(-3, 3));
    const Vec2 delta(testutil::uniform(-1e-3, 1e-3), testutil::uniform(-1e-3, 1e-3));
    const double d0 = point_segment_distance(p, a, b).distance;
    const double d1 = point_segment_distance(p + delta, a, b).distance;
    CHECK(std::abs(d1 - d0) <= delta.norm() + 1e-12);
  }
}

TEST_CASE("vertex normals: collinear segments give the shared perpendicular") {
  // Traversal is right-to-left so the outward side (tangent rotated -90
  // degrees) is up.
  const Polyline p = vertex_normals(open_polyline({{1, 0}, {0, 0}, {-1, 0}}));
  REQUIRE(p.has_normals());
  CHECK(p.normals[1].x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.normals[1].y() == doctest::Approx(1.0).epsilon(1e-12));
  p.validate();
}

TEST_CASE("vertex normals: square corner gets the outward bisector") {
  const Polyline square =
      vertex_normals(closed_polyline({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  const double s = std::sqrt(2.0) / 2.0;
  CHECK(square.normals[0].x() == doctest::Approx(-s).epsilon(1e-12));
  CHECK(square.normals[0].y() == doctest::Approx(-s).epsilon(1e-12));
  // Same corner as the interior triple of an open boundary piece.
  const Polyline piece = vertex_normals(open_polyline({{0, 1}, {0, 0}, {1, 0}}));
  CHECK(piece.normals[1].x() == doctest::Approx(-s).epsilon(1e-12));
  CHECK(piece.normals[1].y() == doctest::Approx(-s).epsilon(1e-12));
}

TEST_CASE("vertex normals: regular octagon normals are radial") {
  std::vector<Vec2> verts;
  Vec2 centroid(0.3, -0.2);
  for (int i = 0; i < 8; ++i) {
    const double ang = 2.0 * M_PI * i / 8.0;
    verts.push_back(centroid + 1.7 * Vec2(std::cos(ang), std::sin(ang)));
  }
  const Polyline oct = vertex_normals(closed_polyline(verts));
  for (int i = 0; i < 8; ++i) {
    const Vec2 radial = (oct.vertices[i] - centroid).normalized();
    CHECK((oct.normals[i] - radial).norm() < 1e-12);
  }
}

TEST_CASE("vertex normals rotate with rigid transformations") {
  std::vector<Vec2> verts;
  for (int i = 0; i < 12; ++i)
    verts.emplace_back(0.5 * i + testutil::uniform(-0.1, 0.1),
                       testutil::uniform(-0.3, 0.3));
  const Polyline base = vertex_normals(open_polyline(verts));

  const double ang = 0.73;
  Eigen::Rotation2Dd rot(ang);
  const Vec2 t(1.5, -2.25);
  std::vector<Vec2> moved;
  for (const Vec2& v : verts) moved.push_back(rot * v + t);
  const Polyline xformed = vertex_normals(open_polyline(moved));

  for (int i = 0; i < base.vertex_count(); ++i)
    CHECK((xformed.normals[i] - rot * base.normals[i]).norm() < 1e-10);
}

TEST_CASE("vertex normals reject opposed adjacent segments") {
  // Doubling back makes the length-weighted sum vanish at the middle vertex.
  CHECK_THROWS_AS(vertex_normals(open_polyline({{0, 0}, {1, 0}, {0, 0}})),
                  GeometryError);
}

TEST_CASE("polyline validation rejects duplicate consecutive vertices") {
  CHECK_THROWS_AS(open_polyline({{0, 0}, {0, 0}, {1, 0}}).validate(), GeometryError);
}

TEST_CASE("support query: unit-spaced line") {
  std::vector<Vec2> verts;
  for (int i = 0; i < 11; ++i) verts.emplace_back(static_cast<double>(i), 0.0);
  const Polyline line = open_polyline(verts);

  CHECK(support_query(line, {5, 0}, 1.5) == std::vector<int>{4, 5, 6});
  CHECK(support_query(line, {5.25, 2.0}, 0.5).empty());
}

TEST_CASE("support query matches the linear-scan oracle") {
  std::vector<Vec2> verts;
  for (int i = 0; i < 100; ++i)
    verts.emplace_back(testutil::uniform(-1, 1), testutil::uniform(-1, 1));
  // Keep consecutive vertices distinct.
  for (size_t i = 1; i < verts.size(); ++i)
    if ((verts[i] - verts[i - 1]).norm() < 1e-9) verts[i] += Vec2(0.01, 0);
  const Polyline cloud = open_polyline(verts);
  const double R = 0.3;
  const SupportGrid grid(cloud, R);

  for (int trial = 0; trial < 50; ++trial) {
    const Vec2 x(testutil::uniform(-1.2, 1.2), testutil::uniform(-1.2, 1.2));
    std::vector<int> oracle;
    for (int i = 0; i < cloud.vertex_count(); ++i)
      if ((x - cloud.vertices[i]).norm() < R) oracle.push_back(i);
    CHECK(support_query(cloud, x, R) == oracle);
    CHECK(grid.query(x) == oracle);
  }
}

TEST_CASE("triangle mesh: areas, validation, boundary loop") {
  TriMesh2D mesh;
  mesh.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
  mesh.validate();
  CHECK(mesh.signed_area(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mesh.total_area() == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<int> loop = mesh.boundary_loop();
  REQUIRE(loop.size() == 4);
  // Each boundary edge appears exactly once and the loop is CCW.
  double twice_area = 0.0;
  for (size_t i = 0; i < loop.size(); ++i) {
    const Vec2& a = mesh.vertices[loop[i]];
    const Vec2& b = mesh.vertices[loop[(i + 1) % loop.size()]];
    twice_area += a.x() * b.y() - b.x() * a.y();
  }
  CHECK(twice_area == doctest::Approx(2.0).epsilon(1e-12));

  const Polyline boundary = mesh.boundary();
  REQUIRE(boundary.closed);
  REQUIRE(boundary.has_normals());
  boundary.validate();
  Vec2 centroid(0.5, 0.5);
  for (int i = 0; i < boundary.vertex_count(); ++i)
    CHECK(boundary.normals[i].dot(boundary.vertices[i] - centroid) > 0.0);
}

TEST_CASE("triangle mesh validation rejects inverted rest triangles") {
  TriMesh2D mesh;
  mesh.vertices = {{0, 0}, {1, 0}, {0, 1}};
  mesh.triangles = {{0, 2, 1}};  // clockwise: negative area
  CHECK_THROWS_AS(mesh.validate(), GeometryError);
}

TEST_CASE("boundary polyline tracks deformed positions") {
  TriMesh2D mesh;
  mesh.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
  const std::vector<int> loop = mesh.boundary_loop();

  Eigen::VectorXd positions(8);
  for (int v = 0; v < 4; ++v) {
    positions[2 * v] = mesh.vertices[v].x() + 2.0;
    positions[2 * v + 1] = mesh.vertices[v].y() - 1.0;
  }
  const Polyline moved = boundary_polyline_at(loop, positions);
  REQUIRE(moved.closed);
  REQUIRE(moved.has_normals());
  for (size_t i = 0; i < loop.size(); ++i) {
    const Vec2 expect = mesh.vertices[loop[i]] + Vec2(2.0, -1.0);
    CHECK((moved.vertices[i] - expect).norm() < 1e-14);
  }
}
