#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "smoothcontact/errors.hpp"

namespace smoothcontact {

using Vec2 = Eigen::Vector2d;

// Contact surface of a body: ordered boundary vertices with outward unit
// vertex normals. Solid boundaries are oriented counter-clockwise, so the
// outward normal of a segment (a, b) is the tangent rotated by -90 degrees.
struct Polyline {
  std::vector<Vec2> vertices;
  std::vector<Vec2> normals;  // empty until computed
  bool closed = false;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int segment_count() const {
    const int n = vertex_count();
    return closed ? n : n - 1;
  }
  // Vertex indices (a, b) of segment s.
  std::array<int, 2> segment(int s) const {
    const int n = vertex_count();
    return {s, (s + 1) % n};
  }
  bool has_normals() const { return normals.size() == vertices.size(); }

  // Throws GeometryError on duplicate consecutive vertices or, when normals
  // are present, non-unit normals.
  void validate() const;
};

struct PointSegmentResult {
  double distance;
  Vec2 closest;
  double bary;  // closest = a + bary * (b - a), bary in [0, 1]
};

// Distance from p to segment [a, b], with closest point and clamped
// barycentric coordinate. Throws GeometryError for |b - a| < 1e-12.
PointSegmentResult point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

// Length-weighted vertex normals: at each vertex the sum of adjacent segment
// normals weighted by segment length, normalized. Equals the rotated chord
// between the two neighbors. Throws GeometryError when the weighted sum is
// degenerate (opposed segment normals).
Polyline vertex_normals(const Polyline& poly);

// Indices i with |x - vertex_i| < R, ascending. Uses a uniform grid with cell
// size R; the contract is defined by the linear scan.
std::vector<int> support_query(const Polyline& poly, const Vec2& x, double R);

// Grid accelerator for repeated support queries against one polyline.
class SupportGrid {
 public:
  SupportGrid(const Polyline& poly, double R);
  std::vector<int> query(const Vec2& x) const;

 private:
  const Polyline& poly_;
  double R_;
  double inv_cell_;
  std::vector<std::pair<std::int64_t, int>> cells_;  // (cell key, vertex id), sorted
  std::int64_t key(double px, double py) const;
};

// Triangle mesh in 2D with its extracted boundary loop.
struct TriMesh2D {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;

  double signed_area(int tri) const;
  double total_area() const;
  void validate() const;  // positive triangle areas

  // Ordered boundary loop (mesh vertex ids), oriented CCW for positively
  // oriented triangles. Throws GeometryError if the boundary is not a single
  // closed loop.
  std::vector<int> boundary_loop() const;
  Polyline boundary() const;  // positions + outward normals of the loop
};

// Boundary polyline of a mesh at arbitrary vertex positions (same topology as
// the rest mesh); loop is the result of boundary_loop().
Polyline boundary_polyline_at(const std::vector<int>& loop, const Eigen::VectorXd& positions);

}  // namespace smoothcontact
