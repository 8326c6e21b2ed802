#include "smoothcontact/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

namespace smoothcontact {

namespace {
constexpr double kDegenerate = 1e-12;
}

void Polyline::validate() const {
  const int n = vertex_count();
  if (n < 2) throw GeometryError("polyline needs at least 2 vertices");
  for (int s = 0; s < segment_count(); ++s) {
    const auto [a, b] = segment(s);
    if ((vertices[b] - vertices[a]).norm() <= kDegenerate)
      throw GeometryError("degenerate segment");
  }
  if (!normals.empty()) {
    if (!has_normals()) throw GeometryError("normal count mismatch");
    for (const Vec2& nrm : normals)
      if (std::abs(nrm.norm() - 1.0) > kDegenerate) throw GeometryError("non-unit normal");
  }
}

PointSegmentResult point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 e = b - a;
  const double len2 = e.squaredNorm();
  if (len2 < kDegenerate * kDegenerate) throw GeometryError("degenerate segment");
  double bary = (p - a).dot(e) / len2;
  bary = std::clamp(bary, 0.0, 1.0);
  const Vec2 closest = a + bary * e;
  return {(p - closest).norm(), closest, bary};
}

Polyline vertex_normals(const Polyline& poly) {
  poly.validate();
  const int n = poly.vertex_count();
  Polyline out = poly;
  out.normals.resize(n);
  for (int i = 0; i < n; ++i) {
    // Length-weighted sum of adjacent segment normals = rotated chord.
    Vec2 chord;
    if (poly.closed) {
      chord = poly.vertices[(i + 1) % n] - poly.vertices[(i + n - 1) % n];
    } else if (i == 0) {
      chord = poly.vertices[1] - poly.vertices[0];
    } else if (i == n - 1) {
      chord = poly.vertices[n - 1] - poly.vertices[n - 2];
    } else {
      chord = poly.vertices[i + 1] - poly.vertices[i - 1];
    }
    const Vec2 weighted(chord.y(), -chord.x());
    const double len = weighted.norm();
    if (len < kDegenerate) throw GeometryError("degenerate vertex normal");
    out.normals[i] = weighted / len;
  }
  return out;
}

SupportGrid::SupportGrid(const Polyline& poly, double R) : poly_(poly), R_(R) {
  if (R <= 0) throw GeometryError("support radius must be positive");
  inv_cell_ = 1.0 / R;
  cells_.reserve(poly.vertices.size());
  for (int i = 0; i < poly.vertex_count(); ++i) {
    const Vec2& v = poly.vertices[i];
    cells_.emplace_back(key(v.x(), v.y()), i);
  }
  std::sort(cells_.begin(), cells_.end());
}

std::int64_t SupportGrid::key(double px, double py) const {
  const auto cx = static_cast<std::int64_t>(std::floor(px * inv_cell_));
  const auto cy = static_cast<std::int64_t>(std::floor(py * inv_cell_));
  return (cx << 32) ^ (cy & 0xffffffffll);
}

std::vector<int> SupportGrid::query(const Vec2& x) const {
  std::vector<int> result;
  const double R2 = R_ * R_;
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      const std::int64_t k = key(x.x() + dx * R_, x.y() + dy * R_);
      auto it = std::lower_bound(cells_.begin(), cells_.end(), std::make_pair(k, -1));
      for (; it != cells_.end() && it->first == k; ++it) {
        if ((poly_.vertices[it->second] - x).squaredNorm() < R2) result.push_back(it->second);
      }
    }
  }
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

std::vector<int> support_query(const Polyline& poly, const Vec2& x, double R) {
  return SupportGrid(poly, R).query(x);
}

double TriMesh2D::signed_area(int tri) const {
  const auto& t = triangles[tri];
  const Vec2 e1 = vertices[t[1]] - vertices[t[0]];
  const Vec2 e2 = vertices[t[2]] - vertices[t[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double TriMesh2D::total_area() const {
  double a = 0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) a += signed_area(t);
  return a;
}

void TriMesh2D::validate() const {
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t)
    if (signed_area(t) <= 0) throw GeometryError("non-positive triangle area");
}

std::vector<int> TriMesh2D::boundary_loop() const {
  // Boundary edges appear in exactly one triangle; keep triangle orientation.
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      auto key = std::minmax(a, b);
      count[{key.first, key.second}]++;
    }
  }
  std::map<int, int> next;  // directed boundary edge a -> b
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      auto key = std::minmax(a, b);
      if (count[{key.first, key.second}] == 1) {
        if (next.count(a)) throw GeometryError("non-manifold boundary");
        next[a] = b;
      }
    }
  }
  if (next.empty()) throw GeometryError("mesh has no boundary");
  std::vector<int> loop;
  const int start = next.begin()->first;
  int cur = start;
  do {
    loop.push_back(cur);
    auto it = next.find(cur);
    if (it == next.end()) throw GeometryError("open boundary chain");
    cur = it->second;
  } while (cur != start && loop.size() <= next.size());
  if (cur != start || loop.size() != next.size())
    throw GeometryError("boundary is not a single closed loop");
  return loop;
}

Polyline TriMesh2D::boundary() const {
  const std::vector<int> loop = boundary_loop();
  Polyline poly;
  poly.closed = true;
  poly.vertices.reserve(loop.size());
  for (int v : loop) poly.vertices.push_back(vertices[v]);
  return vertex_normals(poly);
}

Polyline boundary_polyline_at(const std::vector<int>& loop, const Eigen::VectorXd& positions) {
  Polyline poly;
  poly.closed = true;
  poly.vertices.reserve(loop.size());
  for (int v : loop) poly.vertices.emplace_back(positions[2 * v], positions[2 * v + 1]);
  return vertex_normals(poly);
}

}  // namespace smoothcontact
