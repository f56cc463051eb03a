#include "cagecap/convex_hull.hpp"

#include <algorithm>
#include <map>

#include "cagecap/errors.hpp"

namespace cagecap {

namespace {

constexpr double kPlaneEps = 1e-12;

double orient(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& p) {
  return (b - a).cross(c - a).dot(p - a);
}

struct Face {
  std::array<std::size_t, 3> v;
  bool alive = true;
};

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> edges_of(
    std::span<const std::array<std::size_t, 3>> triangles) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) {
      const std::size_t a = t[k];
      const std::size_t b = t[(k + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

HullMesh convex_hull(std::span<const Vec3> pts) {
  const std::size_t n = pts.size();
  if (n < 4) throw GeometryError("convex hull needs at least four points");

  // Seed tetrahedron: 0, the farthest point from 0, the point farthest from that
  // line, and the point farthest from that plane.
  std::size_t i1 = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if ((pts[i] - pts[0]).squared_norm() > (pts[i1] - pts[0]).squared_norm()) i1 = i;
  }
  if ((pts[i1] - pts[0]).squared_norm() < kPlaneEps) throw GeometryError("all points coincide");
  std::size_t i2 = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (pts[i1] - pts[0]).cross(pts[i] - pts[0]).squared_norm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (best < kPlaneEps) throw GeometryError("all points are collinear");
  std::size_t i3 = 0;
  best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(orient(pts[0], pts[i1], pts[i2], pts[i]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (best < kPlaneEps) throw GeometryError("all points are coplanar");

  std::vector<Face> faces;
  auto add_face = [&](std::size_t a, std::size_t b, std::size_t c, const Vec3& inside) {
    if (orient(pts[a], pts[b], pts[c], inside) > 0.0) std::swap(b, c);
    faces.push_back({{a, b, c}});
  };
  const Vec3 centroid = (pts[0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  add_face(0, i1, i2, centroid);
  add_face(0, i1, i3, centroid);
  add_face(0, i2, i3, centroid);
  add_face(i1, i2, i3, centroid);

  for (std::size_t p = 0; p < n; ++p) {
    if (p == 0 || p == i1 || p == i2 || p == i3) continue;
    // Directed edges of visible faces; a horizon edge is one whose twin is not visible.
    std::map<std::pair<std::size_t, std::size_t>, int> visible_edges;
    bool any = false;
    for (auto& f : faces) {
      if (!f.alive) continue;
      if (orient(pts[f.v[0]], pts[f.v[1]], pts[f.v[2]], pts[p]) > kPlaneEps) {
        f.alive = false;
        any = true;
        for (int k = 0; k < 3; ++k) visible_edges[{f.v[k], f.v[(k + 1) % 3]}] = 1;
      }
    }
    if (!any) continue;
    for (const auto& [edge, unused] : visible_edges) {
      if (visible_edges.count({edge.second, edge.first})) continue;
      faces.push_back({{edge.first, edge.second, p}});
    }
    std::erase_if(faces, [](const Face& f) { return !f.alive; });
  }

  HullMesh mesh;
  for (const auto& f : faces) mesh.triangles.push_back(f.v);
  std::sort(mesh.triangles.begin(), mesh.triangles.end());
  mesh.edges = edges_of(mesh.triangles);
  return mesh;
}

}  // namespace cagecap
