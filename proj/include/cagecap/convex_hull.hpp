#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cagecap/geometry.hpp"

namespace cagecap {

struct HullMesh {
  // Outward-facing triangles (counter-clockwise seen from outside).
  std::vector<std::array<std::size_t, 3>> triangles;
  // Unique undirected edges, (i, j) with i < j, sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

// Incremental 3D convex hull. Throws GeometryError for fewer than four points or
// an all-coplanar input. Points that end up strictly inside (or flat on) the hull
// are simply not referenced by any triangle.
HullMesh convex_hull(std::span<const Vec3> points);

std::vector<std::pair<std::size_t, std::size_t>> edges_of(
    std::span<const std::array<std::size_t, 3>> triangles);

}  // namespace cagecap
