#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cagecap/bathymetry.hpp"
#include "cagecap/geometry.hpp"

namespace cagecap {

// Fixed-point resolution used by the flow solver: one unit is 1e-6 m^2.
inline constexpr double kCostScale = 1e6;

std::int64_t scale_cost(double cost_m2);

struct GridEdge {
  std::size_t a = 0;  // a < b, 4-adjacent cell indices
  std::size_t b = 0;
  double cost = 0.0;  // m^2
};

// 4-connected grid graph over every map cell with barrier-area edge costs.
class BarrierGraph {
 public:
  BarrierGraph(int width, int height, double cell_size, std::vector<GridEdge> edges,
               std::vector<std::size_t> sources, std::vector<std::size_t> sinks);

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  std::size_t vertex_count() const { return static_cast<std::size_t>(width_) * height_; }
  const std::vector<GridEdge>& edges() const { return edges_; }
  const std::vector<std::size_t>& sources() const { return sources_; }
  const std::vector<std::size_t>& sinks() const { return sinks_; }

 private:
  int width_;
  int height_;
  double cell_size_;
  std::vector<GridEdge> edges_;
  std::vector<std::size_t> sources_;
  std::vector<std::size_t> sinks_;
};

// Edge area |v_i - v_j| (D(v_i) + D(v_j)) / 2 for two 4-adjacent cells.
double edge_cost(const DepthMap& map, std::size_t a, std::size_t b);

// Grid edges in row-major order (right neighbour, then lower neighbour) for a
// width x height lattice.
std::vector<GridEdge> grid_edges(int width, int height);

BarrierGraph build_barrier_graph(const DepthMap& map, std::span<const std::size_t> contaminated);

enum class Side : std::uint8_t { Source, Sink };

struct CutResult {
  std::vector<GridEdge> cut_edges;
  double total_cost = 0.0;        // sum of member edge costs, m^2
  std::int64_t total_scaled = 0;  // same sum in fixed-point units, equals the max flow
  std::int64_t max_flow = 0;      // value returned by the flow solver
  std::vector<Side> side_labels;  // per vertex
};

// Minimum-cost edge set separating every source vertex from every sink vertex,
// via shortest-augmenting-path max-flow on fixed-point capacities. The source
// side is the set of vertices residual-reachable from the sources.
CutResult min_cut(const BarrierGraph& graph);

// Source-side water area in m^2; the containing cage's volume proxy.
double enclosed_area(const CutResult& cut, const DepthMap& map);

// Vertical rectangle from the surface down to `depth` whose horizontal trace
// runs from base_start to base_end.
struct BarrierSegment {
  Vec2 base_start;
  Vec2 base_end;
  double depth = 0.0;

  double width() const { return (base_end - base_start).norm(); }
  double area() const { return width() * depth; }
  // Horizontal unit normal (left of the trace direction). Segments produced by
  // cut_to_barrier_segments are oriented so it points out of the cage.
  Vec2 normal() const;
  // Euclidean distance from a 3D point to the closed rectangle.
  double distance_to(const Vec3& p) const;
};

// One wall per nonzero-cost cut edge: the shared border of the two cells,
// extending down to the mean depth under the edge. Land-land edges are dropped.
std::vector<BarrierSegment> cut_to_barrier_segments(const CutResult& cut, const DepthMap& map);

// CSV: cell_a,cell_b,col_a,row_a,col_b,row_b,cost
void write_cut_csv(std::ostream& os, const CutResult& cut, int width);
// CSV of wall traces: x0,y0,x1,y1,depth
void write_segments_csv(std::ostream& os, std::span<const BarrierSegment> segments);
std::vector<BarrierSegment> read_segments_csv(std::istream& is);

}  // namespace cagecap
