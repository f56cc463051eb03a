#include "cagecap/graphcut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>

#include "cagecap/errors.hpp"
#include "text_util.hpp"

namespace cagecap {

std::int64_t scale_cost(double cost_m2) {
  return static_cast<std::int64_t>(std::llround(cost_m2 * kCostScale));
}

BarrierGraph::BarrierGraph(int width, int height, double cell_size, std::vector<GridEdge> edges,
                           std::vector<std::size_t> sources, std::vector<std::size_t> sinks)
    : width_(width),
      height_(height),
      cell_size_(cell_size),
      edges_(std::move(edges)),
      sources_(std::move(sources)),
      sinks_(std::move(sinks)) {
  if (width < 2 || height < 2) throw ParameterError("barrier graph needs at least 2x2 cells");
  const std::size_t n = vertex_count();
  for (const auto& e : edges_) {
    if (e.a >= n || e.b >= n || e.a == e.b) throw ParameterError("edge endpoint out of range");
    if (!(e.cost >= 0.0) || !std::isfinite(e.cost)) {
      throw ParameterError("edge costs must be finite and non-negative");
    }
  }
  std::sort(sources_.begin(), sources_.end());
  sources_.erase(std::unique(sources_.begin(), sources_.end()), sources_.end());
  std::sort(sinks_.begin(), sinks_.end());
  sinks_.erase(std::unique(sinks_.begin(), sinks_.end()), sinks_.end());
  if (sources_.empty()) throw ParameterError("barrier graph needs at least one source vertex");
  if (sinks_.empty()) throw ParameterError("barrier graph needs at least one sink vertex");
  for (std::size_t v : sources_) {
    if (v >= n) throw ParameterError("source vertex out of range");
    if (std::binary_search(sinks_.begin(), sinks_.end(), v)) {
      throw ContainmentImpossible("a contaminated vertex is also a sink vertex");
    }
  }
  for (std::size_t v : sinks_) {
    if (v >= n) throw ParameterError("sink vertex out of range");
  }
}

double edge_cost(const DepthMap& map, std::size_t a, std::size_t b) {
  return map.cell_size() * (map.depth(a) + map.depth(b)) / 2.0;
}

std::vector<GridEdge> grid_edges(int width, int height) {
  std::vector<GridEdge> edges;
  edges.reserve(static_cast<std::size_t>(2) * width * height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * width + c;
      if (c + 1 < width) edges.push_back({i, i + 1, 0.0});
      if (r + 1 < height) edges.push_back({i, i + width, 0.0});
    }
  }
  return edges;
}

BarrierGraph build_barrier_graph(const DepthMap& map, std::span<const std::size_t> contaminated) {
  if (contaminated.empty()) throw ParameterError("contaminated cell set is empty");
  for (std::size_t v : contaminated) {
    if (v >= map.cell_count()) throw ParameterError("contaminated cell out of range");
    if (map.on_boundary(map.cell(v))) {
      throw ContainmentImpossible("contaminated cell on the map boundary");
    }
  }
  auto edges = grid_edges(map.width(), map.height());
  for (auto& e : edges) e.cost = edge_cost(map, e.a, e.b);
  std::vector<std::size_t> sinks;
  for (std::size_t i = 0; i < map.cell_count(); ++i) {
    if (map.on_boundary(map.cell(i))) sinks.push_back(i);
  }
  return BarrierGraph(map.width(), map.height(), map.cell_size(), std::move(edges),
                      {contaminated.begin(), contaminated.end()}, std::move(sinks));
}

namespace {

// Residual network for Edmonds-Karp. Arcs are stored in pairs (arc ^ 1 is the reverse).
class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t n) : head_(n, kNone) {}

  void add_arc_pair(std::size_t u, std::size_t v, std::int64_t cap_uv, std::int64_t cap_vu) {
    push(u, v, cap_uv);
    push(v, u, cap_vu);
  }

  std::int64_t max_flow(std::size_t s, std::size_t t) {
    std::int64_t total = 0;
    const std::size_t n = head_.size();
    std::vector<std::size_t> parent_arc(n);
    std::vector<char> seen(n);
    while (true) {
      std::fill(seen.begin(), seen.end(), 0);
      std::queue<std::size_t> q;
      q.push(s);
      seen[s] = 1;
      while (!q.empty() && !seen[t]) {
        const std::size_t u = q.front();
        q.pop();
        for (std::size_t a : adjacency(u)) {
          const std::size_t v = to_[a];
          if (!seen[v] && cap_[a] > 0) {
            seen[v] = 1;
            parent_arc[v] = a;
            q.push(v);
          }
        }
      }
      if (!seen[t]) break;
      std::int64_t push_amount = std::numeric_limits<std::int64_t>::max();
      for (std::size_t v = t; v != s; v = to_[parent_arc[v] ^ 1]) {
        push_amount = std::min(push_amount, cap_[parent_arc[v]]);
      }
      for (std::size_t v = t; v != s; v = to_[parent_arc[v] ^ 1]) {
        cap_[parent_arc[v]] -= push_amount;
        cap_[parent_arc[v] ^ 1] += push_amount;
      }
      total += push_amount;
    }
    return total;
  }

  std::vector<char> residual_reachable(std::size_t s) const {
    std::vector<char> seen(head_.size(), 0);
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t a : adjacency(u)) {
        if (!seen[to_[a]] && cap_[a] > 0) {
          seen[to_[a]] = 1;
          q.push(to_[a]);
        }
      }
    }
    return seen;
  }

  // Arcs out of u sorted by target vertex so search order favours low indices.
  const std::vector<std::size_t>& adjacency(std::size_t u) const { return sorted_[u]; }

  void finalize() {
    sorted_.assign(head_.size(), {});
    for (std::size_t u = 0; u < head_.size(); ++u) {
      for (std::size_t a = head_[u]; a != kNone; a = next_[a]) sorted_[u].push_back(a);
      std::sort(sorted_[u].begin(), sorted_[u].end(),
                [&](std::size_t x, std::size_t y) { return to_[x] < to_[y]; });
    }
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  void push(std::size_t u, std::size_t v, std::int64_t cap) {
    to_.push_back(v);
    cap_.push_back(cap);
    next_.push_back(head_[u]);
    head_[u] = to_.size() - 1;
  }

  std::vector<std::size_t> head_;
  std::vector<std::size_t> next_;
  std::vector<std::size_t> to_;
  std::vector<std::int64_t> cap_;
  std::vector<std::vector<std::size_t>> sorted_;
};

}  // namespace

CutResult min_cut(const BarrierGraph& graph) {
  const std::size_t n = graph.vertex_count();
  const std::size_t source = n;
  const std::size_t sink = n + 1;
  constexpr std::int64_t kInfinite = std::numeric_limits<std::int64_t>::max() / 4;

  FlowNetwork net(n + 2);
  for (const auto& e : graph.edges()) {
    const std::int64_t cap = scale_cost(e.cost);
    net.add_arc_pair(e.a, e.b, cap, cap);
  }
  for (std::size_t v : graph.sources()) net.add_arc_pair(source, v, kInfinite, 0);
  for (std::size_t v : graph.sinks()) net.add_arc_pair(v, sink, kInfinite, 0);
  net.finalize();

  CutResult result;
  result.max_flow = net.max_flow(source, sink);
  const auto reach = net.residual_reachable(source);
  result.side_labels.resize(n);
  for (std::size_t v = 0; v < n; ++v) result.side_labels[v] = reach[v] ? Side::Source : Side::Sink;
  for (const auto& e : graph.edges()) {
    if (result.side_labels[e.a] != result.side_labels[e.b]) {
      result.cut_edges.push_back(e);
      result.total_cost += e.cost;
      result.total_scaled += scale_cost(e.cost);
    }
  }
  return result;
}

double enclosed_area(const CutResult& cut, const DepthMap& map) {
  std::size_t cells = 0;
  for (std::size_t v = 0; v < cut.side_labels.size(); ++v) {
    if (cut.side_labels[v] == Side::Source && !map.is_land(v)) ++cells;
  }
  return static_cast<double>(cells) * map.cell_size() * map.cell_size();
}

Vec2 BarrierSegment::normal() const {
  const Vec2 d = base_end - base_start;
  const double len = d.norm();
  return {-d.y / len, d.x / len};
}

double BarrierSegment::distance_to(const Vec3& p) const {
  const Vec2 d = base_end - base_start;
  const double len2 = d.x * d.x + d.y * d.y;
  const Vec2 rel = p.horizontal() - base_start;
  const double t = std::clamp((rel.x * d.x + rel.y * d.y) / len2, 0.0, 1.0);
  const Vec2 foot = base_start + t * d;
  const double z = std::clamp(p.z, -depth, 0.0);
  const Vec3 nearest{foot.x, foot.y, z};
  return distance(p, nearest);
}

std::vector<BarrierSegment> cut_to_barrier_segments(const CutResult& cut, const DepthMap& map) {
  std::vector<BarrierSegment> segments;
  const double cs = map.cell_size();
  for (const auto& e : cut.cut_edges) {
    if (!(e.cost > 0.0)) continue;
    const Cell a = map.cell(e.a);
    const Cell b = map.cell(e.b);
    BarrierSegment s;
    s.depth = (map.depth(e.a) + map.depth(e.b)) / 2.0;
    if (a.row == b.row) {
      const double x = std::max(a.col, b.col) * cs;
      s.base_start = {x, a.row * cs};
      s.base_end = {x, (a.row + 1) * cs};
    } else {
      const double y = std::max(a.row, b.row) * cs;
      s.base_start = {a.col * cs, y};
      s.base_end = {(a.col + 1) * cs, y};
    }
    // Orient the trace so normal() faces the sink (exterior) side.
    const bool a_inside = cut.side_labels[e.a] == Side::Source;
    const Vec2 outward = a_inside ? map.cell_center(b) - map.cell_center(a)
                                  : map.cell_center(a) - map.cell_center(b);
    const Vec2 n = s.normal();
    if (n.x * outward.x + n.y * outward.y < 0.0) std::swap(s.base_start, s.base_end);
    segments.push_back(s);
  }
  return segments;
}

void write_cut_csv(std::ostream& os, const CutResult& cut, int width) {
  os << "cell_a,cell_b,col_a,row_a,col_b,row_b,cost\n";
  for (const auto& e : cut.cut_edges) {
    os << e.a << ',' << e.b << ',' << e.a % width << ',' << e.a / width << ',' << e.b % width
       << ',' << e.b / width << ',' << detail::fmt_double(e.cost) << '\n';
  }
}

void write_segments_csv(std::ostream& os, std::span<const BarrierSegment> segments) {
  using detail::fmt_double;
  os << "x0,y0,x1,y1,depth\n";
  for (const auto& s : segments) {
    os << fmt_double(s.base_start.x) << ',' << fmt_double(s.base_start.y) << ','
       << fmt_double(s.base_end.x) << ',' << fmt_double(s.base_end.y) << ','
       << fmt_double(s.depth) << '\n';
  }
}

std::vector<BarrierSegment> read_segments_csv(std::istream& is) {
  std::vector<BarrierSegment> out;
  for (const auto& f : detail::read_csv_rows(is, 5)) {
    using detail::to_double;
    out.push_back({{to_double(f[0]), to_double(f[1])}, {to_double(f[2]), to_double(f[3])},
                   to_double(f[4])});
  }
  return out;
}

}  // namespace cagecap
