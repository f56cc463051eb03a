#include <doctest.h>

#include <cmath>
#include <queue>
#include <random>
#include <sstream>

#include "cagecap/bathymetry.hpp"
#include "cagecap/errors.hpp"
#include "cagecap/graphcut.hpp"
#include "oracles.hpp"

using namespace cagecap;

namespace {

DepthMap uniform(int w, int h, double cs, double depth) {
  return DepthMap(w, h, cs, std::vector<double>(static_cast<std::size_t>(w) * h, depth));
}

// BFS over non-cut edges from the sources; true when a sink is reached.
bool leaks(const BarrierGraph& g, const CutResult& cut) {
  std::vector<std::vector<std::size_t>> adj(g.vertex_count());
  for (const auto& e : g.edges()) {
    const bool removed = std::any_of(cut.cut_edges.begin(), cut.cut_edges.end(),
                                     [&](const GridEdge& c) { return c.a == e.a && c.b == e.b; });
    if (removed) continue;
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::vector<char> seen(g.vertex_count(), 0);
  std::queue<std::size_t> q;
  for (auto s : g.sources()) {
    seen[s] = 1;
    q.push(s);
  }
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (auto w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        q.push(w);
      }
    }
  }
  return std::any_of(g.sinks().begin(), g.sinks().end(), [&](std::size_t t) { return seen[t] != 0; });
}

}  // namespace

TEST_CASE("edge costs") {
  const auto one = uniform(5, 5, 1.0, 1.0);
  const auto g = build_barrier_graph(one, std::vector<std::size_t>{12});
  for (const auto& e : g.edges()) CHECK(e.cost == 1.0);

  DepthMap two(2, 2, 10.0, {2.0, 4.0, 0.0, 0.0});
  CHECK(edge_cost(two, 0, 1) == doctest::Approx(30.0));
  CHECK(edge_cost(two, 2, 3) == 0.0);
  CHECK(edge_cost(two, 0, 2) == doctest::Approx(10.0));
}

TEST_CASE("grid edges are 4-connected") {
  const auto edges = grid_edges(4, 3);
  CHECK(edges.size() == 3u * 3 + 4u * 2);
  for (const auto& e : edges) {
    CHECK(e.a < e.b);
    CHECK((e.b - e.a == 1 || e.b - e.a == 4));
  }
}

TEST_CASE("build_barrier_graph pins and errors") {
  const auto map = uniform(5, 5, 1.0, 1.0);
  const auto g = build_barrier_graph(map, std::vector<std::size_t>{12});
  CHECK(g.sinks().size() == 16);
  CHECK(g.sources() == std::vector<std::size_t>{12});
  CHECK_THROWS_AS(build_barrier_graph(map, std::vector<std::size_t>{0}), ContainmentImpossible);
  CHECK_THROWS_AS(build_barrier_graph(map, std::vector<std::size_t>{}), ParameterError);
  CHECK_THROWS_AS(build_barrier_graph(map, std::vector<std::size_t>{99}), ParameterError);
}

TEST_CASE("single contaminated centre cell costs its four edges") {
  const auto map = uniform(5, 5, 1.0, 1.0);
  const auto g = build_barrier_graph(map, std::vector<std::size_t>{12});
  const auto cut = min_cut(g);
  CHECK(cut.total_cost == doctest::Approx(4.0));
  CHECK(cut.cut_edges.size() == 4);
  CHECK(cut.total_scaled == cut.max_flow);
  CHECK(cut.total_scaled == oracle::min_cut(g));
  CHECK_FALSE(leaks(g, cut));
}

TEST_CASE("land ring gives a free cut") {
  // every cell but the centre is land, so the cut can run land-to-land
  std::vector<double> d(25, 0.0);
  d[12] = 1.0;
  const DepthMap map(5, 5, 1.0, d);
  const auto g = build_barrier_graph(map, std::vector<std::size_t>{12});
  const auto cut = min_cut(g);
  CHECK(cut.total_cost == 0.0);
  CHECK_FALSE(leaks(g, cut));
  // no wall is needed anywhere
  CHECK(cut_to_barrier_segments(cut, map).empty());
}

TEST_CASE("min cut matches exhaustive bipartition on 4x4 grids") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> cost(0, 9);
  std::uniform_int_distribution<std::size_t> cell(0, 15);
  for (int trial = 0; trial < 20; ++trial) {
    auto edges = grid_edges(4, 4);
    for (auto& e : edges) e.cost = cost(rng);
    std::vector<std::size_t> sources{cell(rng)};
    std::size_t t = cell(rng);
    while (t == sources[0]) t = cell(rng);
    std::vector<std::size_t> sinks{t};
    const BarrierGraph g(4, 4, 1.0, edges, sources, sinks);
    const auto cut = min_cut(g);
    CHECK(cut.total_scaled == oracle::min_cut(g));
    CHECK(cut.total_scaled == cut.max_flow);
    CHECK_FALSE(leaks(g, cut));
    double sum = 0.0;
    for (const auto& e : cut.cut_edges) sum += e.cost;
    CHECK(sum == cut.total_cost);
  }
}

TEST_CASE("side labels agree with cut edges") {
  const auto map = generate_depth_map(5, 16, 16, 10.0, 1.0, 5.0);
  std::vector<std::size_t> src;
  for (int r = 9; r <= 11; ++r) {
    for (int c = 3; c <= 5; ++c) {
      if (!map.is_land(map.index({c, r}))) src.push_back(map.index({c, r}));
    }
  }
  REQUIRE_FALSE(src.empty());
  const auto g = build_barrier_graph(map, src);
  const auto cut = min_cut(g);
  for (const auto& e : g.edges()) {
    const bool crosses = cut.side_labels[e.a] != cut.side_labels[e.b];
    const bool listed = std::any_of(cut.cut_edges.begin(), cut.cut_edges.end(),
                                    [&](const GridEdge& c) { return c.a == e.a && c.b == e.b; });
    CHECK(crosses == listed);
  }
  for (auto s : g.sources()) CHECK(cut.side_labels[s] == Side::Source);
  for (auto t : g.sinks()) CHECK(cut.side_labels[t] == Side::Sink);
  CHECK_FALSE(leaks(g, cut));
}

TEST_CASE("min cut is deterministic") {
  const auto map = generate_depth_map(9, 24, 24, 10.0, 1.0, 15.0);
  std::vector<std::size_t> src;
  for (int c = 10; c < 14; ++c) {
    if (!map.is_land(map.index({c, 12}))) src.push_back(map.index({c, 12}));
  }
  REQUIRE_FALSE(src.empty());
  const auto g = build_barrier_graph(map, src);
  const auto a = min_cut(g);
  const auto b = min_cut(g);
  REQUIRE(a.cut_edges.size() == b.cut_edges.size());
  for (std::size_t i = 0; i < a.cut_edges.size(); ++i) {
    CHECK(a.cut_edges[i].a == b.cut_edges[i].a);
    CHECK(a.cut_edges[i].b == b.cut_edges[i].b);
  }
  CHECK(a.side_labels == b.side_labels);
}

TEST_CASE("barrier segments") {
  const auto map = uniform(5, 5, 10.0, 5.0);
  const auto cut = min_cut(build_barrier_graph(map, std::vector<std::size_t>{12}));
  const auto segs = cut_to_barrier_segments(cut, map);
  REQUIRE(segs.size() == 4);
  double area = 0.0;
  for (const auto& s : segs) {
    CHECK(s.width() == doctest::Approx(10.0));
    CHECK(s.depth == 5.0);
    area += s.area();
    // outward normal points away from the enclosed cell
    const Vec2 out = 0.5 * (s.base_start + s.base_end) - Vec2{25.0, 25.0};
    CHECK(s.normal().x * out.x + s.normal().y * out.y > 0.0);
  }
  CHECK(area == doctest::Approx(cut.total_cost));
  CHECK(enclosed_area(cut, map) == doctest::Approx(100.0));
}

TEST_CASE("land-land cut edges are dropped from the barrier") {
  // column of land splits the source from the left side; cheapest cut uses it
  std::vector<double> d(49, 10.0);
  for (int r = 0; r < 7; ++r) d[r * 7 + 2] = 0.0;
  for (int r = 0; r < 7; ++r) d[r * 7 + 1] = 0.0;
  const DepthMap map(7, 7, 1.0, d);
  const auto g = build_barrier_graph(map, std::vector<std::size_t>{24});
  const auto cut = min_cut(g);
  const auto segs = cut_to_barrier_segments(cut, map);
  std::size_t zero = 0;
  for (const auto& e : cut.cut_edges) zero += e.cost == 0.0 ? 1 : 0;
  CHECK(segs.size() == cut.cut_edges.size() - zero);
  double area = 0.0;
  for (const auto& s : segs) area += s.area();
  CHECK(area == doctest::Approx(cut.total_cost));
}

TEST_CASE("segment distance") {
  const BarrierSegment s{{0, 0}, {10, 0}, 5};
  CHECK(s.distance_to({5, 3, -2}) == doctest::Approx(3.0));
  CHECK(s.distance_to({-3, 0, -2}) == doctest::Approx(3.0));
  CHECK(s.distance_to({5, 0, -9}) == doctest::Approx(4.0));
  CHECK(s.distance_to({5, 0, -1}) == 0.0);
}

TEST_CASE("cut and segment CSV") {
  const auto map = uniform(6, 6, 2.0, 3.0);
  const auto cut = min_cut(build_barrier_graph(map, std::vector<std::size_t>{14, 15}));
  std::ostringstream os;
  write_cut_csv(os, cut, map.width());
  CHECK(os.str().rfind("cell_a,cell_b,col_a,row_a,col_b,row_b,cost\n", 0) == 0);

  const auto segs = cut_to_barrier_segments(cut, map);
  std::stringstream ss;
  write_segments_csv(ss, segs);
  const auto back = read_segments_csv(ss);
  REQUIRE(back.size() == segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    CHECK(back[i].base_start.x == segs[i].base_start.x);
    CHECK(back[i].base_end.y == segs[i].base_end.y);
    CHECK(back[i].depth == segs[i].depth);
  }
}
