#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "cagecap/assignment.hpp"
#include "cagecap/errors.hpp"
#include "oracles.hpp"

using namespace cagecap;

namespace {

double attained(const CostMatrix& c, const Assignment& a) {
  double worst = 0.0;
  for (std::size_t s = 0; s < a.slot_to_agent.size(); ++s) worst = std::max(worst, c(a.slot_to_agent[s], s));
  return worst;
}

CostMatrix random_matrix(std::mt19937_64& rng, std::size_t agents, std::size_t slots) {
  std::uniform_int_distribution<int> v(0, 50);
  CostMatrix c(agents, slots);
  for (std::size_t a = 0; a < agents; ++a) {
    for (std::size_t s = 0; s < slots; ++s) c(a, s) = v(rng);
  }
  return c;
}

}  // namespace

TEST_CASE("travel time") {
  CHECK(travel_time({1, 2, 3}, {1, 2, 3}, 2.0) == 0.0);
  CHECK(travel_time({0, 0, 0}, {100, 0, 0}, 2.0) == doctest::Approx(50.0));
  CHECK(travel_time({1, 5, -2}, {7, -3, 4}, 1.5) == travel_time({7, -3, 4}, {1, 5, -2}, 1.5));
  CHECK(std::isinf(travel_time({0, 0, 0}, {1, 0, 0}, 0.0)));
  CHECK(travel_time({0, 0, 0}, {0, 0, 0}, 0.0) == 0.0);
  CHECK_THROWS_AS(travel_time({0, 0, 0}, {1, 0, 0}, -1.0), ParameterError);
}

TEST_CASE("cost matrix validation") {
  CHECK_THROWS_AS(CostMatrix(2, 2, {1, 2, 3}), ParameterError);
  CHECK_THROWS_AS(CostMatrix(1, 1, {-1}), ParameterError);
  CHECK_THROWS_AS(CostMatrix(1, 1, {NAN}), ParameterError);
  CHECK_NOTHROW(CostMatrix(1, 1, {INFINITY}));
}

TEST_CASE("lbap small cases") {
  const CostMatrix forced(2, 2, {1, 1e9, 1e9, 3});
  const auto a = solve_lbap(forced);
  CHECK(a.bottleneck == 3.0);
  CHECK(a.slot_to_agent == std::vector<std::size_t>{0, 1});

  const CostMatrix cross(2, 2, {1, 2, 2, 10});
  const auto b = solve_lbap(cross);
  CHECK(b.bottleneck == 2.0);
  CHECK(b.slot_to_agent == std::vector<std::size_t>{1, 0});
  CHECK(b.agent_to_slot(2) == std::vector<std::size_t>{1, 0});

  CHECK_THROWS_AS(solve_lbap(CostMatrix(1, 2, {1, 1})), InsufficientAgents);
  const auto empty = solve_lbap(CostMatrix(3, 0, {}));
  CHECK(empty.slot_to_agent.empty());
  CHECK(empty.bottleneck == 0.0);
}

TEST_CASE("lbap extra agents stay unassigned") {
  const CostMatrix c(3, 1, {5, 1, 7});
  const auto a = solve_lbap(c);
  CHECK(a.bottleneck == 1.0);
  CHECK(a.agent_to_slot(3) == std::vector<std::size_t>{Assignment::npos, 0, Assignment::npos});
}

TEST_CASE("lbap matches permutation brute force") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t slots = 1 + trial % 6;
    const std::size_t agents = slots + trial % 2;
    const auto c = random_matrix(rng, agents, slots);
    const auto a = solve_lbap(c);
    CHECK(a.bottleneck == oracle::lbap(c));
    CHECK(attained(c, a) == a.bottleneck);
    std::set<std::size_t> used(a.slot_to_agent.begin(), a.slot_to_agent.end());
    CHECK(used.size() == slots);
  }
}

TEST_CASE("lbap threshold tightness") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_matrix(rng, 6, 5);
    const auto a = solve_lbap(c);
    CHECK(has_saturating_matching(c, a.bottleneck));
    double next_lower = -1.0;
    for (double v : c.values()) {
      if (v < a.bottleneck) next_lower = std::max(next_lower, v);
    }
    if (next_lower >= 0.0) CHECK_FALSE(has_saturating_matching(c, next_lower));
  }
}

TEST_CASE("lbap monotone in agents and scale equivariant") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_matrix(rng, 5, 5);
    const auto base = solve_lbap(c);
    std::vector<double> v = c.values();
    for (std::size_t s = 0; s < 5; ++s) v.push_back(static_cast<double>(rng() % 60));
    const auto more = solve_lbap(CostMatrix(6, 5, v));
    CHECK(more.bottleneck <= base.bottleneck);

    CostMatrix scaled = c;
    for (std::size_t a = 0; a < 5; ++a) {
      for (std::size_t s = 0; s < 5; ++s) scaled(a, s) = 2.5 * c(a, s);
    }
    const auto sa = solve_lbap(scaled);
    CHECK(sa.bottleneck == doctest::Approx(2.5 * base.bottleneck));
    CHECK(attained(scaled, sa) == sa.bottleneck);
  }
}

TEST_CASE("reachability") {
  const std::vector<Vec3> at{{0, 0, 0}, {5, 5, -5}};
  CHECK(is_reachable_cage(at, at, 1.0, 0.0).reachable);
  const std::vector<Vec3> agent{{0, 0, 0}};
  const std::vector<Vec3> slot{{100, 0, 0}};
  CHECK_FALSE(is_reachable_cage(agent, slot, 2.0, 49.0).reachable);
  const auto exact = is_reachable_cage(agent, slot, 2.0, 50.0);
  CHECK(exact.reachable);
  CHECK(exact.assignment.bottleneck == 50.0);
  CHECK_THROWS_AS(is_reachable_cage(agent, slot, 2.0, -1.0), ParameterError);
  CHECK_THROWS_AS(is_reachable_cage(agent, std::vector<Vec3>{{1, 0, 0}, {2, 0, 0}}, 1.0, 5.0), InsufficientAgents);
}

TEST_CASE("assignment CSV") {
  const CostMatrix c(2, 2, {1, 2, 2, 10});
  std::ostringstream os;
  write_assignment_csv(os, solve_lbap(c), c);
  CHECK(os.str() == "agent,slot,cost,bottleneck\n1,0,2,1\n0,1,2,1\n");
}
