#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "cagecap/geometry.hpp"

namespace cagecap {

// Travel times in seconds, one row per agent and one column per slot.
class CostMatrix {
 public:
  CostMatrix(std::size_t agents, std::size_t slots, std::vector<double> values);
  CostMatrix(std::size_t agents, std::size_t slots) : CostMatrix(agents, slots, std::vector<double>(agents * slots, 0.0)) {}

  std::size_t agents() const { return agents_; }
  std::size_t slots() const { return slots_; }
  double operator()(std::size_t agent, std::size_t slot) const { return values_[agent * slots_ + slot]; }
  double& operator()(std::size_t agent, std::size_t slot) { return values_[agent * slots_ + slot]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t agents_;
  std::size_t slots_;
  std::vector<double> values_;
};

struct Assignment {
  std::vector<std::size_t> slot_to_agent;
  double bottleneck = 0.0;

  // Slot held by each agent, or npos for unassigned agents.
  std::vector<std::size_t> agent_to_slot(std::size_t agents) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Straight-line distance / v_p. An immobile fleet (v_p == 0) needs infinite time
// to go anywhere else.
double travel_time(const Vec3& from, const Vec3& to, double v_p);

CostMatrix travel_costs(std::span<const Vec3> agents, std::span<const Vec3> slots, double v_p);

// Linear bottleneck assignment: minimise the largest assigned cost. Binary
// search over the sorted distinct costs with a bipartite matching feasibility
// test at each threshold. The returned mapping is the first matching found when
// slots and agents are scanned in index order.
Assignment solve_lbap(const CostMatrix& costs);

// Whether every slot is saturated by a matching that only uses costs <= threshold.
bool has_saturating_matching(const CostMatrix& costs, double threshold);

struct Reachability {
  bool reachable = false;
  Assignment assignment;
};

// Closed inequality: reachable iff the bottleneck travel time <= deadline.
Reachability is_reachable_cage(std::span<const Vec3> agents, std::span<const Vec3> slots,
                               double v_p, double deadline);

// CSV: agent,slot,cost,bottleneck
void write_assignment_csv(std::ostream& os, const Assignment& assignment, const CostMatrix& costs);

}  // namespace cagecap
