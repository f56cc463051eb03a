#include "cagecap/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "cagecap/errors.hpp"
#include "text_util.hpp"

namespace cagecap {

CostMatrix::CostMatrix(std::size_t agents, std::size_t slots, std::vector<double> values)
    : agents_(agents), slots_(slots), values_(std::move(values)) {
  if (values_.size() != agents * slots) throw ParameterError("cost matrix shape mismatch");
  for (double v : values_) {
    if (std::isnan(v) || v < 0.0) throw ParameterError("costs must be non-negative numbers");
  }
}

std::vector<std::size_t> Assignment::agent_to_slot(std::size_t agents) const {
  std::vector<std::size_t> out(agents, npos);
  for (std::size_t s = 0; s < slot_to_agent.size(); ++s) out[slot_to_agent[s]] = s;
  return out;
}

double travel_time(const Vec3& from, const Vec3& to, double v_p) {
  if (std::isnan(v_p) || v_p < 0.0) throw ParameterError("vehicle speed must be non-negative");
  const double d = distance(from, to);
  if (d == 0.0) return 0.0;
  if (v_p == 0.0) return std::numeric_limits<double>::infinity();
  return d / v_p;
}

CostMatrix travel_costs(std::span<const Vec3> agents, std::span<const Vec3> slots, double v_p) {
  CostMatrix m(agents.size(), slots.size());
  for (std::size_t a = 0; a < agents.size(); ++a) {
    for (std::size_t s = 0; s < slots.size(); ++s) m(a, s) = travel_time(agents[a], slots[s], v_p);
  }
  return m;
}

namespace {

// Kuhn's augmenting-path matching restricted to costs <= threshold.
class ThresholdMatcher {
 public:
  ThresholdMatcher(const CostMatrix& costs, double threshold)
      : costs_(costs),
        threshold_(threshold),
        agent_slot_(costs.agents(), Assignment::npos),
        slot_agent_(costs.slots(), Assignment::npos) {}

  bool saturate_slots() {
    for (std::size_t s = 0; s < costs_.slots(); ++s) {
      visited_.assign(costs_.agents(), 0);
      if (!augment(s)) return false;
    }
    return true;
  }

  const std::vector<std::size_t>& slot_agent() const { return slot_agent_; }

 private:
  bool augment(std::size_t slot) {
    for (std::size_t a = 0; a < costs_.agents(); ++a) {
      if (visited_[a] || costs_(a, slot) > threshold_) continue;
      visited_[a] = 1;
      if (agent_slot_[a] == Assignment::npos || augment(agent_slot_[a])) {
        agent_slot_[a] = slot;
        slot_agent_[slot] = a;
        return true;
      }
    }
    return false;
  }

  const CostMatrix& costs_;
  double threshold_;
  std::vector<std::size_t> agent_slot_;
  std::vector<std::size_t> slot_agent_;
  std::vector<char> visited_;
};

}  // namespace

bool has_saturating_matching(const CostMatrix& costs, double threshold) {
  if (costs.agents() < costs.slots()) return false;
  return ThresholdMatcher(costs, threshold).saturate_slots();
}

Assignment solve_lbap(const CostMatrix& costs) {
  if (costs.agents() < costs.slots()) throw InsufficientAgents(costs.agents(), costs.slots());
  Assignment result;
  if (costs.slots() == 0) return result;

  std::vector<double> levels = costs.values();
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // The largest level is always feasible: a complete bipartite graph with
  // agents >= slots has a saturating matching.
  std::size_t lo = 0;
  std::size_t hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (has_saturating_matching(costs, levels[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  ThresholdMatcher matcher(costs, levels[lo]);
  matcher.saturate_slots();
  result.slot_to_agent = matcher.slot_agent();
  result.bottleneck = 0.0;
  for (std::size_t s = 0; s < costs.slots(); ++s) {
    result.bottleneck = std::max(result.bottleneck, costs(result.slot_to_agent[s], s));
  }
  return result;
}

Reachability is_reachable_cage(std::span<const Vec3> agents, std::span<const Vec3> slots,
                               double v_p, double deadline) {
  if (!(deadline >= 0.0)) throw ParameterError("deadline must be non-negative");
  Reachability r;
  r.assignment = solve_lbap(travel_costs(agents, slots, v_p));
  r.reachable = r.assignment.bottleneck <= deadline;
  return r;
}

void write_assignment_csv(std::ostream& os, const Assignment& assignment, const CostMatrix& costs) {
  os << "agent,slot,cost,bottleneck\n";
  for (std::size_t s = 0; s < assignment.slot_to_agent.size(); ++s) {
    const std::size_t a = assignment.slot_to_agent[s];
    const double c = costs(a, s);
    os << a << ',' << s << ',' << detail::fmt_double(c) << ',' << (c == assignment.bottleneck ? 1 : 0)
       << '\n';
  }
}

}  // namespace cagecap
