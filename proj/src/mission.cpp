#include "cagecap/mission.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <sstream>

#include "cagecap/errors.hpp"
#include "text_util.hpp"

namespace cagecap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArrivalTol = 1e-9;

std::string kv(const std::string& key, double value) { return key + "=" + detail::fmt_double(value); }

std::string join(std::initializer_list<std::string> parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ';';
    out += p;
  }
  return out;
}

std::vector<Vec3> positions_of(const std::vector<AuvPose>& poses) {
  std::vector<Vec3> out;
  out.reserve(poses.size());
  for (const auto& p : poses) out.push_back(p.position);
  return out;
}

SphericalCage moved_to(const SphericalCage& cage, const Vec3& center) {
  SphericalCage out = cage;
  out.center = center;
  return out.rescaled(cage.radius);
}

double reach_of(const SensorModel& s) {
  return s.kind == SensorKind::Sphere ? s.r_s : std::hypot(s.h, s.r_s);
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Sighting: return "sighting";
    case EventKind::PlanContain: return "plan_contain";
    case EventKind::PlanCapture: return "plan_capture";
    case EventKind::Wait: return "wait";
    case EventKind::CageClosed: return "cage_closed";
    case EventKind::CageVerified: return "cage_verified";
    case EventKind::ShrinkStart: return "shrink_start";
    case EventKind::Captured: return "captured";
    case EventKind::Escaped: return "escaped";
    case EventKind::Exhausted: return "exhausted";
  }
  return "unknown";
}

EventKind event_kind_from_string(const std::string& name) {
  for (auto k : {EventKind::Sighting, EventKind::PlanContain, EventKind::PlanCapture, EventKind::Wait,
                 EventKind::CageClosed, EventKind::CageVerified, EventKind::ShrinkStart,
                 EventKind::Captured, EventKind::Escaped, EventKind::Exhausted}) {
    if (name == to_string(k)) return k;
  }
  throw ValidationError("unknown event kind '" + name + "'");
}

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Captured: return "captured";
    case Outcome::Contained: return "contained";
    case Outcome::Escaped: return "escaped";
    case Outcome::Exhausted: return "exhausted";
  }
  return "unknown";
}

void write_event_log(std::ostream& os, std::span<const Event> events) {
  os << "time,event_kind,payload\n";
  for (const auto& e : events) {
    os << detail::fmt_double(e.time) << ',' << to_string(e.kind) << ',' << e.payload << '\n';
  }
}

std::vector<Event> read_event_log(std::istream& is) {
  std::vector<Event> out;
  for (const auto& f : detail::read_csv_rows(is, 3)) {
    out.push_back({detail::to_double(f[0]), event_kind_from_string(f[1]), f[2]});
  }
  return out;
}

void MissionState::log(double time, EventKind kind, std::string payload) {
  if (!event_log.empty() && time < event_log.back().time) {
    throw TemporalOrderError("event log timestamps must be non-decreasing");
  }
  event_log.push_back({time, kind, std::move(payload)});
}

void PlannerConfig::validate() const {
  if (!(v_e >= 0.0) || !std::isfinite(v_e)) throw ParameterError("v_e must be finite and non-negative");
  if (!(v_p >= 0.0) || !std::isfinite(v_p)) throw ParameterError("v_p must be finite and non-negative");
  if (!(safety_margin >= 0.0 && safety_margin < 1.0)) {
    throw ParameterError("safety margin must lie in [0, 1)");
  }
  sensor.validate();
  capture.relax.validate();
}

Planner::Planner(std::shared_ptr<const DepthMap> map, PlannerConfig config)
    : map_(std::move(map)), config_(std::move(config)) {
  if (!map_) throw ParameterError("planner needs a map");
  config_.validate();
}

const CaptureCagePlan& Planner::unit_cage(std::size_t n) const {
  if (unit_cache_.size() <= n) unit_cache_.resize(n + 1);
  if (!unit_cache_[n]) {
    unit_cache_[n] = build_capture_cage(n, config_.sensor.r_s, {}, config_.seed, config_.capture);
  }
  return *unit_cache_[n];
}

std::optional<CapturingPlan> Planner::plan_capturing(const std::vector<AuvPose>& auvs,
                                                     const Sighting& sighting, double now) const {
  if (auvs.size() < 4) return std::nullopt;
  const CaptureCagePlan& unit = unit_cage(auvs.size());
  if (!unit.final_check.ok) return std::nullopt;

  CapturingPlan plan;
  plan.cage = moved_to(unit.cage, sighting.position);
  plan.slots = cone_poses(plan.cage, config_.sensor.h);
  for (std::size_t i = 0; i < plan.slots.size(); ++i) {
    if (!map_->in_free_space(plan.slots[i].position) || !map_->in_free_space(plan.cage.centers[i])) {
      return std::nullopt;
    }
  }
  plan.deadline = config_.v_e > 0.0
                      ? sighting.time + (1.0 - config_.safety_margin) * plan.cage.radius / config_.v_e
                      : kInf;
  plan.assignment = solve_lbap(travel_costs(positions_of(auvs), positions_of(plan.slots), config_.v_p));
  if (now + plan.assignment.bottleneck > plan.deadline) return std::nullopt;
  return plan;
}

std::vector<AuvPose> barrier_poses(const CoverSolution& cover, std::span<const BarrierSegment> segments,
                                   const SensorModel& sensor) {
  std::vector<AuvPose> poses;
  poses.reserve(cover.disc_centers.size());
  for (std::size_t i = 0; i < cover.disc_centers.size(); ++i) {
    const Vec2 n = segments[cover.segment_of_disc.at(i)].normal();
    const Vec3 outward{n.x, n.y, 0.0};
    poses.push_back({cover.disc_centers[i] + sensor.h * outward, -outward, sensor});
  }
  return poses;
}

ContainingPlan Planner::containing_plan_for_radius(const std::vector<AuvPose>& auvs,
                                                   const Sighting& sighting, double radius) const {
  const ContaminatedSet cs(sighting, config_.v_e, map_);
  ContainingPlan plan;
  plan.enclosure_radius = radius;
  plan.contaminated = cs.cells_within(radius);
  plan.cut = min_cut(build_barrier_graph(*map_, plan.contaminated));
  plan.segments = cut_to_barrier_segments(plan.cut, *map_);
  plan.cover = cover_barrier(plan.segments, config_.sensor.r_s);
  plan.slots = barrier_poses(plan.cover, plan.segments, config_.sensor);
  plan.area = enclosed_area(plan.cut, *map_);

  double nearest_wall = kInf;
  for (const auto& s : plan.segments) nearest_wall = std::min(nearest_wall, s.distance_to(sighting.position));
  plan.deadline = (config_.v_e > 0.0 && std::isfinite(nearest_wall))
                      ? sighting.time + (1.0 - config_.safety_margin) * nearest_wall / config_.v_e
                      : kInf;
  if (plan.slots.size() <= auvs.size()) {
    plan.assignment = solve_lbap(travel_costs(positions_of(auvs), positions_of(plan.slots), config_.v_p));
  } else {
    plan.assignment.bottleneck = kInf;
  }
  return plan;
}

std::optional<ContainingPlan> Planner::plan_containing(const std::vector<AuvPose>& auvs,
                                                       const Sighting& sighting, double now) const {
  for (std::size_t step = 0; step <= config_.max_enclosure_steps; ++step) {
    const double radius = static_cast<double>(step) * map_->cell_size();
    ContainingPlan plan;
    try {
      plan = containing_plan_for_radius(auvs, sighting, radius);
    } catch (const ContainmentImpossible&) {
      if (step == 0) throw;
      break;
    }
    if (plan.slots.size() <= auvs.size() && now + plan.assignment.bottleneck <= plan.deadline) {
      return plan;
    }
  }
  return std::nullopt;
}

Decision Planner::on_sighting(MissionState& state, const Sighting& sighting) const {
  if (state.contaminated && sighting.time < state.contaminated->origin().time) {
    throw TemporalOrderError("sighting precedes the previous sighting");
  }
  if (!map_->in_free_space(sighting.position)) throw ParameterError("sighting lies outside free space");
  const double now = std::max(state.clock, sighting.time);
  state.clock = now;
  const Vec3& p = sighting.position;
  state.log(now, EventKind::Sighting, join({kv("t_k", sighting.time), kv("x", p.x), kv("y", p.y), kv("z", p.z)}));
  state.contaminated.emplace(sighting, config_.v_e, map_);

  Decision d;
  if (auto capture = plan_capturing(state.auvs, sighting, now)) {
    const bool gap = std::holds_alternative<ActiveContaining>(state.active_cage);
    state.log(now, EventKind::PlanCapture,
              join({kv("n", static_cast<double>(capture->slots.size())), kv("radius", capture->cage.radius),
                    kv("bottleneck", capture->assignment.bottleneck), kv("deadline", capture->deadline),
                    kv("containment_gap", gap ? 1.0 : 0.0)}));
    d.kind = DecisionKind::GoCapture;
    d.capture = capture;
    state.active_cage = ActiveCapturing{*std::move(capture)};
    return d;
  }
  if (std::holds_alternative<ActiveCapturing>(state.active_cage)) {
    d.reason = "capturing cage already active";
  } else if (auto contain = plan_containing(state.auvs, sighting, now)) {
    const auto* active = std::get_if<ActiveContaining>(&state.active_cage);
    if (!active || contain->area < active->plan.area) {
      state.log(now, EventKind::PlanContain,
                join({kv("segments", static_cast<double>(contain->segments.size())),
                      kv("cut_edges", static_cast<double>(contain->cut.cut_edges.size())),
                      kv("auvs", static_cast<double>(contain->slots.size())), kv("area", contain->area),
                      kv("bottleneck", contain->assignment.bottleneck), kv("deadline", contain->deadline)}));
      d.kind = DecisionKind::GoContain;
      d.contain = contain;
      state.active_cage = ActiveContaining{*std::move(contain)};
      return d;
    }
    d.reason = "no smaller containing cage";
  } else {
    d.reason = "no reachable cage";
  }
  state.log(now, EventKind::Wait, "reason=" + d.reason);
  return d;
}

ShrinkPlan shrink_trajectories(const SphericalCage& cage, double h, double v_p, double shrink_speed,
                               double capture_radius, double timestep) {
  if (!(v_p > 0.0)) throw ParameterError("shrinking needs v_p > 0");
  if (!(timestep > 0.0)) throw ParameterError("timestep must be positive");
  if (!(capture_radius > 0.0)) throw ParameterError("capture radius must be positive");
  ShrinkPlan plan;
  plan.speed = shrink_speed > 0.0 ? std::min(v_p, shrink_speed) : v_p;
  plan.start_radius = cage.radius;
  plan.trajectories.resize(cage.size());
  if (cage.radius <= capture_radius) {
    plan.final_radius = cage.radius;
    return plan;
  }
  plan.final_radius = capture_radius;
  plan.duration = (cage.radius - capture_radius) / plan.speed;
  const auto steps = static_cast<std::size_t>(std::ceil(plan.duration / timestep - 1e-12));
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = std::min(plan.duration, static_cast<double>(k) * timestep);
    const double r = k == steps ? capture_radius : cage.radius - plan.speed * t;
    for (std::size_t i = 0; i < cage.size(); ++i) {
      plan.trajectories[i].push_back({t, cage.center + (r + h) * cage.unit_points[i]});
    }
  }
  return plan;
}

VoxelPartition::VoxelPartition(const DepthMap& map, std::span<const AuvPose> auvs)
    : map_(map), dz_(map.cell_size()) {
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  const std::size_t cells = map.cell_count();
  first_voxel_.assign(cells, npos);
  layers_.assign(cells, 0);
  for (std::size_t c = 0; c < cells; ++c) {
    const double d = map.depth(c);
    if (d <= 0.0) continue;
    layers_[c] = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(d / dz_ - 1e-12)));
    first_voxel_[c] = column_of_.size();
    for (std::size_t k = 0; k < layers_[c]; ++k) column_of_.push_back(c);
  }
  links_.resize(column_of_.size());

  double min_rs = kInf;
  for (const auto& a : auvs) min_rs = std::min(min_rs, a.sensor.r_s);
  const double spacing = auvs.empty() ? 1.0 : std::min({min_rs, dz_, map.cell_size()}) / 4.0;

  // A face is a rectangle origin + u*U + v*V, (u, v) in [0,1]^2.
  auto face_blocked = [&](const Vec3& origin, const Vec3& U, const Vec3& V) {
    if (auvs.empty()) return false;
    const Vec3 mid = origin + 0.5 * U + 0.5 * V;
    const double half_diag = 0.5 * (U + V).norm();
    std::vector<const AuvPose*> near;
    for (const auto& a : auvs) {
      if (distance(a.position, mid) <= reach_of(a.sensor) + half_diag + 1e-9) near.push_back(&a);
    }
    if (near.empty()) return false;
    const int nu = static_cast<int>(std::ceil(U.norm() / spacing)) + 1;
    const int nv = static_cast<int>(std::ceil(V.norm() / spacing)) + 1;
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nv; ++j) {
        const Vec3 p = origin + (static_cast<double>(i) / (nu - 1)) * U + (static_cast<double>(j) / (nv - 1)) * V;
        const bool covered =
            std::any_of(near.begin(), near.end(), [&](const AuvPose* a) { return in_sensor_volume(*a, p); });
        if (!covered) return false;
      }
    }
    return true;
  };
  auto connect = [&](std::size_t a, std::size_t b, bool blocked) {
    links_[a].push_back({b, blocked});
    links_[b].push_back({a, blocked});
    if (blocked) ++blocked_count_;
  };

  const double cs = map.cell_size();
  for (std::size_t c = 0; c < cells; ++c) {
    if (!layers_[c]) continue;
    const Cell cell = map.cell(c);
    const double x0 = cell.col * cs;
    const double y0 = cell.row * cs;
    for (std::size_t k = 0; k < layers_[c]; ++k) {
      const std::size_t v = first_voxel_[c] + k;
      const double z_top = -static_cast<double>(k) * dz_;
      if (k + 1 < layers_[c]) {
        const double z = -static_cast<double>(k + 1) * dz_;
        connect(v, v + 1, face_blocked({x0, y0, z}, {cs, 0, 0}, {0, cs, 0}));
      }
      for (const Cell nb : {Cell{cell.col + 1, cell.row}, Cell{cell.col, cell.row + 1}}) {
        if (!map.in_bounds(nb)) continue;
        const std::size_t n = map.index(nb);
        if (layers_[n] <= k) continue;
        const double z_bottom = -std::min({map.depth(c), map.depth(n), static_cast<double>(k + 1) * dz_});
        const Vec3 drop{0, 0, z_bottom - z_top};
        const bool blocked = nb.col != cell.col
                                 ? face_blocked({x0 + cs, y0, z_top}, {0, cs, 0}, drop)
                                 : face_blocked({x0, y0 + cs, z_top}, {cs, 0, 0}, drop);
        connect(v, first_voxel_[n] + k, blocked);
      }
    }
  }
}

std::optional<std::size_t> VoxelPartition::voxel_at(const Vec3& p) const {
  const auto cell = map_.cell_at(p.x, p.y);
  if (!cell) return std::nullopt;
  const std::size_t c = map_.index(*cell);
  if (!layers_[c] || p.z > 0.0 || p.z < -map_.depth(c)) return std::nullopt;
  const auto k = std::min(layers_[c] - 1, static_cast<std::size_t>(std::floor(-p.z / dz_)));
  return first_voxel_[c] + k;
}

std::vector<char> VoxelPartition::component(std::span<const std::size_t> seed_cells) const {
  std::vector<char> in(column_of_.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t c : seed_cells) {
    if (c >= layers_.size()) continue;
    for (std::size_t k = 0; k < layers_[c]; ++k) {
      const std::size_t v = first_voxel_[c] + k;
      if (!in[v]) {
        in[v] = 1;
        queue.push_back(v);
      }
    }
  }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (const auto& link : links_[v]) {
      if (!link.blocked && !in[link.to]) {
        in[link.to] = 1;
        queue.push_back(link.to);
      }
    }
  }
  return in;
}

bool VoxelPartition::reaches_boundary(const std::vector<char>& component) const {
  for (std::size_t v = 0; v < component.size(); ++v) {
    if (component[v] && map_.on_boundary(map_.cell(column_of_[v]))) return true;
  }
  return false;
}

bool cage_partitions_check(std::span<const AuvPose> auvs, const DepthMap& map,
                           std::span<const std::size_t> contaminated) {
  if (contaminated.empty()) return false;
  const VoxelPartition partition(map, auvs);
  const auto comp = partition.component(contaminated);
  if (std::none_of(comp.begin(), comp.end(), [](char c) { return c != 0; })) return false;
  return !partition.reaches_boundary(comp);
}

bool path_detected(const Vec3& a, const Vec3& b, std::span<const AuvPose> auvs) {
  const Vec3 ab = b - a;
  const double len2 = ab.squared_norm();
  double min_cone_rs = kInf;
  for (const auto& pose : auvs) {
    if (pose.sensor.kind == SensorKind::Sphere) {
      // exact: closest point of the segment to the ball centre
      const double u = len2 > 0.0 ? std::clamp((pose.position - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
      if (in_sensor_volume(pose, a + u * ab)) return true;
    } else {
      min_cone_rs = std::min(min_cone_rs, pose.sensor.r_s);
    }
  }
  if (min_cone_rs == kInf) return false;
  const int n = static_cast<int>(std::ceil(std::sqrt(len2) / (min_cone_rs / 8.0))) + 1;
  for (int i = 0; i <= n; ++i) {
    const Vec3 p = a + (static_cast<double>(i) / n) * ab;
    for (const auto& pose : auvs) {
      if (pose.sensor.kind == SensorKind::Cone && in_sensor_volume(pose, p)) return true;
    }
  }
  return false;
}

Vec3 Scenario::entity_position(double t) const {
  if (trajectory.empty()) throw ValidationError("entity trajectory is empty");
  if (t <= trajectory.front().time) return trajectory.front().position;
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    if (t <= trajectory[i].time) {
      const auto& a = trajectory[i - 1];
      const auto& b = trajectory[i];
      const double u = (t - a.time) / (b.time - a.time);
      return a.position + u * (b.position - a.position);
    }
  }
  return trajectory.back().position;
}

void Scenario::validate() const {
  if (!map) throw ValidationError("scenario has no map");
  if (!(timestep > 0.0)) throw ValidationError("timestep must be positive");
  if (!(horizon > 0.0)) throw ValidationError("horizon must be positive");
  if (!(v_p >= 0.0) || !(v_e >= 0.0)) throw ValidationError("speeds must be non-negative");
  if (!(safety_margin >= 0.0 && safety_margin < 1.0)) throw ValidationError("safety margin must lie in [0, 1)");
  try {
    sensor.validate();
  } catch (const ParameterError& e) {
    throw ValidationError(e.what());
  }
  if (trajectory.empty()) throw ValidationError("entity trajectory is empty");
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const double dt = trajectory[i].time - trajectory[i - 1].time;
    if (!(dt > 0.0)) throw ValidationError("trajectory times must be strictly increasing");
    const double speed = distance(trajectory[i].position, trajectory[i - 1].position) / dt;
    if (speed > v_e * (1.0 + 1e-9) + 1e-12) {
      throw ValidationError("trajectory leg " + std::to_string(i) + " exceeds v_e");
    }
  }
  for (std::size_t i = 0; i < sightings.size(); ++i) {
    if (i > 0 && !(sightings[i].time > sightings[i - 1].time)) {
      throw ValidationError("sighting times must be strictly increasing");
    }
    const Vec3 truth = entity_position(sightings[i].time);
    if (distance(truth, sightings[i].position) > 1e-6 * std::max(1.0, truth.norm())) {
      throw ValidationError("sighting " + std::to_string(i) + " is off the entity trajectory");
    }
    if (!map->in_free_space(sightings[i].position)) {
      throw ValidationError("sighting " + std::to_string(i) + " lies outside free space");
    }
  }
  for (std::size_t i = 0; i < fleet_start.size(); ++i) {
    if (!map->in_free_space(fleet_start[i])) {
      throw ValidationError("vehicle " + std::to_string(i) + " starts outside free space");
    }
  }
}

namespace {

enum class Phase { Idle, Transit, Holding, Shrinking };

// Mutable bookkeeping of the simulation loop.
struct Sim {
  const Scenario& sc;
  Planner planner;
  MissionState state;
  SimulationResult result;
  Phase phase = Phase::Idle;
  std::vector<std::optional<AuvPose>> targets;
  std::vector<std::size_t> agent_slot;
  std::optional<VoxelPartition> partition;
  std::vector<char> component;
  bool tracking = false;  // entity known to be inside the closed cage
  SphericalCage cage;     // capturing cage at its current radius
  ShrinkPlan shrink;
  double shrink_started = 0.0;
  int dwell = 0;
  bool verified = false;

  explicit Sim(const Scenario& s)
      : sc(s),
        planner(s.map, PlannerConfig{s.v_e, s.v_p, s.sensor, s.safety_margin, s.seed, {}, 64}) {}

  std::vector<AuvPose> assigned_poses() const {
    std::vector<AuvPose> out;
    for (std::size_t i = 0; i < state.auvs.size(); ++i) {
      if (agent_slot[i] != Assignment::npos) out.push_back(state.auvs[i]);
    }
    return out;
  }

  void install(const Decision& d) {
    if (d.kind == DecisionKind::Wait) return;
    const auto& slots = d.capture ? d.capture->slots : d.contain->slots;
    const auto& assignment = d.capture ? d.capture->assignment : d.contain->assignment;
    agent_slot = assignment.agent_to_slot(state.auvs.size());
    targets.assign(state.auvs.size(), std::nullopt);
    for (std::size_t i = 0; i < state.auvs.size(); ++i) {
      if (agent_slot[i] != Assignment::npos) targets[i] = slots[agent_slot[i]];
    }
    if (d.capture) cage = d.capture->cage;
    phase = Phase::Transit;
    partition.reset();
    tracking = false;
    verified = false;
    dwell = 0;
  }

  void move_auvs(double t_next) {
    const double dt = sc.timestep;
    if (phase == Phase::Shrinking) {
      const double tau = t_next - shrink_started;
      const double r = std::max(shrink.final_radius, shrink.start_radius - shrink.speed * tau);
      for (std::size_t i = 0; i < state.auvs.size(); ++i) {
        if (agent_slot[i] == Assignment::npos) continue;
        state.auvs[i].position = cage.center + (r + sc.sensor.h) * cage.unit_points[agent_slot[i]];
      }
      cage = cage.rescaled(r);
      return;
    }
    for (std::size_t i = 0; i < state.auvs.size(); ++i) {
      if (!targets[i]) continue;
      AuvPose& pose = state.auvs[i];
      const Vec3 to_go = targets[i]->position - pose.position;
      const double remaining = to_go.norm();
      const double step = sc.v_p * dt;
      if (remaining <= step) {
        pose.position = targets[i]->position;
        pose.axis = targets[i]->axis;
      } else if (step > 0.0) {
        pose.position += (step / remaining) * to_go;
      }
    }
  }

  bool all_arrived() const {
    for (std::size_t i = 0; i < state.auvs.size(); ++i) {
      if (targets[i] && distance(targets[i]->position, state.auvs[i].position) > kArrivalTol) return false;
    }
    return true;
  }

  void finish(double t, Outcome outcome, EventKind kind, std::string payload) {
    state.log(t, kind, std::move(payload));
    result.outcome = outcome;
  }

  // Returns true when the run has reached a terminal outcome.
  bool check(double t, const Vec3& prev_entity, const Vec3& entity) {
    if (!sc.map->cell_at(entity.x, entity.y)) {
      finish(t, Outcome::Escaped, EventKind::Escaped, "reason=left_map");
      return true;
    }
    const auto* capturing = std::get_if<ActiveCapturing>(&state.active_cage);
    const auto* containing = std::get_if<ActiveContaining>(&state.active_cage);

    if (phase == Phase::Transit && all_arrived()) {
      state.log(t, EventKind::CageClosed);
      const auto poses = assigned_poses();
      if (containing) {
        partition.emplace(*sc.map, poses);
        component = partition->component(containing->plan.contaminated);
        verified = !partition->reaches_boundary(component);
        phase = Phase::Holding;
        if (verified) {
          state.log(t, EventKind::CageVerified, kv("blocked_faces", static_cast<double>(partition->blocked_face_count())));
          const auto v = partition->voxel_at(entity);
          if (!v || !component[*v]) {
            finish(t, Outcome::Escaped, EventKind::Escaped, "reason=outside_at_closure");
            return true;
          }
          tracking = true;
        }
      } else if (capturing) {
        const auto report = verify_coverage(cage, planner.config().capture.coverage_samples,
                                            planner.config().capture.coverage_seed);
        verified = report.ok;
        if (verified) state.log(t, EventKind::CageVerified, kv("worst_gap", report.worst_gap));
        if (distance(entity, cage.center) > cage.radius) {
          finish(t, Outcome::Escaped, EventKind::Escaped, "reason=outside_at_closure");
          return true;
        }
        tracking = true;
        if (verified) {
          shrink = shrink_trajectories(cage, sc.sensor.h, sc.v_p, sc.shrink_speed, sc.sensor.r_s, sc.timestep);
          shrink_started = t;
          phase = Phase::Shrinking;
          state.log(t, EventKind::ShrinkStart,
                    join({kv("radius", cage.radius), kv("target", shrink.final_radius), kv("duration", shrink.duration)}));
        } else {
          phase = Phase::Holding;
        }
      }
      return false;
    }

    if (tracking && containing && partition) {
      const auto v = partition->voxel_at(entity);
      if (!v || !component[*v]) {
        if (!path_detected(prev_entity, entity, assigned_poses())) {
          finish(t, Outcome::Escaped, EventKind::Escaped, "reason=wall_gap");
          return true;
        }
        tracking = false;
      }
    }
    if (tracking && capturing && distance(entity, cage.center) > cage.radius) {
      if (!path_detected(prev_entity, entity, assigned_poses())) {
        finish(t, Outcome::Escaped, EventKind::Escaped, "reason=wall_gap");
        return true;
      }
      tracking = false;
    }

    if (phase == Phase::Shrinking && t - shrink_started >= shrink.duration - 1e-12) {
      const auto poses = assigned_poses();
      const bool seen = std::any_of(poses.begin(), poses.end(),
                                    [&](const AuvPose& p) { return in_sensor_volume(p, entity); });
      dwell = seen ? dwell + 1 : 0;
      if (dwell >= 2) {
        finish(t, Outcome::Captured, EventKind::Captured, kv("radius", cage.radius));
        return true;
      }
    }
    return false;
  }

  void record(double t, const Vec3& entity) {
    StepRecord rec;
    rec.time = t;
    rec.entity = entity;
    rec.auvs = positions_of(state.auvs);
    rec.shrinking = phase == Phase::Shrinking;
    if (std::holds_alternative<ActiveCapturing>(state.active_cage)) rec.cage_radius = cage.radius;
    result.steps.push_back(std::move(rec));
  }
};

}  // namespace

SimulationResult simulate(const Scenario& scenario) {
  scenario.validate();
  Sim sim(scenario);
  for (const auto& p : scenario.fleet_start) sim.state.auvs.push_back({p, {0.0, 0.0, -1.0}, scenario.sensor});
  sim.targets.assign(sim.state.auvs.size(), std::nullopt);
  sim.agent_slot.assign(sim.state.auvs.size(), Assignment::npos);

  const double dt = scenario.timestep;
  const auto steps = static_cast<std::size_t>(std::ceil(scenario.horizon / dt - 1e-9));
  std::size_t next_sighting = 0;
  Vec3 entity = scenario.entity_position(0.0);
  sim.record(0.0, entity);
  bool terminal = false;

  for (std::size_t k = 0; k <= steps && !terminal; ++k) {
    const double t = static_cast<double>(k) * dt;
    sim.state.clock = t;
    while (next_sighting < scenario.sightings.size() && scenario.sightings[next_sighting].time <= t + 1e-12) {
      const Decision d = sim.planner.on_sighting(sim.state, scenario.sightings[next_sighting++]);
      sim.install(d);
    }
    if (k == steps) break;
    const double t_next = static_cast<double>(k + 1) * dt;
    sim.move_auvs(t_next);
    const Vec3 prev = entity;
    entity = scenario.entity_position(t_next);
    terminal = sim.check(t_next, prev, entity);
    sim.record(t_next, entity);
  }

  if (!terminal) {
    const double end = static_cast<double>(steps) * dt;
    const bool contained = std::holds_alternative<ActiveContaining>(sim.state.active_cage) &&
                           sim.phase == Phase::Holding && sim.verified && sim.tracking;
    if (contained) {
      sim.result.outcome = Outcome::Contained;
    } else {
      sim.finish(end, Outcome::Exhausted, EventKind::Exhausted, "");
    }
  }
  sim.result.events = sim.state.event_log;
  if (std::holds_alternative<ActiveCapturing>(sim.state.active_cage)) sim.result.final_cage_radius = sim.cage.radius;
  return sim.result;
}

}  // namespace cagecap
