#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cagecap/assignment.hpp"
#include "cagecap/barrier_cover.hpp"
#include "cagecap/bathymetry.hpp"
#include "cagecap/graphcut.hpp"
#include "cagecap/sensor.hpp"
#include "cagecap/spherical_cage.hpp"

namespace cagecap {

enum class EventKind {
  Sighting,
  PlanContain,
  PlanCapture,
  Wait,
  CageClosed,
  CageVerified,
  ShrinkStart,
  Captured,
  Escaped,
  Exhausted,
};

const char* to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& name);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::Sighting;
  std::string payload;  // key=value pairs joined by ';'
};

void write_event_log(std::ostream& os, std::span<const Event> events);
std::vector<Event> read_event_log(std::istream& is);

struct ContainingPlan {
  double enclosure_radius = 0.0;
  std::vector<std::size_t> contaminated;  // source cells of the cut
  CutResult cut;
  std::vector<BarrierSegment> segments;
  CoverSolution cover;
  std::vector<AuvPose> slots;
  Assignment assignment;
  double deadline = 0.0;  // absolute time the contamination may first touch a wall
  double area = 0.0;      // enclosed water area, m^2
};

struct CapturingPlan {
  SphericalCage cage;
  std::vector<AuvPose> slots;
  Assignment assignment;
  double deadline = 0.0;  // absolute time the growth ball reaches the cage sphere
};

enum class DecisionKind { GoCapture, GoContain, Wait };

struct Decision {
  DecisionKind kind = DecisionKind::Wait;
  std::optional<CapturingPlan> capture;
  std::optional<ContainingPlan> contain;
  std::string reason;
};

struct PlannerConfig {
  double v_e = 1.0;  // max entity speed, m/s
  double v_p = 1.0;  // max vehicle speed, m/s
  SensorModel sensor;
  double safety_margin = 0.05;  // fraction of a deadline held back
  std::uint64_t seed = 1;
  CaptureCageOptions capture;
  // Upper bound on enclosure radii tried for containing cages (in cells).
  std::size_t max_enclosure_steps = 64;

  void validate() const;
};

struct ActiveContaining {
  ContainingPlan plan;
};
struct ActiveCapturing {
  CapturingPlan plan;
};
using ActiveCage = std::variant<std::monostate, ActiveContaining, ActiveCapturing>;

struct MissionState {
  double clock = 0.0;
  std::vector<AuvPose> auvs;
  ActiveCage active_cage;
  std::optional<ContaminatedSet> contaminated;
  std::vector<Event> event_log;

  void log(double time, EventKind kind, std::string payload = {});
};

// Decision loop run at each sighting: capture if possible, else contain, else wait.
class Planner {
 public:
  Planner(std::shared_ptr<const DepthMap> map, PlannerConfig config);

  const DepthMap& map() const { return *map_; }
  const PlannerConfig& config() const { return config_; }

  // Resets the contaminated set to the sighting, then prefers a reachable
  // spherical capturing cage, then a reachable containing cage enclosing less
  // area than the active one, and otherwise waits. The decision is logged and
  // installed as the state's active cage.
  Decision on_sighting(MissionState& state, const Sighting& sighting) const;

  // Candidate plans, exposed for tooling and tests. Both return empty when no
  // reachable plan exists; plan_containing throws ContainmentImpossible when the
  // sighting cell itself cannot be enclosed.
  std::optional<CapturingPlan> plan_capturing(const std::vector<AuvPose>& auvs, const Sighting& sighting,
                                              double now) const;
  std::optional<ContainingPlan> plan_containing(const std::vector<AuvPose>& auvs, const Sighting& sighting,
                                                double now) const;
  // Containing plan for one explicit enclosure radius, reachability not checked.
  ContainingPlan containing_plan_for_radius(const std::vector<AuvPose>& auvs, const Sighting& sighting,
                                            double radius) const;

  // Verified unit formation for the fleet size (cached per planner).
  const CaptureCagePlan& unit_cage(std::size_t n) const;

 private:
  std::shared_ptr<const DepthMap> map_;
  PlannerConfig config_;
  mutable std::vector<std::optional<CaptureCagePlan>> unit_cache_;
};

// Vehicle poses that place each disc of a barrier cover on its wall: at the
// disc centre for sphere sensors, or h outside the wall looking back at it.
std::vector<AuvPose> barrier_poses(const CoverSolution& cover, std::span<const BarrierSegment> segments,
                                   const SensorModel& sensor);

struct TimedWaypoint {
  double time = 0.0;  // seconds after shrink start
  Vec3 position;
};

struct ShrinkPlan {
  double speed = 0.0;
  double duration = 0.0;
  double start_radius = 0.0;
  double final_radius = 0.0;
  // Indexed by slot; each AUV follows the list of the slot it holds.
  std::vector<std::vector<TimedWaypoint>> trajectories;
};

// Uniform radial shrink of a verified cage at min(v_p, shrink_speed) until the
// cage radius reaches capture_radius. Empty trajectories when already small enough.
ShrinkPlan shrink_trajectories(const SphericalCage& cage, double h, double v_p, double shrink_speed,
                               double capture_radius, double timestep);

// Cell-resolution voxelization of F where the faces between voxels that lie
// fully inside the union of sensor volumes are blocked.
class VoxelPartition {
 public:
  VoxelPartition(const DepthMap& map, std::span<const AuvPose> auvs);

  std::size_t voxel_count() const { return column_of_.size(); }
  std::optional<std::size_t> voxel_at(const Vec3& p) const;
  std::size_t blocked_face_count() const { return blocked_count_; }

  // Flood fill through unblocked faces from every voxel of the seed columns.
  std::vector<char> component(std::span<const std::size_t> seed_cells) const;
  bool reaches_boundary(const std::vector<char>& component) const;

 private:
  struct Link {
    std::size_t to;
    bool blocked;
  };
  const DepthMap& map_;
  double dz_;
  std::vector<std::size_t> first_voxel_;  // per cell, index of layer 0 (npos for land)
  std::vector<std::size_t> layers_;       // per cell
  std::vector<std::size_t> column_of_;    // per voxel
  std::vector<std::vector<Link>> links_;
  std::size_t blocked_count_ = 0;
};

// True iff the sensor volumes together with the terrain cut the voxelized free
// space so that the component holding the contaminated cells never reaches the
// map boundary.
bool cage_partitions_check(std::span<const AuvPose> auvs, const DepthMap& map,
                           std::span<const std::size_t> contaminated);

// Whether the straight path a->b touches some sensor volume: exact for spheres,
// sampled at r_s / 8 for cones.
bool path_detected(const Vec3& a, const Vec3& b, std::span<const AuvPose> auvs);

struct EntityWaypoint {
  double time = 0.0;
  Vec3 position;
};

struct Scenario {
  std::shared_ptr<const DepthMap> map;
  std::vector<Vec3> fleet_start;
  double v_p = 1.0;
  SensorModel sensor;
  double v_e = 1.0;
  std::vector<EntityWaypoint> trajectory;
  std::vector<Sighting> sightings;
  double timestep = 1.0;
  double horizon = 600.0;
  std::uint64_t seed = 1;
  double safety_margin = 0.05;
  double shrink_speed = 0.0;  // 0: shrink at v_p

  // Throws ValidationError on inconsistent input.
  void validate() const;
  Vec3 entity_position(double t) const;
};

enum class Outcome { Captured, Contained, Escaped, Exhausted };
const char* to_string(Outcome outcome);

struct StepRecord {
  double time = 0.0;
  std::vector<Vec3> auvs;
  Vec3 entity;
  bool shrinking = false;
  double cage_radius = 0.0;  // capturing cage radius when one is active
};

struct SimulationResult {
  Outcome outcome = Outcome::Exhausted;
  std::vector<Event> events;
  std::vector<StepRecord> steps;
  double final_cage_radius = 0.0;  // last capturing cage radius, 0 if none
};

// Fixed-timestep deterministic simulation of the sighting-driven caging loop.
SimulationResult simulate(const Scenario& scenario);

}  // namespace cagecap
