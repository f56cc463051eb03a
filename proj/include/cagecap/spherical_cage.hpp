#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "cagecap/geometry.hpp"
#include "cagecap/sensor.hpp"

namespace cagecap {

// N points on the unit sphere plus relaxation metadata.
struct SphereConfig {
  std::vector<Vec3> points;
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double residual = 0.0;  // max tangential force magnitude at exit
  bool converged = false;
  std::vector<double> energy_trace;  // filled when RelaxOptions::record_energy is set

  std::size_t size() const { return points.size(); }
};

struct RelaxOptions {
  double dt = 0.05;
  double damping = 0.9;  // velocity retained per step
  double tol = 1e-6;
  std::size_t max_iters = 100000;
  bool record_energy = false;

  void validate() const;
};

SphereConfig init_sphere_points(std::size_t n, std::uint64_t seed);

// Coulomb potential sum over pairs of 1 / |p_i - p_j|.
double coulomb_energy(const std::vector<Vec3>& points);

// Damped explicit Euler on the tangent planes with re-projection onto the
// sphere. A step that raises the potential is rejected: the step is halved and
// velocities reset. Stops when the largest tangential force drops below tol,
// the step has collapsed, or max_iters is reached.
SphereConfig relax_charges(const SphereConfig& config, const RelaxOptions& options = {});

struct SphereMesh {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::array<std::size_t, 3>> triangles;
};

// Spherical Delaunay triangulation of points on a sphere, taken from their convex hull.
// Throws GeometryError unless every point is a hull vertex of degree >= 3 and
// V - E + F = 2.
SphereMesh spherical_delaunay(const SphereConfig& config);

double max_edge_length(const std::vector<Vec3>& points,
                       const std::vector<std::pair<std::size_t, std::size_t>>& edges);

struct SphericalCage {
  Vec3 center;
  double radius = 0.0;
  double r_s = 0.0;
  double max_edge = 0.0;
  std::vector<Vec3> unit_points;
  std::vector<Vec3> centers;  // disc centres on the cage sphere
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::array<std::size_t, 3>> triangles;

  std::size_t size() const { return centers.size(); }
  // Same formation uniformly rescaled to a new radius about its centre.
  SphericalCage rescaled(double new_radius) const;
};

// Scale so the longest mesh edge equals sqrt(3) r_s and translate to `center`.
SphericalCage scale_to_cage(const SphereConfig& config, const SphereMesh& mesh, double r_s,
                            const Vec3& center);

struct CoverageReport {
  bool ok = false;
  double worst_gap = 0.0;  // largest distance from a sphere sample to its nearest disc centre
};

CoverageReport verify_coverage(const SphericalCage& cage, std::size_t n_samples, std::uint64_t seed);

// Vehicles sit h outside their disc along the outward radius, sensor axis pointing inward.
std::vector<AuvPose> cone_poses(const SphericalCage& cage, double h);

struct CaptureCageOptions {
  RelaxOptions relax;
  std::size_t coverage_samples = 10000;
  std::uint64_t coverage_seed = 1;
};

struct CaptureCagePlan {
  SphericalCage cage;           // final, possibly shrunk after verification
  double geometric_radius = 0;  // sqrt(3) r_s / l_max before verification
  CoverageReport first_check;
  CoverageReport final_check;
  bool shrunk = false;
  std::size_t relax_iterations = 0;
  std::size_t jitter_retries = 0;
};

// Full pipeline: random start, relaxation, hull, scaling, then coverage
// verification with at most one shrink by the measured gap ratio.
CaptureCagePlan build_capture_cage(std::size_t n, double r_s, const Vec3& center, std::uint64_t seed,
                                   const CaptureCageOptions& options = {});

// Relaxed unit configuration and its mesh, retrying degenerate hulls by jitter.
struct UnitFormation {
  SphereConfig config;
  SphereMesh mesh;
  std::size_t jitter_retries = 0;
};
UnitFormation relaxed_formation(std::size_t n, std::uint64_t seed, const RelaxOptions& options = {});

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double min = 0.0;
  double max = 0.0;
};
Summary summarize(const std::vector<double>& values);

struct RadiusStats {
  std::size_t n = 0;
  double r_s = 0.0;
  std::vector<double> max_edges;  // unit-sphere l_max per trial
  std::vector<double> radii;      // sqrt(3) r_s / l_max per trial
  Summary max_edge;
  Summary radius;
};

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

RadiusStats capture_radius_stats(std::size_t n, double r_s, std::size_t trials, std::uint64_t seed,
                                 const RelaxOptions& options = {});

// Structured text export (SPHERICALCAGE v1) including vehicle poses.
void write_cage(std::ostream& os, const SphericalCage& cage, const std::vector<AuvPose>& poses);
struct CageFile {
  SphericalCage cage;
  std::vector<AuvPose> poses;
};
CageFile read_cage(std::istream& is);
// OFF mesh of the disc centres and hull triangles.
void write_off_mesh(std::ostream& os, const SphericalCage& cage);

}  // namespace cagecap
