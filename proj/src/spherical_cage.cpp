#include "cagecap/spherical_cage.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "cagecap/convex_hull.hpp"
#include "cagecap/errors.hpp"
#include "text_util.hpp"

namespace cagecap {

namespace {

constexpr double kCollisionDistance = 1e-9;

Vec3 tangential(const Vec3& v, const Vec3& p) { return v - v.dot(p) * p; }

// Tangential Coulomb forces; throws on colliding particles.
std::vector<Vec3> tangential_forces(const std::vector<Vec3>& pts) {
  const std::size_t n = pts.size();
  std::vector<Vec3> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3 d = pts[i] - pts[j];
      const double r = d.norm();
      if (r < kCollisionDistance) {
        throw NumericError("particles " + std::to_string(i) + " and " + std::to_string(j) +
                           " collided");
      }
      const Vec3 fij = d / (r * r * r);
      f[i] += fij;
      f[j] -= fij;
    }
  }
  for (std::size_t i = 0; i < n; ++i) f[i] = tangential(f[i], pts[i]);
  return f;
}

double max_norm(const std::vector<Vec3>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, x.norm());
  return m;
}

void check_unit_norms(const std::vector<Vec3>& pts) {
  for (const auto& p : pts) {
    if (std::abs(p.norm() - 1.0) > 1e-9) throw NumericError("point left the unit sphere");
  }
}

}  // namespace

void RelaxOptions::validate() const {
  if (!(dt > 0.0)) throw ParameterError("dt must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw ParameterError("damping must lie in (0, 1]");
  if (!(tol > 0.0)) throw ParameterError("force tolerance must be positive");
}

SphereConfig init_sphere_points(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ParameterError("need at least two particles");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SphereConfig cfg;
  cfg.seed = seed;
  cfg.points.reserve(n);
  while (cfg.points.size() < n) {
    const Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
    const double len = v.norm();
    if (len < 1e-6) continue;
    const Vec3 p = v / len;
    const bool distinct = std::none_of(cfg.points.begin(), cfg.points.end(), [&](const Vec3& q) {
      return distance(p, q) < 1e-6;
    });
    if (distinct) cfg.points.push_back(p);
  }
  return cfg;
}

double coulomb_energy(const std::vector<Vec3>& pts) {
  double e = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) e += 1.0 / distance(pts[i], pts[j]);
  }
  return e;
}

SphereConfig relax_charges(const SphereConfig& config, const RelaxOptions& options) {
  options.validate();
  if (config.points.size() < 2) throw ParameterError("need at least two particles");
  SphereConfig out = config;
  out.energy_trace.clear();
  out.iterations = 0;
  out.converged = false;
  auto& pts = out.points;
  const std::size_t n = pts.size();
  std::vector<Vec3> vel(n);
  std::vector<Vec3> trial(n);
  std::vector<Vec3> trial_vel(n);

  double energy = coulomb_energy(pts);
  if (options.record_energy) out.energy_trace.push_back(energy);
  double step = options.dt;
  const double min_step = options.dt * 1e-9;
  auto force = tangential_forces(pts);
  out.residual = max_norm(force);

  while (out.iterations < options.max_iters) {
    if (out.residual < options.tol) {
      out.converged = true;
      break;
    }
    ++out.iterations;
    for (std::size_t i = 0; i < n; ++i) {
      trial_vel[i] = options.damping * vel[i] + step * force[i];
      trial[i] = (pts[i] + step * trial_vel[i]).normalized();
      trial_vel[i] = tangential(trial_vel[i], trial[i]);
    }
    const double trial_energy = coulomb_energy(trial);
    if (!(trial_energy <= energy)) {
      step *= 0.5;
      std::fill(vel.begin(), vel.end(), Vec3{});
      if (step < min_step) break;  // stalled at floating-point resolution
      continue;
    }
    pts.swap(trial);
    vel.swap(trial_vel);
    energy = trial_energy;
    if (options.record_energy) out.energy_trace.push_back(energy);
    step = std::min(options.dt, step * 1.25);
    force = tangential_forces(pts);
    out.residual = max_norm(force);
  }
  if (out.residual < options.tol) out.converged = true;
  check_unit_norms(pts);
  return out;
}

SphereMesh spherical_delaunay(const SphereConfig& config) {
  const auto& pts = config.points;
  if (pts.size() < 4) throw GeometryError("a closed cage needs at least four points");
  const HullMesh hull = convex_hull(pts);
  std::vector<std::size_t> degree(pts.size(), 0);
  for (const auto& [a, b] : hull.edges) {
    ++degree[a];
    ++degree[b];
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (degree[i] < 3) {
      throw GeometryError("point " + std::to_string(i) + " is not a proper hull vertex");
    }
  }
  const long euler = static_cast<long>(pts.size()) - static_cast<long>(hull.edges.size()) +
                     static_cast<long>(hull.triangles.size());
  if (euler != 2) throw GeometryError("hull fails the Euler characteristic check");
  return {hull.edges, hull.triangles};
}

double max_edge_length(const std::vector<Vec3>& points,
                       const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  double m = 0.0;
  for (const auto& [a, b] : edges) m = std::max(m, distance(points[a], points[b]));
  return m;
}

SphericalCage SphericalCage::rescaled(double new_radius) const {
  SphericalCage out = *this;
  out.radius = new_radius;
  for (std::size_t i = 0; i < centers.size(); ++i) out.centers[i] = center + new_radius * unit_points[i];
  out.max_edge = max_edge_length(out.centers, out.edges);
  return out;
}

SphericalCage scale_to_cage(const SphereConfig& config, const SphereMesh& mesh, double r_s,
                            const Vec3& center) {
  if (!(r_s > 0.0)) throw ParameterError("sensor radius must be positive");
  const double l_max = max_edge_length(config.points, mesh.edges);
  if (!(l_max > 0.0)) throw GeometryError("mesh has no positive-length edge");
  SphericalCage cage;
  cage.center = center;
  cage.r_s = r_s;
  cage.unit_points = config.points;
  cage.edges = mesh.edges;
  cage.triangles = mesh.triangles;
  cage.centers.resize(config.points.size());
  return cage.rescaled(std::sqrt(3.0) * r_s / l_max);
}

CoverageReport verify_coverage(const SphericalCage& cage, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 1000) throw ParameterError("coverage verification needs at least 1000 samples");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CoverageReport report;
  std::size_t drawn = 0;
  while (drawn < n_samples) {
    const Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
    const double len = v.norm();
    if (len < 1e-12) continue;
    ++drawn;
    const Vec3 p = cage.center + (cage.radius / len) * v;
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& c : cage.centers) nearest = std::min(nearest, (p - c).squared_norm());
    report.worst_gap = std::max(report.worst_gap, std::sqrt(nearest));
  }
  report.ok = report.worst_gap <= cage.r_s * (1.0 + 1e-9);
  return report;
}

std::vector<AuvPose> cone_poses(const SphericalCage& cage, double h) {
  if (!(h >= 0.0)) throw ParameterError("cone height must be non-negative");
  const SensorModel sensor = h == 0.0 ? SensorModel::sphere(cage.r_s) : SensorModel::cone(cage.r_s, h);
  std::vector<AuvPose> poses;
  poses.reserve(cage.size());
  for (std::size_t i = 0; i < cage.size(); ++i) {
    const Vec3 outward = cage.unit_points[i];
    poses.push_back({cage.centers[i] + h * outward, -outward, sensor});
  }
  return poses;
}

UnitFormation relaxed_formation(std::size_t n, std::uint64_t seed, const RelaxOptions& options) {
  UnitFormation f;
  f.config = relax_charges(init_sphere_points(n, seed), options);
  std::mt19937_64 jitter_rng(seed ^ 0x5bd1e995ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  constexpr std::size_t kMaxJitter = 8;
  while (true) {
    try {
      f.mesh = spherical_delaunay(f.config);
      return f;
    } catch (const GeometryError&) {
      if (f.jitter_retries == kMaxJitter) throw;
    }
    ++f.jitter_retries;
    for (auto& p : f.config.points) {
      p = (p + 1e-8 * Vec3{gauss(jitter_rng), gauss(jitter_rng), gauss(jitter_rng)}).normalized();
    }
    RelaxOptions short_run = options;
    short_run.max_iters = 100;
    const std::size_t before = f.config.iterations;
    f.config = relax_charges(f.config, short_run);
    f.config.iterations += before;
  }
}

CaptureCagePlan build_capture_cage(std::size_t n, double r_s, const Vec3& center, std::uint64_t seed,
                                   const CaptureCageOptions& options) {
  if (n < 4) throw ParameterError("a closed spherical cage needs at least four vehicles");
  const UnitFormation unit = relaxed_formation(n, seed, options.relax);
  CaptureCagePlan plan;
  plan.relax_iterations = unit.config.iterations;
  plan.jitter_retries = unit.jitter_retries;
  plan.cage = scale_to_cage(unit.config, unit.mesh, r_s, center);
  plan.geometric_radius = plan.cage.radius;
  plan.first_check = verify_coverage(plan.cage, options.coverage_samples, options.coverage_seed);
  plan.final_check = plan.first_check;
  if (!plan.first_check.ok) {
    const double ratio = plan.first_check.worst_gap / r_s;
    plan.cage = plan.cage.rescaled(plan.cage.radius / ratio);
    plan.shrunk = true;
    plan.final_check = verify_coverage(plan.cage, options.coverage_samples, options.coverage_seed);
  }
  return plan;
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  s.min = values.front();
  s.max = values.front();
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) {
  // splitmix64 finaliser over (seed, trial)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RadiusStats capture_radius_stats(std::size_t n, double r_s, std::size_t trials, std::uint64_t seed,
                                 const RelaxOptions& options) {
  if (trials < 1) throw ParameterError("need at least one trial");
  if (!(r_s > 0.0)) throw ParameterError("sensor radius must be positive");
  RadiusStats stats;
  stats.n = n;
  stats.r_s = r_s;
  for (std::size_t t = 0; t < trials; ++t) {
    const UnitFormation f = relaxed_formation(n, trial_seed(seed, t), options);
    const double l_max = max_edge_length(f.config.points, f.mesh.edges);
    stats.max_edges.push_back(l_max);
    stats.radii.push_back(std::sqrt(3.0) * r_s / l_max);
  }
  stats.max_edge = summarize(stats.max_edges);
  stats.radius = summarize(stats.radii);
  return stats;
}

void write_cage(std::ostream& os, const SphericalCage& cage, const std::vector<AuvPose>& poses) {
  using detail::fmt_double;
  auto vec = [&](const Vec3& v) { return fmt_double(v.x) + ' ' + fmt_double(v.y) + ' ' + fmt_double(v.z); };
  os << "SPHERICALCAGE v1\n";
  os << "n " << cage.size() << '\n';
  os << "r_s " << fmt_double(cage.r_s) << '\n';
  os << "radius " << fmt_double(cage.radius) << '\n';
  os << "max_edge " << fmt_double(cage.max_edge) << '\n';
  os << "center " << vec(cage.center) << '\n';
  os << "unit_points\n";
  for (const auto& p : cage.unit_points) os << vec(p) << '\n';
  os << "centers\n";
  for (const auto& p : cage.centers) os << vec(p) << '\n';
  os << "edges " << cage.edges.size() << '\n';
  for (const auto& [a, b] : cage.edges) os << a << ' ' << b << '\n';
  os << "triangles " << cage.triangles.size() << '\n';
  for (const auto& t : cage.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  const SensorModel sensor = poses.empty() ? SensorModel::sphere(cage.r_s) : poses.front().sensor;
  os << "sensor " << (sensor.kind == SensorKind::Sphere ? "sphere" : "cone") << ' '
     << fmt_double(sensor.r_s) << ' ' << fmt_double(sensor.h) << '\n';
  os << "poses " << poses.size() << '\n';
  for (const auto& p : poses) os << vec(p.position) << ' ' << vec(p.axis) << '\n';
}

CageFile read_cage(std::istream& is) {
  std::size_t line_no = 0;
  auto tokens = [&](const char* expect, std::size_t count) {
    std::string line;
    while (std::getline(is, line)) {
      ++line_no;
      if (!detail::trim(line).empty()) break;
      line.clear();
    }
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    if (expect && (out.empty() || out[0] != expect)) {
      throw ValidationError(std::string("expected '") + expect + "'", line_no);
    }
    if (out.size() != count) throw ValidationError("unexpected field count", line_no);
    return out;
  };
  auto vec = [&](const std::vector<std::string>& t, std::size_t at) {
    return Vec3{detail::to_double(t[at], line_no), detail::to_double(t[at + 1], line_no),
                detail::to_double(t[at + 2], line_no)};
  };
  const auto header = tokens("SPHERICALCAGE", 2);
  if (header[1] != "v1") throw ValidationError("unsupported cage version", line_no);
  CageFile file;
  SphericalCage& cage = file.cage;
  const auto n = static_cast<std::size_t>(detail::to_int(tokens("n", 2)[1], line_no));
  cage.r_s = detail::to_double(tokens("r_s", 2)[1], line_no);
  cage.radius = detail::to_double(tokens("radius", 2)[1], line_no);
  cage.max_edge = detail::to_double(tokens("max_edge", 2)[1], line_no);
  cage.center = vec(tokens("center", 4), 1);
  tokens("unit_points", 1);
  for (std::size_t i = 0; i < n; ++i) cage.unit_points.push_back(vec(tokens(nullptr, 3), 0));
  tokens("centers", 1);
  for (std::size_t i = 0; i < n; ++i) cage.centers.push_back(vec(tokens(nullptr, 3), 0));
  const auto n_edges = static_cast<std::size_t>(detail::to_int(tokens("edges", 2)[1], line_no));
  for (std::size_t i = 0; i < n_edges; ++i) {
    const auto t = tokens(nullptr, 2);
    cage.edges.emplace_back(detail::to_int(t[0], line_no), detail::to_int(t[1], line_no));
  }
  const auto n_tri = static_cast<std::size_t>(detail::to_int(tokens("triangles", 2)[1], line_no));
  for (std::size_t i = 0; i < n_tri; ++i) {
    const auto t = tokens(nullptr, 3);
    cage.triangles.push_back({static_cast<std::size_t>(detail::to_int(t[0], line_no)),
                              static_cast<std::size_t>(detail::to_int(t[1], line_no)),
                              static_cast<std::size_t>(detail::to_int(t[2], line_no))});
  }
  const auto s = tokens("sensor", 4);
  SensorModel sensor{s[1] == "cone" ? SensorKind::Cone : SensorKind::Sphere,
                     detail::to_double(s[2], line_no), detail::to_double(s[3], line_no)};
  const auto n_poses = static_cast<std::size_t>(detail::to_int(tokens("poses", 2)[1], line_no));
  for (std::size_t i = 0; i < n_poses; ++i) {
    const auto t = tokens(nullptr, 6);
    file.poses.push_back({vec(t, 0), vec(t, 3), sensor});
  }
  return file;
}

void write_off_mesh(std::ostream& os, const SphericalCage& cage) {
  using detail::fmt_double;
  os << "OFF\n" << cage.size() << ' ' << cage.triangles.size() << ' ' << cage.edges.size() << '\n';
  for (const auto& c : cage.centers) {
    os << fmt_double(c.x) << ' ' << fmt_double(c.y) << ' ' << fmt_double(c.z) << '\n';
  }
  for (const auto& t : cage.triangles) os << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

}  // namespace cagecap
