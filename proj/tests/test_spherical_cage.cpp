#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "cagecap/convex_hull.hpp"
#include "cagecap/errors.hpp"
#include "cagecap/spherical_cage.hpp"

using namespace cagecap;

namespace {

const double kRs = 0.5 / std::sqrt(3.0);

double max_pairwise(const std::vector<Vec3>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, distance(pts[i], pts[j]));
  }
  return best;
}

SphericalCage relaxed_cage(std::size_t n, double rs, std::uint64_t seed, Vec3 centre = {}) {
  const auto f = relaxed_formation(n, seed);
  return scale_to_cage(f.config, f.mesh, rs, centre);
}

}  // namespace

TEST_CASE("init points on the unit sphere") {
  const auto a = init_sphere_points(50, 3);
  for (const auto& p : a.points) CHECK(std::abs(p.norm() - 1.0) <= 1e-9);
  const auto b = init_sphere_points(50, 3);
  CHECK(a.points == b.points);
  CHECK(init_sphere_points(50, 4).points != a.points);
  Vec3 mean;
  const auto many = init_sphere_points(500, 11);
  for (const auto& p : many.points) mean = mean + p;
  CHECK((mean / 500.0).norm() < 0.15);
  CHECK_THROWS_AS(init_sphere_points(1, 3), ParameterError);
}

TEST_CASE("relaxation options are validated") {
  RelaxOptions bad;
  bad.dt = 0.0;
  CHECK_THROWS_AS(relax_charges(init_sphere_points(4, 1), bad), ParameterError);
  bad = {};
  bad.damping = 1.5;
  CHECK_THROWS_AS(relax_charges(init_sphere_points(4, 1), bad), ParameterError);
  bad = {};
  bad.tol = 0.0;
  CHECK_THROWS_AS(relax_charges(init_sphere_points(4, 1), bad), ParameterError);
}

TEST_CASE("two charges end antipodal") {
  const auto r = relax_charges(init_sphere_points(2, 9));
  CHECK(distance(r.points[0], r.points[1]) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("platonic equilibria") {
  const auto t = relax_charges(init_sphere_points(4, 1));
  CHECK(t.converged);
  CHECK(max_pairwise(t.points) == doctest::Approx(1.633).epsilon(1e-3));
  const auto o = relaxed_formation(6, 1);
  CHECK(max_edge_length(o.config.points, o.mesh.edges) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
  const auto i = relaxed_formation(12, 1);
  CHECK(max_edge_length(i.config.points, i.mesh.edges) == doctest::Approx(1.0515).epsilon(1e-3));
}

TEST_CASE("relaxation keeps unit norm and descends in energy") {
  RelaxOptions opts;
  opts.record_energy = true;
  const auto r = relax_charges(init_sphere_points(17, 5), opts);
  for (const auto& p : r.points) CHECK(std::abs(p.norm() - 1.0) <= 1e-9);
  REQUIRE(r.energy_trace.size() > 1);
  for (std::size_t k = 1; k < r.energy_trace.size(); ++k) CHECK(r.energy_trace[k] <= r.energy_trace[k - 1]);
  CHECK(r.energy_trace.back() == doctest::Approx(coulomb_energy(r.points)));
}

TEST_CASE("coincident charges are a numeric error") {
  SphereConfig c;
  c.points = {{1, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  CHECK_THROWS_AS(relax_charges(c), NumericError);
}

TEST_CASE("spherical delaunay edge counts") {
  CHECK(relaxed_formation(4, 2).mesh.edges.size() == 6);
  CHECK(relaxed_formation(6, 2).mesh.edges.size() == 12);
  CHECK(relaxed_formation(12, 2).mesh.edges.size() == 30);
  for (std::size_t n = 4; n <= 20; ++n) {
    const auto f = relaxed_formation(n, 40 + n);
    CHECK(f.mesh.edges.size() == 3 * n - 6);
    CHECK(f.mesh.triangles.size() == 2 * n - 4);
    std::vector<int> degree(n, 0);
    for (const auto& [a, b] : f.mesh.edges) {
      ++degree[a];
      ++degree[b];
    }
    for (int d : degree) CHECK(d >= 3);
  }
}

TEST_CASE("spherical delaunay rejects degenerate input") {
  SphereConfig flat;
  flat.points = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
  CHECK_THROWS_AS(spherical_delaunay(flat), GeometryError);
  SphereConfig three;
  three.points = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK_THROWS_AS(spherical_delaunay(three), GeometryError);
}

TEST_CASE("convex hull of a cube with an interior point") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 8; ++i) pts.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
  pts.push_back({0.5, 0.5, 0.5});
  const auto hull = convex_hull(pts);
  std::set<std::size_t> used;
  for (const auto& t : hull.triangles) used.insert(t.begin(), t.end());
  CHECK(used.count(8) == 0);
  CHECK(used.size() == 8);
  // outward orientation
  const Vec3 c{0.5, 0.5, 0.5};
  for (const auto& t : hull.triangles) {
    const Vec3 n = (pts[t[1]] - pts[t[0]]).cross(pts[t[2]] - pts[t[0]]);
    CHECK(n.dot(pts[t[0]] - c) > 0.0);
  }
}

TEST_CASE("scale to cage") {
  const auto f = relaxed_formation(4, 1);
  const double lmax = max_edge_length(f.config.points, f.mesh.edges);
  const auto cage = scale_to_cage(f.config, f.mesh, kRs, {1, 2, 3});
  CHECK(cage.radius == doctest::Approx(0.306).epsilon(1e-3));
  CHECK(cage.radius == doctest::Approx(std::sqrt(3.0) * kRs / lmax));
  CHECK(std::abs(cage.max_edge - std::sqrt(3.0) * kRs) <= 1e-9);
  for (const auto& c : cage.centers) CHECK(std::abs(distance(c, {1, 2, 3}) - cage.radius) <= 1e-9);

  const auto doubled = scale_to_cage(f.config, f.mesh, 2 * kRs, {1, 2, 3});
  CHECK(doubled.radius == doctest::Approx(2 * cage.radius));

  // already at the target spacing
  const auto unit = scale_to_cage(f.config, f.mesh, lmax / std::sqrt(3.0), {});
  CHECK(unit.radius == doctest::Approx(1.0));
  CHECK_THROWS_AS(scale_to_cage(f.config, f.mesh, 0.0, {}), ParameterError);
}

TEST_CASE("coverage of a raw tetrahedral cage needs the gap-ratio retry") {
  const auto cage = relaxed_cage(4, kRs, 1);
  const auto first = verify_coverage(cage, 10000, 1);
  CHECK_FALSE(first.ok);
  CHECK(first.worst_gap > kRs);

  const auto plan = build_capture_cage(4, kRs, {}, 1);
  CHECK(plan.shrunk);
  CHECK(plan.final_check.ok);
  CHECK(plan.final_check.worst_gap <= kRs * (1 + 1e-9));
}

TEST_CASE("icosahedral cage covers") {
  const auto plan = build_capture_cage(12, kRs, {}, 3);
  CHECK(plan.final_check.ok);
  CHECK(plan.cage.max_edge <= std::sqrt(3.0) * kRs + 1e-9);
}

TEST_CASE("oversized cage fails verification") {
  const auto plan = build_capture_cage(12, kRs, {}, 3);
  const auto big = plan.cage.rescaled(plan.cage.radius * 1.5);
  const auto report = verify_coverage(big, 10000, 1);
  CHECK_FALSE(report.ok);
  CHECK(report.worst_gap > kRs);
  CHECK_THROWS_AS(verify_coverage(plan.cage, 999, 1), ParameterError);
}

TEST_CASE("build_capture_cage rejects small fleets") {
  CHECK_THROWS_AS(build_capture_cage(3, kRs, {}, 1), ParameterError);
}

TEST_CASE("cone poses") {
  const auto plan = build_capture_cage(8, 1.0, {0, 0, -50}, 2);
  const auto flat = cone_poses(plan.cage, 0.0);
  for (std::size_t i = 0; i < flat.size(); ++i) CHECK(flat[i].position == plan.cage.centers[i]);
  const auto cage5 = plan.cage.rescaled(5.0);
  const auto poses = cone_poses(cage5, 1.0);
  for (std::size_t i = 0; i < poses.size(); ++i) {
    CHECK(distance(poses[i].position, cage5.center) == doctest::Approx(6.0));
    const Vec3 out = (cage5.centers[i] - cage5.center).normalized();
    CHECK(poses[i].axis.dot(out) == doctest::Approx(-1.0));
    CHECK(distance(poses[i].disc_center(), cage5.centers[i]) < 1e-9);
  }
  CHECK_THROWS_AS(cone_poses(cage5, -1.0), ParameterError);
}

TEST_CASE("radius statistics") {
  const auto one = capture_radius_stats(6, kRs, 1, 1);
  CHECK(one.max_edge.std == 0.0);
  CHECK(one.radius.std == 0.0);
  const auto s = capture_radius_stats(4, kRs, 10, 42);
  CHECK(s.max_edges.size() == 10);
  CHECK(s.max_edge.mean == doctest::Approx(1.633).epsilon(1e-3));
  CHECK(s.max_edge.std <= 0.02);
  CHECK(s.max_edge.min <= s.max_edge.mean);
  CHECK(s.max_edge.max >= s.max_edge.mean);
  CHECK_THROWS_AS(capture_radius_stats(4, kRs, 0, 1), ParameterError);
  const auto again = capture_radius_stats(4, kRs, 10, 42);
  CHECK(again.max_edges == s.max_edges);
}

TEST_CASE("cage file round trip") {
  const auto plan = build_capture_cage(7, 2.0, {10, 20, -30}, 5);
  const auto poses = cone_poses(plan.cage, 1.5);
  std::stringstream ss;
  write_cage(ss, plan.cage, poses);
  const auto back = read_cage(ss);
  CHECK(back.cage.radius == plan.cage.radius);
  CHECK(back.cage.centers == plan.cage.centers);
  CHECK(back.cage.edges == plan.cage.edges);
  CHECK(back.cage.triangles == plan.cage.triangles);
  REQUIRE(back.poses.size() == poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    CHECK(back.poses[i].position == poses[i].position);
    CHECK(back.poses[i].axis == poses[i].axis);
    CHECK(back.poses[i].sensor.h == 1.5);
  }
  std::istringstream bad("SPHERICALCAGE v1\nn x\n");
  CHECK_THROWS_AS(read_cage(bad), ValidationError);
}

TEST_CASE("off mesh") {
  const auto plan = build_capture_cage(6, 1.0, {}, 1);
  std::ostringstream os;
  write_off_mesh(os, plan.cage);
  std::istringstream is(os.str());
  std::string magic;
  std::size_t v, f, e;
  is >> magic >> v >> f >> e;
  CHECK(magic == "OFF");
  CHECK(v == 6);
  CHECK(f == 8);
}
