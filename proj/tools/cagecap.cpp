// cagecap: command-line front end for the caging planner.
//
// Exit codes: 0 success / captured, 2 usage or validation error, 3 unreachable
// plan, 4 containment impossible, 5 coverage verification failure, 6 contained,
// 7 escaped, 8 exhausted, 1 I/O or other failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cagecap/assignment.hpp"
#include "cagecap/barrier_cover.hpp"
#include "cagecap/bathymetry.hpp"
#include "cagecap/errors.hpp"
#include "cagecap/graphcut.hpp"
#include "cagecap/mission.hpp"
#include "cagecap/scenario.hpp"
#include "cagecap/spherical_cage.hpp"

namespace fs = std::filesystem;
using namespace cagecap;

namespace {

enum Exit {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kUnreachable = 3,
  kContainmentImpossible = 4,
  kCoverageFailure = 5,
  kContained = 6,
  kEscaped = 7,
  kExhausted = 8,
};

enum class LogLevel { Error, Info, Debug };

LogLevel log_level() {
  const char* env = std::getenv("CAGE_LOG");
  if (!env) return LogLevel::Error;
  const std::string v(env);
  if (v == "debug") return LogLevel::Debug;
  if (v == "info") return LogLevel::Info;
  return LogLevel::Error;
}

void info(const std::string& msg) {
  if (log_level() != LogLevel::Error) std::cerr << "[info] " << msg << '\n';
}

void debug(const std::string& msg) {
  if (log_level() == LogLevel::Debug) std::cerr << "[debug] " << msg << '\n';
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

Vec3 parse_vec3(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("bad coordinate list '" + text + "'");
    }
  }
  if (v.size() != 3) throw UsageError("expected x,y,z but got '" + text + "'");
  return {v[0], v[1], v[2]};
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto dash = tok.find('-');
    try {
      if (dash != std::string::npos) {
        const auto lo = std::stoul(tok.substr(0, dash));
        const auto hi = std::stoul(tok.substr(dash + 1));
        if (hi < lo) throw UsageError("empty range '" + tok + "'");
        for (auto n = lo; n <= hi; ++n) out.push_back(n);
      } else {
        out.push_back(std::stoul(tok));
      }
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError("bad N list '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError("empty N list");
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------- gen-map

struct GenMapArgs {
  std::optional<std::uint64_t> seed;
  std::string size = "64x64";
  double cell = 10.0;
  double roughness = 1.0;
  double island_threshold = 15.0;
  std::string out = "-";
};

int cmd_gen_map(const GenMapArgs& a) {
  if (!a.seed) throw UsageError("--seed is required");
  const auto x = a.size.find('x');
  int w = 0;
  int h = 0;
  try {
    if (x == std::string::npos) throw std::invalid_argument(a.size);
    w = std::stoi(a.size.substr(0, x));
    h = std::stoi(a.size.substr(x + 1));
  } catch (const std::exception&) {
    throw UsageError("--size must look like WIDTHxHEIGHT");
  }
  if (w < 8 || h < 8) throw UsageError("--size must be at least 8x8");
  if (!(a.cell > 0.0)) throw UsageError("--cell must be positive");
  if (!(a.roughness > 0.0)) throw UsageError("--roughness must be positive");
  const DepthMap map = generate_depth_map(*a.seed, w, h, a.cell, a.roughness, a.island_threshold);
  std::size_t land = 0;
  for (std::size_t i = 0; i < map.cell_count(); ++i) land += map.is_land(i) ? 1 : 0;
  info("generated " + std::to_string(w) + "x" + std::to_string(h) + " map, " + std::to_string(land) + " land cells");
  if (a.out == "-") {
    map.write(std::cout);
  } else {
    map.save(a.out);
  }
  return kOk;
}

// ---------------------------------------------------------------- plan-contain

struct ContainArgs {
  std::string map;
  std::string sighting;
  double time = 0.0;
  std::string fleet_at;
  std::string fleet_file;
  std::size_t n = 0;
  double rs = 10.0;
  double h = 0.0;
  double ve = 1.0;
  double vp = 2.0;
  double margin = 0.05;
  std::optional<double> enclosure;
  std::size_t max_steps = 64;
  std::string out = "plan";
};

std::vector<Vec3> load_fleet(const ContainArgs& a) {
  std::vector<Vec3> fleet;
  if (!a.fleet_file.empty()) {
    std::ifstream is(a.fleet_file);
    if (!is) throw IoError("cannot open fleet file '" + a.fleet_file + "'");
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (header) {
        header = false;
        if (line.find_first_of("0123456789") != 0 && line.front() != '-') continue;
      }
      fleet.push_back(parse_vec3(line));
    }
  }
  if (!a.fleet_at.empty()) {
    const Vec3 p = parse_vec3(a.fleet_at);
    for (std::size_t i = 0; i < a.n; ++i) fleet.push_back(p);
  }
  return fleet;
}

int cmd_plan_contain(const ContainArgs& a) {
  if (a.map.empty()) throw UsageError("--map is required");
  if (a.sighting.empty()) throw UsageError("--sighting is required");
  if (!(a.rs > 0.0) || !(a.h >= 0.0) || !(a.ve >= 0.0) || !(a.vp >= 0.0)) {
    throw UsageError("--rs must be positive; --h, --ve and --vp non-negative");
  }
  if (!(a.margin >= 0.0 && a.margin < 1.0)) throw UsageError("--margin must lie in [0, 1)");
  auto map = std::make_shared<const DepthMap>(DepthMap::load(a.map));
  const Sighting sighting{parse_vec3(a.sighting), a.time};
  if (!map->in_free_space(sighting.position)) throw UsageError("sighting lies outside free space");
  const auto fleet_positions = load_fleet(a);
  const SensorModel sensor = a.h > 0.0 ? SensorModel::cone(a.rs, a.h) : SensorModel::sphere(a.rs);
  std::vector<AuvPose> fleet;
  for (const auto& p : fleet_positions) fleet.push_back({p, {0, 0, -1}, sensor});

  PlannerConfig cfg;
  cfg.v_e = a.ve;
  cfg.v_p = a.vp;
  cfg.sensor = sensor;
  cfg.safety_margin = a.margin;
  cfg.max_enclosure_steps = a.max_steps;
  const Planner planner(map, cfg);

  std::vector<double> radii;
  if (a.enclosure) {
    radii.push_back(*a.enclosure);
  } else {
    for (std::size_t m = 0; m <= a.max_steps; ++m) radii.push_back(static_cast<double>(m) * map->cell_size());
  }
  std::optional<ContainingPlan> chosen;
  std::optional<ContainingPlan> first;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    ContainingPlan plan;
    try {
      plan = planner.containing_plan_for_radius(fleet, sighting, radii[i]);
    } catch (const ContainmentImpossible&) {
      if (i == 0) throw;
      break;
    }
    debug("enclosure " + fmt(radii[i]) + ": " + std::to_string(plan.slots.size()) + " discs, bottleneck " +
          fmt(plan.assignment.bottleneck) + ", deadline " + fmt(plan.deadline));
    if (!first) first = plan;
    if (plan.slots.size() <= fleet.size() && sighting.time + plan.assignment.bottleneck <= plan.deadline) {
      chosen = std::move(plan);
      break;
    }
  }
  const ContainingPlan& plan = chosen ? *chosen : *first;

  ensure_dir(a.out);
  const fs::path out(a.out);
  {
    auto os = open_out(out / "cut_edges.csv");
    write_cut_csv(os, plan.cut, map->width());
  }
  {
    auto os = open_out(out / "barrier.csv");
    write_segments_csv(os, plan.segments);
  }
  {
    auto os = open_out(out / "discs.csv");
    write_cover_csv(os, plan.cover);
  }
  if (plan.slots.size() <= fleet.size()) {
    auto os = open_out(out / "assignment.csv");
    std::vector<Vec3> from;
    std::vector<Vec3> to;
    for (const auto& f : fleet) from.push_back(f.position);
    for (const auto& s : plan.slots) to.push_back(s.position);
    write_assignment_csv(os, plan.assignment, travel_costs(from, to, a.vp));
  }
  std::ostringstream summary;
  summary << "reachable " << (chosen ? 1 : 0) << '\n'
          << "enclosure_radius " << fmt(plan.enclosure_radius) << '\n'
          << "cut_edges " << plan.cut.cut_edges.size() << '\n'
          << "segments " << plan.segments.size() << '\n'
          << "cut_cost " << fmt(plan.cut.total_cost) << '\n'
          << "enclosed_area " << fmt(plan.area) << '\n'
          << "discs " << plan.slots.size() << '\n'
          << "fleet " << fleet.size() << '\n'
          << "bottleneck " << fmt(plan.assignment.bottleneck) << '\n'
          << "deadline " << fmt(plan.deadline) << '\n';
  {
    auto os = open_out(out / "summary.txt");
    os << summary.str();
  }
  std::cout << summary.str();
  return chosen ? kOk : kUnreachable;
}

// ---------------------------------------------------------------- plan-capture

struct CaptureArgs {
  std::size_t n = 0;
  double rs = 0.5 / std::sqrt(3.0);
  double h = 0.0;
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  std::string center = "0,0,0";
  std::string out = "cage";
};

int cmd_plan_capture(const CaptureArgs& a) {
  if (a.n < 4) throw UsageError("--n must be at least 4 for a closed cage");
  if (!(a.rs > 0.0) || !(a.h >= 0.0)) throw UsageError("--rs must be positive and --h non-negative");
  if (a.samples < 1000) throw UsageError("--samples must be at least 1000");
  CaptureCageOptions opts;
  opts.coverage_samples = a.samples;
  opts.coverage_seed = a.seed;
  const auto plan = build_capture_cage(a.n, a.rs, parse_vec3(a.center), a.seed, opts);
  const auto poses = cone_poses(plan.cage, a.h);

  ensure_dir(a.out);
  const fs::path out(a.out);
  {
    auto os = open_out(out / "cage.txt");
    write_cage(os, plan.cage, poses);
  }
  {
    auto os = open_out(out / "mesh.off");
    write_off_mesh(os, plan.cage);
  }
  {
    auto os = open_out(out / "poses.csv");
    os << "x,y,z,ax,ay,az\n";
    for (const auto& p : poses) {
      os << fmt(p.position.x) << ',' << fmt(p.position.y) << ',' << fmt(p.position.z) << ',' << fmt(p.axis.x)
         << ',' << fmt(p.axis.y) << ',' << fmt(p.axis.z) << '\n';
    }
  }
  std::cout << "n " << a.n << '\n'
            << "edges " << plan.cage.edges.size() << '\n'
            << "geometric_radius " << fmt(plan.geometric_radius) << '\n'
            << "radius " << fmt(plan.cage.radius) << '\n'
            << "max_edge " << fmt(plan.cage.max_edge) << '\n'
            << "first_worst_gap " << fmt(plan.first_check.worst_gap) << '\n'
            << "shrunk " << (plan.shrunk ? 1 : 0) << '\n'
            << "worst_gap " << fmt(plan.final_check.worst_gap) << '\n'
            << "verified " << (plan.final_check.ok ? 1 : 0) << '\n';
  return plan.final_check.ok ? kOk : kCoverageFailure;
}

// ---------------------------------------------------------------- thomson-stats

struct StatsArgs {
  std::string n = "4,5,6,10,12,20";
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double rs = 0.5 / std::sqrt(3.0);
  double dt = 0.05;
  double tol = 1e-6;
  std::string out = "-";
};

int cmd_thomson_stats(const StatsArgs& a) {
  if (a.trials < 1) throw UsageError("--trials must be at least 1");
  if (!(a.rs > 0.0) || !(a.dt > 0.0) || !(a.tol > 0.0)) throw UsageError("--rs, --dt and --tol must be positive");
  const auto ns = parse_n_list(a.n);
  for (auto n : ns) {
    if (n < 4) throw UsageError("every N must be at least 4");
  }
  RelaxOptions relax;
  relax.dt = a.dt;
  relax.tol = a.tol;
  std::ostringstream table;
  std::ostringstream radii;
  table << "n,trials,md_mean,md_std,md_min,md_max,fr_mean,fr_std,fr_min,fr_max\n";
  radii << "n,trial,l_max,final_radius\n";
  for (auto n : ns) {
    const auto s = capture_radius_stats(n, a.rs, a.trials, a.seed, relax);
    info("N=" + std::to_string(n) + " max-edge mean " + fmt(s.max_edge.mean));
    table << n << ',' << a.trials << ',' << fmt(s.max_edge.mean) << ',' << fmt(s.max_edge.std) << ','
          << fmt(s.max_edge.min) << ',' << fmt(s.max_edge.max) << ',' << fmt(s.radius.mean) << ','
          << fmt(s.radius.std) << ',' << fmt(s.radius.min) << ',' << fmt(s.radius.max) << '\n';
    for (std::size_t t = 0; t < s.max_edges.size(); ++t) {
      radii << n << ',' << t << ',' << fmt(s.max_edges[t]) << ',' << fmt(s.radii[t]) << '\n';
    }
  }
  if (a.out == "-") {
    std::cout << table.str();
  } else {
    ensure_dir(a.out);
    auto t = open_out(fs::path(a.out) / "table.csv");
    t << table.str();
    auto r = open_out(fs::path(a.out) / "radii.csv");
    r << radii.str();
    std::cout << table.str();
  }
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<double> ve, vp, timestep, horizon, rs, h;
  std::string map;
  std::string out = "-";
};

int cmd_simulate(const SimArgs& a) {
  Scenario sc;
  try {
    sc = load_scenario(a.scenario);
  } catch (const IoError& e) {
    throw UsageError(e.what());
  }
  if (a.seed) sc.seed = *a.seed;
  if (a.ve) sc.v_e = *a.ve;
  if (a.vp) sc.v_p = *a.vp;
  if (a.timestep) sc.timestep = *a.timestep;
  if (a.horizon) sc.horizon = *a.horizon;
  if (a.rs) sc.sensor.r_s = *a.rs;
  if (a.h) {
    sc.sensor.h = *a.h;
    sc.sensor.kind = *a.h > 0.0 ? SensorKind::Cone : SensorKind::Sphere;
  }
  if (!a.map.empty()) sc.map = std::make_shared<const DepthMap>(DepthMap::load(a.map));

  const SimulationResult result = simulate(sc);
  if (a.out == "-") {
    write_event_log(std::cout, result.events);
  } else {
    auto os = open_out(a.out);
    write_event_log(os, result.events);
  }
  std::cerr << "outcome " << to_string(result.outcome) << '\n';
  switch (result.outcome) {
    case Outcome::Captured: return kOk;
    case Outcome::Contained: return kContained;
    case Outcome::Escaped: return kEscaped;
    case Outcome::Exhausted: return kExhausted;
  }
  return kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Caging and capture planner for AUV fleets"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  GenMapArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-map", "Generate a random depth map (DEPTHMAP v1)");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed");
  gen_cmd->add_option("--size", gen.size, "WIDTHxHEIGHT in cells");
  gen_cmd->add_option("--cell", gen.cell, "cell size in metres");
  gen_cmd->add_option("--roughness", gen.roughness, "noise roughness (> 0)");
  gen_cmd->add_option("--island-threshold", gen.island_threshold, "noise level (m) below which cells are land");
  gen_cmd->add_option("--out", gen.out, "output file, '-' for stdout");

  ContainArgs con;
  auto* con_cmd = app.add_subcommand("plan-contain", "Plan a containing cage of vertical sensor walls");
  con_cmd->add_option("--map", con.map, "depth map file");
  con_cmd->add_option("--sighting", con.sighting, "entity sighting x,y,z");
  con_cmd->add_option("--time", con.time, "sighting time (s)");
  con_cmd->add_option("--fleet-at", con.fleet_at, "start point x,y,z shared by --n vehicles");
  con_cmd->add_option("--n", con.n, "vehicles at --fleet-at");
  con_cmd->add_option("--fleet-file", con.fleet_file, "CSV of vehicle start points x,y,z");
  con_cmd->add_option("--rs", con.rs, "sensor disc radius (m)");
  con_cmd->add_option("--h", con.h, "cone height (m), 0 for sphere sensors");
  con_cmd->add_option("--ve", con.ve, "max entity speed (m/s)");
  con_cmd->add_option("--vp", con.vp, "max vehicle speed (m/s)");
  con_cmd->add_option("--margin", con.margin, "deadline safety margin fraction");
  con_cmd->add_option("--enclosure", con.enclosure, "fixed enclosure radius (m)");
  con_cmd->add_option("--max-steps", con.max_steps, "enclosure radii tried, in cells");
  con_cmd->add_option("--out", con.out, "output directory");

  CaptureArgs cap;
  auto* cap_cmd = app.add_subcommand("plan-capture", "Compute a shrinkable spherical capturing cage");
  cap_cmd->add_option("--n", cap.n, "number of vehicles")->required();
  cap_cmd->add_option("--rs", cap.rs, "sensor disc radius (m)");
  cap_cmd->add_option("--h", cap.h, "cone height (m)");
  cap_cmd->add_option("--seed", cap.seed, "RNG seed");
  cap_cmd->add_option("--samples", cap.samples, "coverage verification samples");
  cap_cmd->add_option("--center", cap.center, "cage centre x,y,z");
  cap_cmd->add_option("--out", cap.out, "output directory");

  StatsArgs st;
  auto* st_cmd = app.add_subcommand("thomson-stats", "Max inter-agent distance and cage radius statistics");
  st_cmd->add_option("--n", st.n, "N list, e.g. 4,6,12 or 4-30");
  st_cmd->add_option("--trials", st.trials, "trials per N");
  st_cmd->add_option("--seed", st.seed, "RNG seed");
  st_cmd->add_option("--rs", st.rs, "sensor disc radius");
  st_cmd->add_option("--dt", st.dt, "relaxation step");
  st_cmd->add_option("--tol", st.tol, "force tolerance");
  st_cmd->add_option("--out", st.out, "output directory for table.csv and radii.csv, '-' for stdout only");

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario file through the caging loop");
  sim_cmd->add_option("scenario", sim.scenario, "scenario file")->required();
  sim_cmd->add_option("--seed", sim.seed, "override seed");
  sim_cmd->add_option("--ve", sim.ve, "override max entity speed");
  sim_cmd->add_option("--vp", sim.vp, "override vehicle speed");
  sim_cmd->add_option("--timestep", sim.timestep, "override timestep");
  sim_cmd->add_option("--horizon", sim.horizon, "override horizon");
  sim_cmd->add_option("--rs", sim.rs, "override sensor radius");
  sim_cmd->add_option("--h", sim.h, "override cone height");
  sim_cmd->add_option("--map", sim.map, "override map file");
  sim_cmd->add_option("--out", sim.out, "event log CSV, '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_map(gen);
    if (*con_cmd) return cmd_plan_contain(con);
    if (*cap_cmd) return cmd_plan_capture(cap);
    if (*st_cmd) return cmd_thomson_stats(st);
    if (*sim_cmd) return cmd_simulate(sim);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterError& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kUsage;
  } catch (const ContainmentImpossible& e) {
    std::cerr << "containment impossible: " << e.what() << '\n';
    return kContainmentImpossible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
