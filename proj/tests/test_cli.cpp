#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cagecap/bathymetry.hpp"
#include "cagecap/graphcut.hpp"
#include "cagecap/mission.hpp"
#include "cagecap/spherical_cage.hpp"

namespace fs = std::filesystem;
using namespace cagecap;

namespace {

struct Run {
  int code;
  std::string out;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("cagecap_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const std::string cmd = std::string(CAGECAP_CLI) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  std::ifstream is(out);
  std::stringstream ss;
  ss << is.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::size_t data_rows(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) ++n;
  return n ? n - 1 : 0;
}

// 20x20 open water; a two-cell-thick land ring around cell (10,10) with a
// one-cell channel leaving east.
fs::path island_map() {
  const fs::path p = scratch() / "island.txt";
  std::vector<double> d(400, 20.0);
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 20; ++c) {
      const int k = std::max(std::abs(c - 10), std::abs(r - 10));
      if ((k == 2 || k == 3) && !(r == 10 && c > 10)) d[r * 20 + c] = 0.0;
    }
  }
  DepthMap(20, 20, 10.0, d).save(p.string());
  return p;
}

}  // namespace

TEST_CASE("gen-map") {
  const auto p = scratch() / "m7.txt";
  CHECK(run("gen-map --seed 7 --size 64x64 --cell 10 --out " + p.string()).code == 0);
  const auto map = DepthMap::load(p.string());
  CHECK(map.width() == 64);
  CHECK(map == generate_depth_map(7, 64, 64, 10.0, 1.0, 15.0));
  std::stringstream ss;
  map.write(ss);
  CHECK(ss.str() == slurp(p));

  CHECK(run("gen-map --size 64x64").code == 2);
  CHECK(run("gen-map --seed 1 --size 4x4").code == 2);
  CHECK(run("gen-map --seed 1 --size big").code == 2);
  CHECK(run("gen-map --seed 1 --bogus").code == 2);

  const auto flat = scratch() / "flat.txt";
  CHECK(run("gen-map --seed 7 --island-threshold -1 --out " + flat.string()).code == 0);
  const auto f = DepthMap::load(flat.string());
  for (double d : f.depths()) CHECK(d > 0.0);
  CHECK(run("gen-map --seed 7 --out /nonexistent/dir/m.txt").code == 1);
}

TEST_CASE("plan-contain open water") {
  const auto map = scratch() / "open.txt";
  DepthMap(20, 20, 10.0, std::vector<double>(400, 20.0)).save(map.string());
  const auto out = scratch() / "open_plan";
  const auto r = run("plan-contain --map " + map.string() +
                     " --sighting 105,105,-5 --fleet-at 100,60,-5 --n 40 --rs 10 --ve 0.1 --vp 2 --out " +
                     out.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("reachable 1") != std::string::npos);
  CHECK(data_rows(out / "cut_edges.csv") == data_rows(out / "barrier.csv"));
  CHECK(data_rows(out / "discs.csv") > 0);
  CHECK(data_rows(out / "assignment.csv") == data_rows(out / "discs.csv"));
  std::ifstream seg(out / "barrier.csv");
  CHECK(read_segments_csv(seg).size() == data_rows(out / "barrier.csv"));
}

TEST_CASE("plan-contain exploits an island") {
  const auto out = scratch() / "island_plan";
  const auto r = run("plan-contain --map " + island_map().string() +
                     " --sighting 105,105,-5 --fleet-at 160,105,-5 --n 10 --rs 10 --ve 0.05 --vp 2 --enclosure 15 --out " +
                     out.string());
  CHECK(r.code == 0);
  CHECK(data_rows(out / "barrier.csv") < data_rows(out / "cut_edges.csv"));
}

TEST_CASE("plan-contain failures") {
  const auto map = scratch() / "open2.txt";
  DepthMap(20, 20, 10.0, std::vector<double>(400, 20.0)).save(map.string());
  const auto few = run("plan-contain --map " + map.string() +
                       " --sighting 105,105,-5 --fleet-at 100,60,-5 --n 2 --rs 10 --ve 0.1 --vp 2 --out " +
                       (scratch() / "few").string());
  CHECK(few.code == 3);
  CHECK(few.out.find("bottleneck") != std::string::npos);
  CHECK(run("plan-contain --map " + map.string() + " --sighting 5,105,-5 --fleet-at 100,60,-5 --n 40 --out " +
            (scratch() / "edge").string())
            .code == 4);
  CHECK(run("plan-contain --map " + map.string() + " --sighting 105,105,-50 --n 4 --fleet-at 1,1,-1").code == 2);
  CHECK(run("plan-contain --map " + map.string() + " --sighting 105,105 --n 4 --fleet-at 1,1,-1").code == 2);
  CHECK(run("plan-contain --sighting 105,105,-5").code == 2);
}

TEST_CASE("plan-capture") {
  const double rs = 0.5 / std::sqrt(3.0);
  const auto out = scratch() / "cap12";
  std::ostringstream args;
  args.precision(17);
  args << "plan-capture --n 12 --rs " << rs << " --seed 3 --out " << out.string();
  const auto r = run(args.str());
  CHECK(r.code == 0);
  CHECK(r.out.find("edges 30") != std::string::npos);
  CHECK(r.out.find("verified 1") != std::string::npos);
  std::ifstream cage_file(out / "cage.txt");
  const auto cf = read_cage(cage_file);
  CHECK(cf.cage.edges.size() == 30);
  CHECK(cf.poses.size() == 12);
  CHECK(slurp(out / "mesh.off").rfind("OFF", 0) == 0);

  CHECK(run("plan-capture --n 3").code == 2);
  CHECK(run("plan-capture --n 6 --rs -1").code == 2);

  const auto a = scratch() / "cap6a";
  const auto b = scratch() / "cap6b";
  CHECK(run("plan-capture --n 6 --seed 5 --h 0.5 --out " + a.string()).code == 0);
  CHECK(run("plan-capture --n 6 --seed 5 --h 0.5 --out " + b.string()).code == 0);
  for (const char* f : {"cage.txt", "mesh.off", "poses.csv"}) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("thomson-stats") {
  const auto out = scratch() / "stats";
  const auto r = run("thomson-stats --n 4,6 --trials 1 --seed 2 --out " + out.string());
  CHECK(r.code == 0);
  std::ifstream is(out / "table.csv");
  std::string header, row;
  std::getline(is, header);
  CHECK(header == "n,trials,md_mean,md_std,md_min,md_max,fr_mean,fr_std,fr_min,fr_max");
  std::getline(is, row);
  CHECK(row.find("4,1,") == 0);
  CHECK(row.find(",0,") != std::string::npos);
  CHECK(data_rows(out / "radii.csv") == 2);
  CHECK(run("thomson-stats --n 3").code == 2);
  CHECK(run("thomson-stats --n 4 --trials 0").code == 2);
  CHECK(run("thomson-stats --n x").code == 2);
}

TEST_CASE("simulate") {
  const std::string dir = CAGECAP_SCENARIOS;
  const auto log = scratch() / "events.csv";
  CHECK(run("simulate " + dir + "/smoke.scn --out " + log.string()).code == 0);
  std::ifstream is(log);
  const auto events = read_event_log(is);
  REQUIRE_FALSE(events.empty());
  CHECK(events.back().kind == EventKind::Captured);

  CHECK(run("simulate " + dir + "/immobile.scn").code == 8);
  CHECK(run("simulate " + dir + "/smoke.scn --vp 0 --horizon 50").code == 8);

  const auto bad = scratch() / "bad.scn";
  std::ofstream(bad) << "[map]\nuniform = 10 8 8 1\n[fleet]\nvp = ?\n";
  CHECK(run("simulate " + bad.string()).code == 2);
  CHECK(run("simulate /nonexistent.scn").code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("--help").code == 0);
}
