#include "cagecap/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>

#include "cagecap/errors.hpp"
#include "text_util.hpp"

namespace cagecap {

namespace {

std::vector<double> numbers(const std::string& value, std::size_t count, std::size_t line) {
  std::istringstream ss(value);
  std::vector<double> out;
  std::string tok;
  while (ss >> tok) out.push_back(detail::to_double(tok, line));
  if (out.size() != count) {
    throw ValidationError("expected " + std::to_string(count) + " numbers", line);
  }
  return out;
}

}  // namespace

Scenario parse_scenario(std::istream& is, const std::string& base_dir) {
  Scenario sc;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  std::string sensor_kind = "sphere";
  double r_s = 1.0;
  double h = 0.0;
  std::optional<std::size_t> map_line;

  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string text = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') throw ValidationError("unterminated section header", line_no);
      section = detail::trim(text.substr(1, text.size() - 2));
      if (section != "map" && section != "fleet" && section != "entity" && section != "sightings" &&
          section != "sim") {
        throw ValidationError("unknown section '" + section + "'", line_no);
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ValidationError("expected 'key = value'", line_no);
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    if (section.empty()) throw ValidationError("key outside of any section", line_no);
    auto scalar = [&] { return numbers(value, 1, line_no)[0]; };
    auto vec3 = [](const std::vector<double>& v, std::size_t at) { return Vec3{v[at], v[at + 1], v[at + 2]}; };

    try {
      if (section == "map") {
        if (map_line) throw ValidationError("map source given twice", line_no);
        map_line = line_no;
        if (key == "file") {
          std::filesystem::path p(value);
          if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
          sc.map = std::make_shared<const DepthMap>(DepthMap::load(p.string()));
        } else if (key == "generate") {
          const auto v = numbers(value, 6, line_no);
          sc.map = std::make_shared<const DepthMap>(generate_depth_map(
              static_cast<std::uint64_t>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]), v[3], v[4], v[5]));
        } else if (key == "uniform") {
          const auto v = numbers(value, 4, line_no);
          const int w = static_cast<int>(v[1]);
          const int hgt = static_cast<int>(v[2]);
          if (w < 2 || hgt < 2) throw ValidationError("map must be at least 2x2", line_no);
          sc.map = std::make_shared<const DepthMap>(
              DepthMap(w, hgt, v[3], std::vector<double>(static_cast<std::size_t>(w) * hgt, v[0])));
        } else {
          throw ValidationError("unknown map key '" + key + "'", line_no);
        }
      } else if (section == "fleet") {
        if (key == "vp") sc.v_p = scalar();
        else if (key == "sensor") {
          if (value != "sphere" && value != "cone") throw ValidationError("sensor must be sphere or cone", line_no);
          sensor_kind = value;
        } else if (key == "rs") r_s = scalar();
        else if (key == "h") h = scalar();
        else if (key == "start") sc.fleet_start.push_back(vec3(numbers(value, 3, line_no), 0));
        else throw ValidationError("unknown fleet key '" + key + "'", line_no);
      } else if (section == "entity") {
        if (key == "ve") sc.v_e = scalar();
        else if (key == "waypoint") {
          const auto v = numbers(value, 4, line_no);
          sc.trajectory.push_back({v[0], vec3(v, 1)});
        } else throw ValidationError("unknown entity key '" + key + "'", line_no);
      } else if (section == "sightings") {
        if (key != "sighting") throw ValidationError("unknown sightings key '" + key + "'", line_no);
        const auto v = numbers(value, 4, line_no);
        sc.sightings.push_back({vec3(v, 1), v[0]});
      } else if (section == "sim") {
        if (key == "timestep") sc.timestep = scalar();
        else if (key == "horizon") sc.horizon = scalar();
        else if (key == "seed") sc.seed = static_cast<std::uint64_t>(detail::to_int(value, line_no));
        else if (key == "safety_margin") sc.safety_margin = scalar();
        else if (key == "shrink_speed") sc.shrink_speed = scalar();
        else throw ValidationError("unknown sim key '" + key + "'", line_no);
      }
    } catch (const ValidationError&) {
      throw;
    } catch (const CageError& e) {
      throw ValidationError(e.what(), line_no);
    }
  }
  if (!sc.map) throw ValidationError("scenario is missing a [map] source", line_no);
  sc.sensor = SensorModel{sensor_kind == "cone" ? SensorKind::Cone : SensorKind::Sphere, r_s,
                          sensor_kind == "cone" ? h : 0.0};
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open scenario '" + path + "'");
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_scenario(is, parent.empty() ? "." : parent.string());
}

}  // namespace cagecap
