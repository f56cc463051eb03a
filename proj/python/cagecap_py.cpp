#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <memory>

#include "cagecap/assignment.hpp"
#include "cagecap/barrier_cover.hpp"
#include "cagecap/bathymetry.hpp"
#include "cagecap/errors.hpp"
#include "cagecap/graphcut.hpp"
#include "cagecap/mission.hpp"
#include "cagecap/scenario.hpp"
#include "cagecap/spherical_cage.hpp"

namespace py = pybind11;
using namespace cagecap;

namespace {

using Triple = std::array<double, 3>;

Vec3 vec(const Triple& t) { return {t[0], t[1], t[2]}; }
Triple tup(const Vec3& v) { return {v.x, v.y, v.z}; }

std::vector<Triple> tups(const std::vector<Vec3>& vs) {
  std::vector<Triple> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(tup(v));
  return out;
}

std::vector<BarrierSegment> segments_from(const std::vector<std::array<double, 5>>& rows) {
  std::vector<BarrierSegment> out;
  for (const auto& r : rows) out.push_back({{r[0], r[1]}, {r[2], r[3]}, r[4]});
  return out;
}

py::dict cut_dict(const CutResult& cut, const DepthMap& map) {
  py::list edges;
  for (const auto& e : cut.cut_edges) edges.append(py::make_tuple(e.a, e.b, e.cost));
  py::list segments;
  for (const auto& s : cut_to_barrier_segments(cut, map)) {
    segments.append(py::make_tuple(s.base_start.x, s.base_start.y, s.base_end.x, s.base_end.y, s.depth));
  }
  std::vector<int> sides;
  for (auto s : cut.side_labels) sides.push_back(s == Side::Source ? 1 : 0);
  py::dict d;
  d["cut_edges"] = edges;
  d["total_cost"] = cut.total_cost;
  d["max_flow"] = cut.max_flow;
  d["source_side"] = sides;
  d["segments"] = segments;
  d["enclosed_area"] = enclosed_area(cut, map);
  return d;
}

py::dict cage_dict(const CaptureCagePlan& plan) {
  py::dict d;
  d["radius"] = plan.cage.radius;
  d["geometric_radius"] = plan.geometric_radius;
  d["max_edge"] = plan.cage.max_edge;
  d["centers"] = tups(plan.cage.centers);
  d["edges"] = plan.cage.edges;
  d["triangles"] = plan.cage.triangles;
  d["verified"] = plan.final_check.ok;
  d["worst_gap"] = plan.final_check.worst_gap;
  d["shrunk"] = plan.shrunk;
  return d;
}

py::dict summary_dict(const Summary& s) {
  py::dict d;
  d["mean"] = s.mean;
  d["std"] = s.std;
  d["min"] = s.min;
  d["max"] = s.max;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cagecap, m) {
  m.doc() = "AUV caging and capture planner";

  auto base = py::register_exception<CageError>(m, "CageError");
  py::register_exception<ParameterError>(m, "ParameterError", base);
  py::register_exception<TemporalOrderError>(m, "TemporalOrderError", base);
  py::register_exception<ContainmentImpossible>(m, "ContainmentImpossible", base);
  py::register_exception<InsufficientAgents>(m, "InsufficientAgents", base);
  py::register_exception<InfeasibleCover>(m, "InfeasibleCover", base);
  py::register_exception<NumericError>(m, "NumericError", base);
  py::register_exception<GeometryError>(m, "GeometryError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<IoError>(m, "IoError", base);

  py::class_<DepthMap, std::shared_ptr<DepthMap>>(m, "DepthMap")
      .def(py::init<int, int, double, std::vector<double>>(), py::arg("width"), py::arg("height"),
           py::arg("cell_size"), py::arg("depths"))
      .def_property_readonly("width", &DepthMap::width)
      .def_property_readonly("height", &DepthMap::height)
      .def_property_readonly("cell_size", &DepthMap::cell_size)
      .def_property_readonly("depths", &DepthMap::depths)
      .def("depth", py::overload_cast<std::size_t>(&DepthMap::depth, py::const_), py::arg("index"))
      .def("in_free_space", [](const DepthMap& map, const Triple& p) { return map.in_free_space(vec(p)); })
      .def("save", &DepthMap::save)
      .def_static("load", &DepthMap::load)
      .def("__eq__", [](const DepthMap& a, const DepthMap& b) { return a == b; })
      .def("__repr__", [](const DepthMap& map) {
        return "<DepthMap " + std::to_string(map.width()) + "x" + std::to_string(map.height()) + ">";
      });

  m.def("generate_depth_map", &generate_depth_map, py::arg("seed"), py::arg("width"), py::arg("height"),
        py::arg("cell_size"), py::arg("roughness") = 1.0, py::arg("island_threshold") = 15.0);

  m.def(
      "contaminated_cells",
      [](const DepthMap& map, const Triple& sighting, double t_k, double v_e, double t) {
        const ContaminatedSet cs({vec(sighting), t_k}, v_e, std::make_shared<const DepthMap>(map));
        return cs.cells(t);
      },
      py::arg("map"), py::arg("sighting"), py::arg("t_k"), py::arg("v_e"), py::arg("t"),
      "Sorted indices of water cells inside the growth ball at time t.");

  m.def(
      "min_cut",
      [](const DepthMap& map, const std::vector<std::size_t>& contaminated) {
        return cut_dict(min_cut(build_barrier_graph(map, contaminated)), map);
      },
      py::arg("map"), py::arg("contaminated"),
      "Minimum-area barrier around the contaminated cells; segments are (x0, y0, x1, y1, depth).");

  m.def(
      "cover_barrier",
      [](const std::vector<std::array<double, 5>>& segments, double r_s) {
        return tups(cover_barrier(segments_from(segments), r_s).disc_centers);
      },
      py::arg("segments"), py::arg("r_s"));

  m.def(
      "greedy_cover",
      [](const std::vector<Triple>& samples, const std::vector<Triple>& candidates, double r_s) {
        std::vector<Vec3> s, c;
        for (const auto& t : samples) s.push_back(vec(t));
        for (const auto& t : candidates) c.push_back(vec(t));
        return greedy_cover(s, c, r_s).chosen;
      },
      py::arg("samples"), py::arg("candidates"), py::arg("r_s"), "Indices of the chosen candidates in pick order.");

  m.def(
      "solve_lbap",
      [](const std::vector<std::vector<double>>& rows) {
        const std::size_t agents = rows.size();
        const std::size_t slots = agents ? rows[0].size() : 0;
        std::vector<double> flat;
        for (const auto& r : rows) {
          if (r.size() != slots) throw ParameterError("cost matrix rows differ in length");
          flat.insert(flat.end(), r.begin(), r.end());
        }
        const auto a = solve_lbap(CostMatrix(agents, slots, flat));
        return py::make_tuple(a.slot_to_agent, a.bottleneck);
      },
      py::arg("costs"), "Rows are agents, columns slots. Returns (slot_to_agent, bottleneck).");

  m.def(
      "build_capture_cage",
      [](std::size_t n, double r_s, const Triple& center, std::uint64_t seed) {
        return cage_dict(build_capture_cage(n, r_s, vec(center), seed));
      },
      py::arg("n"), py::arg("r_s"), py::arg("center") = Triple{0, 0, 0}, py::arg("seed") = 1);

  m.def(
      "relax_sphere_points",
      [](std::size_t n, std::uint64_t seed) { return tups(relax_charges(init_sphere_points(n, seed)).points); },
      py::arg("n"), py::arg("seed") = 1);

  m.def(
      "capture_radius_stats",
      [](std::size_t n, double r_s, std::size_t trials, std::uint64_t seed) {
        const auto s = capture_radius_stats(n, r_s, trials, seed);
        py::dict d;
        d["max_edge"] = summary_dict(s.max_edge);
        d["radius"] = summary_dict(s.radius);
        d["max_edges"] = s.max_edges;
        d["radii"] = s.radii;
        return d;
      },
      py::arg("n"), py::arg("r_s"), py::arg("trials") = 100, py::arg("seed") = 1);

  m.def(
      "simulate",
      [](const std::string& scenario_path) {
        const auto res = simulate(load_scenario(scenario_path));
        py::list events;
        for (const auto& e : res.events) events.append(py::make_tuple(e.time, to_string(e.kind), e.payload));
        return py::make_tuple(to_string(res.outcome), events);
      },
      py::arg("scenario_path"), "Returns (outcome, [(time, event_kind, payload), ...]).");
}
