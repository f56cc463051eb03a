#pragma once

#include <iosfwd>
#include <string>

#include "cagecap/mission.hpp"

namespace cagecap {

// Scenario files are INI-style: `[section]` headers, `key = value` lines and
// `#` comments. Repeatable keys (start, waypoint, sighting) append in order.
//
//   [map]       file = <path> | generate = seed width height cell_size roughness island_threshold
//               | uniform = depth width height cell_size
//   [fleet]     vp, sensor (sphere|cone), rs, h, start = x y z
//   [entity]    ve, waypoint = t x y z
//   [sightings] sighting = t x y z
//   [sim]       timestep, horizon, seed, safety_margin, shrink_speed
//
// Relative map paths resolve against `base_dir`. Errors carry 1-based line numbers.
Scenario parse_scenario(std::istream& is, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

}  // namespace cagecap
