#include "cagecap/bathymetry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "cagecap/errors.hpp"

namespace cagecap {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ValidationError("expected a number, got '" + token + "'", line);
  }
  return v;
}

std::vector<double> box_blur(const std::vector<double>& field, int width, int height) {
  std::vector<double> out(field.size());
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double sum = 0.0;
      int n = 0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = std::clamp(r + dr, 0, height - 1);
          const int cc = std::clamp(c + dc, 0, width - 1);
          sum += field[static_cast<std::size_t>(rr) * width + cc];
          ++n;
        }
      }
      out[static_cast<std::size_t>(r) * width + c] = sum / n;
    }
  }
  return out;
}

}  // namespace

DepthMap::DepthMap(int width, int height, double cell_size, std::vector<double> depths)
    : width_(width), height_(height), cell_size_(cell_size), depths_(std::move(depths)) {
  if (width < 2 || height < 2) {
    throw ParameterError("depth map must be at least 2x2 cells");
  }
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ParameterError("cell_size must be positive and finite");
  }
  if (depths_.size() != static_cast<std::size_t>(width) * height) {
    throw ParameterError("depth count does not match width*height");
  }
  for (double d : depths_) {
    if (!std::isfinite(d) || d < 0.0) {
      throw ParameterError("depths must be finite and non-negative");
    }
  }
}

std::optional<Cell> DepthMap::cell_at(double x, double y) const {
  if (!(x >= 0.0 && y >= 0.0 && x <= extent_x() && y <= extent_y())) {
    return std::nullopt;
  }
  // The far edges belong to the last row/column.
  const int col = std::min(static_cast<int>(x / cell_size_), width_ - 1);
  const int row = std::min(static_cast<int>(y / cell_size_), height_ - 1);
  return Cell{col, row};
}

bool DepthMap::in_free_space(const Vec3& p) const {
  if (!cell_at(p.x, p.y) || p.z > 0.0) return false;
  // Closed set: a point on a shared cell border belongs to F if any adjacent
  // water column reaches down to it.
  const int col = static_cast<int>(std::floor(p.x / cell_size_));
  const int row = static_cast<int>(std::floor(p.y / cell_size_));
  const bool on_x_border = p.x == col * cell_size_;
  const bool on_y_border = p.y == row * cell_size_;
  for (int dc = on_x_border ? -1 : 0; dc <= 0; ++dc) {
    for (int dr = on_y_border ? -1 : 0; dr <= 0; ++dr) {
      const Cell c{col + dc, row + dr};
      if (!in_bounds(c)) continue;
      const double d = depth(c);
      if (d > 0.0 && p.z >= -d) return true;
    }
  }
  return false;
}

void DepthMap::write(std::ostream& os) const {
  os << "DEPTHMAP v1\n" << width_ << ' ' << height_ << ' ' << format_double(cell_size_) << '\n';
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      if (c) os << ' ';
      os << format_double(depths_[static_cast<std::size_t>(r) * width_ + c]);
    }
    os << '\n';
  }
}

DepthMap DepthMap::read(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line() || line.substr(0, 11) != "DEPTHMAP v1") {
    throw ValidationError("missing 'DEPTHMAP v1' header", line_no);
  }
  if (!next_line()) throw ValidationError("missing dimensions line", line_no);
  std::istringstream dims(line);
  std::string w_tok, h_tok, cs_tok;
  if (!(dims >> w_tok >> h_tok >> cs_tok)) {
    throw ValidationError("expected 'width height cell_size'", line_no);
  }
  const double w = parse_double(w_tok, line_no);
  const double h = parse_double(h_tok, line_no);
  if (w != std::floor(w) || h != std::floor(h) || w < 2 || h < 2 || w > 1e6 || h > 1e6) {
    throw ValidationError("width and height must be integers >= 2", line_no);
  }
  const double cs = parse_double(cs_tok, line_no);
  std::vector<double> depths;
  depths.reserve(static_cast<std::size_t>(w * h));
  while (next_line()) {
    std::istringstream row(line);
    std::string tok;
    while (row >> tok) {
      const double d = parse_double(tok, line_no);
      if (!(d >= 0.0)) throw ValidationError("depth must be non-negative", line_no);
      depths.push_back(d);
    }
  }
  if (depths.size() != static_cast<std::size_t>(w * h)) {
    throw ValidationError("expected " + std::to_string(static_cast<long>(w * h)) +
                              " depth values, found " + std::to_string(depths.size()),
                          line_no);
  }
  try {
    return DepthMap(static_cast<int>(w), static_cast<int>(h), cs, std::move(depths));
  } catch (const ParameterError& e) {
    throw ValidationError(e.what());
  }
}

void DepthMap::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write(os);
  if (!os) throw IoError("failed writing '" + path + "'");
}

DepthMap DepthMap::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "'");
  return read(is);
}

DepthMap generate_depth_map(std::uint64_t seed, int width, int height, double cell_size,
                            double roughness, double island_threshold) {
  if (width < 8 || height < 8) throw ParameterError("generated maps need at least 8x8 cells");
  if (!(roughness > 0.0)) throw ParameterError("roughness must be positive");
  if (!(cell_size > 0.0)) throw ParameterError("cell_size must be positive");

  const int pitch = std::max(2, static_cast<int>(std::lround(8.0 / roughness)));
  const int passes = std::max(1, static_cast<int>(std::lround(3.0 / roughness)));
  const int lw = width / pitch + 2;
  const int lh = height / pitch + 2;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> lattice(static_cast<std::size_t>(lw) * lh);
  for (double& v : lattice) v = unit(rng);

  std::vector<double> field(static_cast<std::size_t>(width) * height);
  for (int r = 0; r < height; ++r) {
    const double fy = static_cast<double>(r) / pitch;
    const int iy = static_cast<int>(fy);
    const double ty = fy - iy;
    for (int c = 0; c < width; ++c) {
      const double fx = static_cast<double>(c) / pitch;
      const int ix = static_cast<int>(fx);
      const double tx = fx - ix;
      auto at = [&](int x, int y) { return lattice[static_cast<std::size_t>(y) * lw + x]; };
      const double top = at(ix, iy) * (1 - tx) + at(ix + 1, iy) * tx;
      const double bottom = at(ix, iy + 1) * (1 - tx) + at(ix + 1, iy + 1) * tx;
      field[static_cast<std::size_t>(r) * width + c] = top * (1 - ty) + bottom * ty;
    }
  }
  for (int p = 0; p < passes; ++p) field = box_blur(field, width, height);

  const auto [lo_it, hi_it] = std::minmax_element(field.begin(), field.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  const double shore = std::max(island_threshold, 0.0);
  std::vector<double> depths(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double f = kGeneratedDepthRange * (span > 0.0 ? (field[i] - lo) / span : 0.5);
    depths[i] = f < island_threshold ? 0.0 : 1.0 + (f - shore);
  }
  return DepthMap(width, height, cell_size, std::move(depths));
}

ContaminatedSet::ContaminatedSet(Sighting origin, double max_entity_speed,
                                 std::shared_ptr<const DepthMap> map)
    : origin_(origin), max_speed_(max_entity_speed), map_(std::move(map)) {
  if (!map_) throw ParameterError("contaminated set needs a map");
  if (!(max_entity_speed >= 0.0) || !std::isfinite(max_entity_speed)) {
    throw ParameterError("max entity speed must be finite and non-negative");
  }
}

double ContaminatedSet::radius(double t) const {
  if (t < origin_.time) {
    throw TemporalOrderError("query time precedes the sighting");
  }
  return max_speed_ * (t - origin_.time);
}

Containment ContaminatedSet::contains(const Vec3& point, double t) const {
  const double r = radius(t);
  if (!map_->cell_at(point.x, point.y)) return {false, true};
  return {distance(point, origin_.position) <= r && map_->in_free_space(point), false};
}

std::vector<std::size_t> ContaminatedSet::cells(double t) const { return cells_within(radius(t)); }

std::vector<std::size_t> ContaminatedSet::cells_within(double r) const {
  const DepthMap& map = *map_;
  const Vec3& e = origin_.position;
  const auto home = map.cell_at(e.x, e.y);
  if (!home) throw ContainmentImpossible("sighting lies outside the map");
  // Water cells whose closed footprint holds the sighting; more than one when
  // it sits on a cell border.
  const double cs = map.cell_size();
  std::vector<Cell> homes;
  for (int dc = -1; dc <= 1; ++dc) {
    for (int dr = -1; dr <= 1; ++dr) {
      const Cell c{home->col + dc, home->row + dr};
      if (!map.in_bounds(c) || map.is_land(map.index(c))) continue;
      if (e.x >= c.col * cs && e.x <= (c.col + 1) * cs && e.y >= c.row * cs && e.y <= (c.row + 1) * cs) {
        homes.push_back(c);
      }
    }
  }
  if (homes.empty()) throw ParameterError("sighting lies over land");
  if (e.x - r <= 0.0 || e.y - r <= 0.0 || e.x + r >= map.extent_x() ||
      e.y + r >= map.extent_y()) {
    throw ContainmentImpossible("contaminated ball reaches the map edge");
  }
  const int c0 = std::max(0, static_cast<int>(std::floor((e.x - r) / cs)));
  const int c1 = std::min(map.width() - 1, static_cast<int>(std::floor((e.x + r) / cs)));
  const int r0 = std::max(0, static_cast<int>(std::floor((e.y - r) / cs)));
  const int r1 = std::min(map.height() - 1, static_cast<int>(std::floor((e.y + r) / cs)));
  std::vector<std::size_t> out;
  for (const Cell& c : homes) {
    if (map.on_boundary(c)) throw ContainmentImpossible("contaminated cell on the map boundary ring");
    out.push_back(map.index(c));
  }
  for (int row = r0; row <= r1; ++row) {
    for (int col = c0; col <= c1; ++col) {
      const Cell c{col, row};
      const std::size_t idx = map.index(c);
      if (map.is_land(idx) || std::find(homes.begin(), homes.end(), c) != homes.end()) continue;
      const Vec2 centre = map.cell_center(c);
      if ((centre - e.horizontal()).norm() <= r) {
        if (map.on_boundary(c)) {
          throw ContainmentImpossible("contaminated cell on the map boundary ring");
        }
        out.push_back(idx);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

double contaminated_radius(const ContaminatedSet& cs, double t) { return cs.radius(t); }

Containment contains(const ContaminatedSet& cs, const Vec3& point, double t) {
  return cs.contains(point, t);
}

std::vector<std::size_t> contaminated_cells(const ContaminatedSet& cs, double t) {
  return cs.cells(t);
}

}  // namespace cagecap
