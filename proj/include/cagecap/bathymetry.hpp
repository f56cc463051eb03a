#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cagecap/geometry.hpp"

namespace cagecap {

struct Cell {
  int col = 0;
  int row = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// Square-celled heightfield of water depths. Depth 0 marks land (islands).
// The free space F is every point below the surface plane z = 0 and above the
// seabed z = -depth of the cell it lies over.
class DepthMap {
 public:
  DepthMap(int width, int height, double cell_size, std::vector<double> depths);

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  std::size_t cell_count() const { return depths_.size(); }
  const std::vector<double>& depths() const { return depths_; }

  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.row) * width_ + c.col; }
  Cell cell(std::size_t index) const {
    return {static_cast<int>(index % width_), static_cast<int>(index / width_)};
  }
  bool in_bounds(Cell c) const {
    return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_;
  }
  double depth(Cell c) const { return depths_[index(c)]; }
  double depth(std::size_t index) const { return depths_[index]; }
  bool is_land(std::size_t index) const { return depths_[index] == 0.0; }
  // Cells on the outermost ring stand in for "escaping from the map".
  bool on_boundary(Cell c) const {
    return c.col == 0 || c.row == 0 || c.col == width_ - 1 || c.row == height_ - 1;
  }

  Vec2 cell_center(Cell c) const {
    return {(c.col + 0.5) * cell_size_, (c.row + 0.5) * cell_size_};
  }
  double extent_x() const { return width_ * cell_size_; }
  double extent_y() const { return height_ * cell_size_; }

  // Cell under a horizontal position, empty when outside the map.
  std::optional<Cell> cell_at(double x, double y) const;
  // Closed-set membership in F: over a water cell (or on the border of one), at
  // or below the surface and at or above that cell's seabed.
  bool in_free_space(const Vec3& p) const;

  // DEPTHMAP v1 text format; round-trips bit-exactly.
  void write(std::ostream& os) const;
  static DepthMap read(std::istream& is);
  void save(const std::string& path) const;
  static DepthMap load(const std::string& path);

  friend bool operator==(const DepthMap&, const DepthMap&) = default;

 private:
  int width_;
  int height_;
  double cell_size_;
  std::vector<double> depths_;
};

// Maximum depth of generated maps before the +1 m shoreline offset.
inline constexpr double kGeneratedDepthRange = 50.0;

// Smoothed value noise: a random lattice, bilinear upsampling and box-blur passes.
// Larger roughness means a finer lattice and fewer blur passes. The normalized
// field spans 0..kGeneratedDepthRange m; cells below island_threshold become land.
DepthMap generate_depth_map(std::uint64_t seed, int width, int height, double cell_size,
                            double roughness, double island_threshold);

struct Sighting {
  Vec3 position;
  double time = 0.0;
};

struct Containment {
  bool contained = false;
  bool off_map = false;  // point outside the horizontal map extent
};

// Everything the entity could have reached since its last sighting: the closed
// Euclidean ball of radius v_e (t - t_k) around the sighting, clipped to F.
class ContaminatedSet {
 public:
  ContaminatedSet(Sighting origin, double max_entity_speed, std::shared_ptr<const DepthMap> map);

  const Sighting& origin() const { return origin_; }
  double max_entity_speed() const { return max_speed_; }
  const DepthMap& map() const { return *map_; }
  const std::shared_ptr<const DepthMap>& map_ptr() const { return map_; }

  double radius(double t) const;
  Containment contains(const Vec3& point, double t) const;
  // Sorted indices of water cells whose centres lie inside the horizontal
  // projection of the growth ball, always including the sighting cell.
  std::vector<std::size_t> cells(double t) const;
  // Same selection for an explicit horizontal radius.
  std::vector<std::size_t> cells_within(double radius) const;

 private:
  Sighting origin_;
  double max_speed_;
  std::shared_ptr<const DepthMap> map_;
};

double contaminated_radius(const ContaminatedSet& cs, double t);
Containment contains(const ContaminatedSet& cs, const Vec3& point, double t);
std::vector<std::size_t> contaminated_cells(const ContaminatedSet& cs, double t);

}  // namespace cagecap
