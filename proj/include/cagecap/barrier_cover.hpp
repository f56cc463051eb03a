#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "cagecap/geometry.hpp"
#include "cagecap/graphcut.hpp"

namespace cagecap {

struct CoverSolution {
  std::vector<Vec3> disc_centers;
  double disc_radius = 0.0;
  std::size_t covered_samples = 0;
  std::size_t total_samples = 0;
  // Indices into the candidate list, in the order they were picked.
  std::vector<std::size_t> chosen;
  // Uncovered sample count after each pick; strictly decreasing.
  std::vector<std::size_t> uncovered_history;
  // For barrier covers: the segment each disc lies on.
  std::vector<std::size_t> segment_of_disc;
};

// Point on a wall at horizontal offset `along` (m) from base_start and `down` (m) below the surface.
Vec3 point_on_segment(const BarrierSegment& segment, double along, double down);

// Regular lattice on each rectangle including its four corners; pitch <= spacing
// in both directions. Samples are grouped by segment in input order.
std::vector<Vec3> sample_barrier(std::span<const BarrierSegment> segments, double spacing);

// Lattice of disc centres with pitch <= r_s * sqrt(2) / 2 so every point of a
// rectangle is within r_s / 2 of a candidate. An extent not exceeding one pitch
// gets a single candidate at its midpoint.
std::vector<Vec3> candidate_centers(std::span<const BarrierSegment> segments, double r_s);

// Greedy set cover: repeatedly take the candidate disc covering the most still
// uncovered samples (lowest index wins ties) until every sample is covered.
// Throws InfeasibleCover when some sample is farther than r_s from every candidate.
CoverSolution greedy_cover(std::span<const Vec3> samples, std::span<const Vec3> candidates,
                           double r_s);

// Covers each wall independently. Samples use spacing r_s / 2 and the cover test
// uses the shrunk radius r_s - spacing / sqrt(2), so sample coverage implies
// coverage of the whole rectangle by discs of radius r_s.
CoverSolution cover_barrier(std::span<const BarrierSegment> segments, double r_s);

// CSV: x,y,z,segment,radius
void write_cover_csv(std::ostream& os, const CoverSolution& cover);
CoverSolution read_cover_csv(std::istream& is);

}  // namespace cagecap
