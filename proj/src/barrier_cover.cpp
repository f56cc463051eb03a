#include "cagecap/barrier_cover.hpp"

#include <cmath>
#include <ostream>

#include "cagecap/errors.hpp"
#include "text_util.hpp"

namespace cagecap {

namespace {

// Number of lattice points so consecutive points are at most `pitch` apart.
int lattice_count(double extent, double pitch) {
  return static_cast<int>(std::ceil(extent / pitch - 1e-9)) + 1;
}

double lattice_coord(double extent, int k, int n) {
  return n == 1 ? extent / 2.0 : extent * static_cast<double>(k) / (n - 1);
}

}  // namespace

Vec3 point_on_segment(const BarrierSegment& segment, double along, double down) {
  const Vec2 d = segment.base_end - segment.base_start;
  const double t = along / segment.width();
  return {segment.base_start.x + t * d.x, segment.base_start.y + t * d.y, -down};
}

std::vector<Vec3> sample_barrier(std::span<const BarrierSegment> segments, double spacing) {
  if (!(spacing > 0.0)) throw ParameterError("sample spacing must be positive");
  std::vector<Vec3> out;
  for (const auto& s : segments) {
    const double width = s.width();
    const int nu = lattice_count(width, spacing);
    const int nv = lattice_count(s.depth, spacing);
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nv; ++j) {
        out.push_back(point_on_segment(s, width * i / (nu - 1), s.depth * j / (nv - 1)));
      }
    }
  }
  return out;
}

std::vector<Vec3> candidate_centers(std::span<const BarrierSegment> segments, double r_s) {
  if (!(r_s > 0.0)) throw ParameterError("sensor radius must be positive");
  const double pitch = r_s * std::sqrt(2.0) / 2.0;
  std::vector<Vec3> out;
  for (const auto& s : segments) {
    const double width = s.width();
    const int nu = width <= pitch ? 1 : lattice_count(width, pitch);
    const int nv = s.depth <= pitch ? 1 : lattice_count(s.depth, pitch);
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nv; ++j) {
        out.push_back(point_on_segment(s, lattice_coord(width, i, nu), lattice_coord(s.depth, j, nv)));
      }
    }
  }
  return out;
}

CoverSolution greedy_cover(std::span<const Vec3> samples, std::span<const Vec3> candidates,
                           double r_s) {
  if (!(r_s > 0.0)) throw ParameterError("sensor radius must be positive");
  const double r2 = r_s * r_s;
  std::vector<std::vector<std::size_t>> covers(candidates.size());
  std::vector<char> reachable(samples.size(), 0);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (std::size_t s = 0; s < samples.size(); ++s) {
      if ((samples[s] - candidates[c]).squared_norm() <= r2) {
        covers[c].push_back(s);
        reachable[s] = 1;
      }
    }
  }
  for (std::size_t s = 0; s < samples.size(); ++s) {
    if (!reachable[s]) {
      throw InfeasibleCover(s, "sample " + std::to_string(s) + " is outside every candidate disc");
    }
  }

  CoverSolution sol;
  sol.disc_radius = r_s;
  sol.total_samples = samples.size();
  std::vector<char> covered(samples.size(), 0);
  std::size_t uncovered = samples.size();
  while (uncovered > 0) {
    std::size_t best = 0;
    std::size_t best_gain = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      std::size_t gain = 0;
      for (std::size_t s : covers[c]) gain += covered[s] ? 0 : 1;
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    for (std::size_t s : covers[best]) covered[s] = 1;
    uncovered -= best_gain;
    sol.chosen.push_back(best);
    sol.disc_centers.push_back(candidates[best]);
    sol.uncovered_history.push_back(uncovered);
  }
  sol.covered_samples = samples.size();
  return sol;
}

CoverSolution cover_barrier(std::span<const BarrierSegment> segments, double r_s) {
  if (!(r_s > 0.0)) throw ParameterError("sensor radius must be positive");
  const double spacing = r_s / 2.0;
  const double effective = r_s - spacing / std::sqrt(2.0);
  CoverSolution total;
  total.disc_radius = r_s;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto one = segments.subspan(i, 1);
    const auto samples = sample_barrier(one, spacing);
    const auto candidates = candidate_centers(one, r_s);
    const auto part = greedy_cover(samples, candidates, effective);
    for (const auto& c : part.disc_centers) {
      total.disc_centers.push_back(c);
      total.segment_of_disc.push_back(i);
    }
    total.covered_samples += part.covered_samples;
    total.total_samples += part.total_samples;
  }
  return total;
}

void write_cover_csv(std::ostream& os, const CoverSolution& cover) {
  using detail::fmt_double;
  os << "x,y,z,segment,radius\n";
  for (std::size_t i = 0; i < cover.disc_centers.size(); ++i) {
    const auto& c = cover.disc_centers[i];
    const long seg = i < cover.segment_of_disc.size() ? static_cast<long>(cover.segment_of_disc[i]) : -1;
    os << fmt_double(c.x) << ',' << fmt_double(c.y) << ',' << fmt_double(c.z) << ',' << seg << ','
       << fmt_double(cover.disc_radius) << '\n';
  }
}

CoverSolution read_cover_csv(std::istream& is) {
  CoverSolution sol;
  for (const auto& f : detail::read_csv_rows(is, 5)) {
    using detail::to_double;
    sol.disc_centers.push_back({to_double(f[0]), to_double(f[1]), to_double(f[2])});
    const long long seg = detail::to_int(f[3]);
    if (seg >= 0) sol.segment_of_disc.push_back(static_cast<std::size_t>(seg));
    sol.disc_radius = to_double(f[4]);
  }
  return sol;
}

}  // namespace cagecap
