// Normalized 2D gripper trajectories: rank-based RDP simplification to a
// fixed keypoint count and path-length-normalized DTW distance.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "takt/rng.hpp"

namespace takt {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double point_dist(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

inline double point_dist_sq(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

struct Trajectory {
  std::vector<Point2> points;

  Trajectory() = default;
  explicit Trajectory(std::vector<Point2> p) : points(std::move(p)) {}
  int64_t size() const { return static_cast<int64_t>(points.size()); }
  bool empty() const { return points.empty(); }
  const Point2& front() const { return points.front(); }
  const Point2& back() const { return points.back(); }
};

// Rank-based Ramer-Douglas-Peucker: keeps the raw endpoints and repeatedly
// adds the raw point with maximum perpendicular deviation from the current
// piecewise-linear simplification until min(k, |raw|) points are kept.
// Deviation ties break toward the lowest raw index. Original order is
// preserved. Throws std::invalid_argument for |raw| < 2 or k < 2.
Trajectory rdp_to_k(const Trajectory& raw, int k);

// Minimum over monotone alignments of the mean per-step Euclidean cost
// (alignment cost sum divided by warping path length). Symmetric, zero iff
// the sequences are identical, and bounded by sqrt(2) on the unit square.
// Throws std::invalid_argument if either trajectory is empty.
double dtw_distance(const Trajectory& a, const Trajectory& b);

// n distinct start indices into a demo of `frames` frames, each leaving at
// least `min_tail` subsequent frames. Deterministic under a fixed seed.
// Throws std::invalid_argument when the demo is too short.
std::vector<int64_t> subsample_starts(int64_t frames, int n, int64_t min_tail,
                                      uint64_t rng_seed);

// Text form used in planner answers and trace export:
// [(x1,y1),(x2,y2),...] with three decimal places.
std::string trajectory_to_text(const Trajectory& t);

// Parses the text form back. Returns false on malformed input; in-range
// validation is left to the caller.
bool trajectory_from_text(const std::string& text, Trajectory& out);

}  // namespace takt
