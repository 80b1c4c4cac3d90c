#include "takt/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace takt {

namespace {

// Distance from p to segment (a, b); falls back to point distance when the
// segment is degenerate.
double segment_deviation(const Point2& p, const Point2& a, const Point2& b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len_sq = vx * vx + vy * vy;
  if (len_sq == 0.0) return point_dist(p, a);
  double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / len_sq;
  t = std::clamp(t, 0.0, 1.0);
  const Point2 proj{a.x + t * vx, a.y + t * vy};
  return point_dist(p, proj);
}

}  // namespace

Trajectory rdp_to_k(const Trajectory& raw, int k) {
  const int64_t n = raw.size();
  if (n < 2) throw std::invalid_argument("rdp_to_k: need at least 2 points");
  if (k < 2) throw std::invalid_argument("rdp_to_k: k must be >= 2");
  if (n <= k) return raw;

  std::vector<int64_t> selected = {0, n - 1};
  std::vector<char> taken(static_cast<size_t>(n), 0);
  taken[0] = taken[static_cast<size_t>(n - 1)] = 1;

  while (static_cast<int64_t>(selected.size()) < k) {
    double best_dev = -1.0;
    int64_t best_idx = -1;
    // selected is kept sorted; walk gaps and score the points inside each.
    for (size_t g = 0; g + 1 < selected.size(); ++g) {
      const int64_t lo = selected[g];
      const int64_t hi = selected[g + 1];
      for (int64_t i = lo + 1; i < hi; ++i) {
        const double dev = segment_deviation(raw.points[static_cast<size_t>(i)],
                                             raw.points[static_cast<size_t>(lo)],
                                             raw.points[static_cast<size_t>(hi)]);
        if (dev > best_dev) {  // ties keep the earlier index
          best_dev = dev;
          best_idx = i;
        }
      }
    }
    taken[static_cast<size_t>(best_idx)] = 1;
    selected.insert(std::upper_bound(selected.begin(), selected.end(), best_idx),
                    best_idx);
  }

  Trajectory out;
  out.points.reserve(selected.size());
  for (int64_t idx : selected) out.points.push_back(raw.points[static_cast<size_t>(idx)]);
  return out;
}

double dtw_distance(const Trajectory& a, const Trajectory& b) {
  const int64_t n = a.size();
  const int64_t m = b.size();
  if (n == 0 || m == 0) throw std::invalid_argument("dtw_distance: empty trajectory");

  std::vector<double> cost(static_cast<size_t>(n * m));
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < m; ++j)
      cost[static_cast<size_t>(i * m + j)] =
          point_dist(a.points[static_cast<size_t>(i)], b.points[static_cast<size_t>(j)]);

  // The distance is the minimum *mean* per-step cost, so the DP is stratified
  // by exact path length: prev[i*m+j] holds the cheapest path of length l
  // ending at (i, j).
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(static_cast<size_t>(n * m), inf);
  std::vector<double> cur(static_cast<size_t>(n * m), inf);
  prev[0] = cost[0];

  double best = (n == 1 && m == 1) ? cost[0] : inf;
  const int64_t max_len = n + m - 1;
  for (int64_t l = 2; l <= max_len; ++l) {
    std::fill(cur.begin(), cur.end(), inf);
    for (int64_t i = 0; i < n; ++i) {
      for (int64_t j = 0; j < m; ++j) {
        double pre = inf;
        if (i > 0) pre = std::min(pre, prev[static_cast<size_t>((i - 1) * m + j)]);
        if (j > 0) pre = std::min(pre, prev[static_cast<size_t>(i * m + j - 1)]);
        if (i > 0 && j > 0)
          pre = std::min(pre, prev[static_cast<size_t>((i - 1) * m + j - 1)]);
        if (pre < inf)
          cur[static_cast<size_t>(i * m + j)] = pre + cost[static_cast<size_t>(i * m + j)];
      }
    }
    const double end = cur[static_cast<size_t>(n * m - 1)];
    if (end < inf) best = std::min(best, end / static_cast<double>(l));
    std::swap(prev, cur);
  }
  return best;
}

std::vector<int64_t> subsample_starts(int64_t frames, int n, int64_t min_tail,
                                      uint64_t rng_seed) {
  if (n <= 0) throw std::invalid_argument("subsample_starts: n must be positive");
  if (frames <= n) throw std::invalid_argument("subsample_starts: demo too short");
  const int64_t n_candidates = frames - min_tail + 1;  // starts 0..frames-min_tail
  if (n_candidates < n)
    throw std::invalid_argument("subsample_starts: demo too short for tail constraint");

  std::vector<int64_t> candidates(static_cast<size_t>(n_candidates));
  for (int64_t i = 0; i < n_candidates; ++i) candidates[static_cast<size_t>(i)] = i;

  Rng rng(rng_seed);
  for (int i = 0; i < n; ++i) {
    const int64_t j = i + rng.uniform_int(n_candidates - i);
    std::swap(candidates[static_cast<size_t>(i)], candidates[static_cast<size_t>(j)]);
  }
  std::vector<int64_t> out(candidates.begin(), candidates.begin() + n);
  std::sort(out.begin(), out.end());
  return out;
}

std::string trajectory_to_text(const Trajectory& t) {
  std::string s = "[";
  char buf[64];
  for (int64_t i = 0; i < t.size(); ++i) {
    const Point2& p = t.points[static_cast<size_t>(i)];
    std::snprintf(buf, sizeof(buf), "%s(%.3f,%.3f)", i ? "," : "", p.x, p.y);
    s += buf;
  }
  s += "]";
  return s;
}

bool trajectory_from_text(const std::string& text, Trajectory& out) {
  out.points.clear();
  const char* p = text.c_str();
  auto skip_ws = [&p] { while (*p == ' ' || *p == '\t' || *p == '\n') ++p; };
  auto expect = [&p](char c) {
    if (*p != c) return false;
    ++p;
    return true;
  };
  auto number = [&p](double& v) {
    char* end = nullptr;
    v = std::strtod(p, &end);
    if (end == p) return false;
    p = end;
    return true;
  };

  skip_ws();
  if (!expect('[')) return false;
  bool first = true;
  while (true) {
    skip_ws();
    if (*p == ']') {
      ++p;
      break;
    }
    if (!first && !expect(',')) return false;
    skip_ws();
    Point2 pt;
    if (!expect('(') || !number(pt.x) || !expect(',') || !number(pt.y) ||
        !expect(')'))
      return false;
    out.points.push_back(pt);
    first = false;
  }
  skip_ws();
  return *p == '\0' && !out.points.empty();
}

}  // namespace takt
