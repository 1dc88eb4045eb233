#pragma once

// Brute-force line/cell intersection oracle, independent of the traversal in
// geo.hpp. A cell is crossed iff some point of the segment is owned by it,
// where ownership follows the shared convention: half-open cells, boundary
// points belong to the higher-index side, max edge clamps to n-1.

#include <algorithm>
#include <cmath>
#include <vector>

#include "gridtte/geo.hpp"

namespace gridtte::testing {

inline int oracle_axis_cell(double off, double cell, double total, int n) {
  if (off < 0.0 || off > total) return -1;
  return std::min(static_cast<int>(std::floor(off / cell)), n - 1);
}

inline bool oracle_owns(const GridSpec& spec, const GridCell& c, double px, double py) {
  return oracle_axis_cell(px, spec.cell_width_m, spec.width_m, spec.n) == c.y &&
         oracle_axis_cell(py, spec.cell_height_m, spec.height_m, spec.n) == c.x;
}

struct OracleHit {
  GridCell cell;
  double t_enter;
  double t_exit;
};

// Clip the segment against the closed cell box, then verify ownership at a
// handful of parameters inside the clip; ownership can only fail on excluded
// (upper/right) boundary points, which always sit at the clip ends.
inline std::vector<OracleHit> oracle_segment_cells(const GridSpec& spec, ProjectedPoint a,
                                                   ProjectedPoint b) {
  std::vector<OracleHit> hits;
  double dx = b.x - a.x, dy = b.y - a.y;
  for (int r = 0; r < spec.n; ++r) {
    for (int c = 0; c < spec.n; ++c) {
      double x_lo = c * spec.cell_width_m, x_hi = (c + 1) * spec.cell_width_m;
      double y_lo = r * spec.cell_height_m, y_hi = (r + 1) * spec.cell_height_m;
      double t0 = 0.0, t1 = 1.0;
      bool empty = false;
      auto clip = [&](double lo, double hi, double origin, double delta) {
        if (delta == 0.0) {
          if (origin < lo || origin > hi) empty = true;
          return;
        }
        double ta = (lo - origin) / delta, tb = (hi - origin) / delta;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
      };
      clip(x_lo, x_hi, a.x, dx);
      clip(y_lo, y_hi, a.y, dy);
      if (empty || t0 > t1) continue;

      double span = t1 - t0;
      double cand[5] = {t0, t1, t0 + 0.5 * span, t0 + 1e-3 * span, t1 - 1e-3 * span};
      bool owned = false;
      for (double t : cand) {
        if (oracle_owns(spec, {r, c}, a.x + t * dx, a.y + t * dy)) {
          owned = true;
          break;
        }
      }
      if (owned) hits.push_back({{r, c}, t0, t1});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const OracleHit& l, const OracleHit& r) {
    if (l.t_enter != r.t_enter) return l.t_enter < r.t_enter;
    return l.t_exit < r.t_exit;
  });
  return hits;
}

}  // namespace gridtte::testing
