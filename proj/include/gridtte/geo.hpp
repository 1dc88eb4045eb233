#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridtte {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kDegToRad = 0.017453292519943295;

struct GpsPoint {
  double lat = 0.0;  // degrees WGS84
  double lon = 0.0;  // degrees WGS84
  double t = 0.0;    // unix seconds
};

struct BBox {
  double min_lat = 0.0;
  double min_lon = 0.0;
  double max_lat = 0.0;
  double max_lon = 0.0;

  bool contains(double lat, double lon) const {
    return lat >= min_lat && lat <= max_lat && lon >= min_lon && lon <= max_lon;
  }
  bool contains(const GpsPoint& p) const { return contains(p.lat, p.lon); }
};

struct GridCell {
  int x = 0;  // row
  int y = 0;  // column

  friend bool operator==(const GridCell&, const GridCell&) = default;
  friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

inline int chebyshev(const GridCell& a, const GridCell& b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

struct ProjectedPoint {
  double x = 0.0;  // meters east of bbox min corner
  double y = 0.0;  // meters north of bbox min corner
};

// N x N partition of a bounding box. Cell geometry uses an equirectangular
// projection at the bbox mid-latitude; fine at city scale where the extent
// stays well under a degree or two.
struct GridSpec {
  BBox bbox;
  int n = 0;
  double cell_width_m = 0.0;   // east-west extent of one cell
  double cell_height_m = 0.0;  // north-south extent of one cell
  double width_m = 0.0;
  double height_m = 0.0;
  double m_per_deg_lat = 0.0;
  double m_per_deg_lon = 0.0;

  ProjectedPoint project(double lat, double lon) const {
    return {(lon - bbox.min_lon) * m_per_deg_lon, (lat - bbox.min_lat) * m_per_deg_lat};
  }
  ProjectedPoint project(const GpsPoint& p) const { return project(p.lat, p.lon); }

  GpsPoint unproject(double x, double y, double t = 0.0) const {
    return {bbox.min_lat + y / m_per_deg_lat, bbox.min_lon + x / m_per_deg_lon, t};
  }

  double distance_m(const GpsPoint& a, const GpsPoint& b) const {
    ProjectedPoint pa = project(a), pb = project(b);
    return std::hypot(pb.x - pa.x, pb.y - pa.y);
  }

  int cell_index(const GridCell& c) const { return c.x * n + c.y; }
  int num_cells() const { return n * n; }
};

inline GridSpec make_grid_spec(const BBox& bbox, int n) {
  if (n < 1) throw std::invalid_argument("grid n must be >= 1");
  if (!(bbox.max_lat > bbox.min_lat) || !(bbox.max_lon > bbox.min_lon))
    throw std::invalid_argument("degenerate bounding box");
  GridSpec s;
  s.bbox = bbox;
  s.n = n;
  double mid_lat = 0.5 * (bbox.min_lat + bbox.max_lat);
  s.m_per_deg_lat = kEarthRadiusM * kDegToRad;
  s.m_per_deg_lon = kEarthRadiusM * kDegToRad * std::cos(mid_lat * kDegToRad);
  s.width_m = (bbox.max_lon - bbox.min_lon) * s.m_per_deg_lon;
  s.height_m = (bbox.max_lat - bbox.min_lat) * s.m_per_deg_lat;
  s.cell_width_m = s.width_m / n;
  s.cell_height_m = s.height_m / n;
  return s;
}

// Index of the cell owning a 1-d offset. Points on an interior boundary go to
// the higher-index cell; the max edge clamps to n-1.
inline int axis_cell(double offset, double cell_size, double total, int n) {
  if (offset < 0.0 || offset > total) return -1;
  int i = static_cast<int>(std::floor(offset / cell_size));
  return std::min(i, n - 1);
}

inline GridCell locate_projected(const GridSpec& spec, double px, double py) {
  int col = axis_cell(px, spec.cell_width_m, spec.width_m, spec.n);
  int row = axis_cell(py, spec.cell_height_m, spec.height_m, spec.n);
  if (col < 0 || row < 0) throw std::out_of_range("point outside grid bounds");
  return {row, col};
}

inline GridCell locate(const GridSpec& spec, const GpsPoint& p) {
  if (!spec.bbox.contains(p))
    throw std::out_of_range("GPS point outside bounding box");
  ProjectedPoint q = spec.project(p);
  return locate_projected(spec, q.x, q.y);
}

struct CellSpan {
  GridCell cell;
  double len_m = 0.0;
};

namespace detail {

struct Crossing {
  double t;
  int axis;  // 0 = vertical line (column boundary), 1 = horizontal (row)
  int line;  // boundary index; the higher-index side owns the line
  bool forward;  // moving toward higher indices on this axis
};

}  // namespace detail

// Ordered cells crossed by the segment a->b (projected meters), with the
// overlap length inside each. Every cell whose owned half-open region meets
// the segment is emitted, including zero-length corner touches, so the result
// matches a point-ownership oracle cell-for-cell. Consecutive entries differ.
inline std::vector<CellSpan> segment_cells(const GridSpec& spec, ProjectedPoint a,
                                           ProjectedPoint b) {
  GridCell start = locate_projected(spec, a.x, a.y);
  GridCell end = locate_projected(spec, b.x, b.y);
  double seg_len = std::hypot(b.x - a.x, b.y - a.y);

  std::vector<CellSpan> out;
  auto emit = [&out](GridCell c, double len) {
    if (!out.empty() && out.back().cell == c)
      out.back().len_m += len;
    else
      out.push_back({c, len});
  };

  if (start == end) {
    emit(start, seg_len);
    return out;
  }

  std::vector<detail::Crossing> events;
  auto add_axis = [&events](int axis, int from, int to, double origin, double delta,
                            double cell_size) {
    if (to > from) {
      for (int k = from + 1; k <= to; ++k)
        events.push_back({(k * cell_size - origin) / delta, axis, k, true});
    } else if (to < from) {
      for (int k = from; k >= to + 1; --k)
        events.push_back({(k * cell_size - origin) / delta, axis, k, false});
    }
  };
  add_axis(0, start.y, end.y, a.x, b.x - a.x, spec.cell_width_m);
  add_axis(1, start.x, end.x, a.y, b.y - a.y, spec.cell_height_m);
  std::stable_sort(events.begin(), events.end(),
                   [](const detail::Crossing& l, const detail::Crossing& r) { return l.t < r.t; });

  GridCell cur = start;
  double t_prev = 0.0;
  size_t i = 0;
  while (i < events.size()) {
    size_t j = i + 1;
    while (j < events.size() && events[j].t == events[i].t && events[j].axis != events[i].axis)
      ++j;
    double t = std::clamp(events[i].t, 0.0, 1.0);
    emit(cur, (t - t_prev) * seg_len);
    t_prev = t;

    // Cell owning the crossing point itself: the boundary line belongs to the
    // higher-index side on each crossed axis.
    GridCell on = cur;
    GridCell next = cur;
    for (size_t k = i; k < j; ++k) {
      const detail::Crossing& e = events[k];
      if (e.axis == 0) {
        on.y = e.line;
        next.y = e.forward ? e.line : e.line - 1;
      } else {
        on.x = e.line;
        next.x = e.forward ? e.line : e.line - 1;
      }
    }
    emit(on, 0.0);
    emit(next, 0.0);
    cur = next;
    i = j;
  }
  emit(cur, (1.0 - t_prev) * seg_len);
  if (!(cur == end)) {
    // Unreachable when crossings enumerate consistently with locate().
    throw std::logic_error("segment traversal did not land on the end cell");
  }
  return out;
}

inline std::vector<CellSpan> segment_cells(const GridSpec& spec, const GpsPoint& a,
                                           const GpsPoint& b) {
  if (!spec.bbox.contains(a) || !spec.bbox.contains(b))
    throw std::out_of_range("segment endpoint outside bounding box");
  return segment_cells(spec, spec.project(a), spec.project(b));
}

struct PathCell {
  GridCell cell;
  double len_m = 0.0;
  bool has_sample = false;
  double leave_t = 0.0;  // meaningful only when has_sample
};

// A trajectory rendered as a continuous cell sequence. Consecutive cells are
// 8-adjacent and never equal; cells with no GPS sample are kept to preserve
// continuity.
struct GridPath {
  std::vector<PathCell> cells;
  double start_t = 0.0;
  double total_time_s = 0.0;

  double total_len_m() const {
    double s = 0.0;
    for (const PathCell& c : cells) s += c.len_m;
    return s;
  }
};

struct TimedProjectedPoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

inline GridPath trace_projected(const GridSpec& spec,
                                const std::vector<TimedProjectedPoint>& pts) {
  if (pts.size() < 2) throw std::invalid_argument("trajectory needs at least 2 points");
  for (size_t k = 1; k < pts.size(); ++k)
    if (!(pts[k].t > pts[k - 1].t))
      throw std::invalid_argument("trajectory timestamps must be strictly increasing");

  GridPath path;
  path.start_t = pts.front().t;
  path.total_time_s = pts.back().t - pts.front().t;

  auto append = [&path](GridCell c, double len) {
    if (!path.cells.empty() && path.cells.back().cell == c)
      path.cells.back().len_m += len;
    else
      path.cells.push_back({c, len, false, 0.0});
  };
  auto mark = [&path](double t) {
    path.cells.back().has_sample = true;
    path.cells.back().leave_t = t;
  };

  append(locate_projected(spec, pts[0].x, pts[0].y), 0.0);
  mark(pts[0].t);
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    std::vector<CellSpan> spans = segment_cells(spec, ProjectedPoint{pts[k].x, pts[k].y},
                                                ProjectedPoint{pts[k + 1].x, pts[k + 1].y});
    for (const CellSpan& s : spans) append(s.cell, s.len_m);
    mark(pts[k + 1].t);
  }
  return path;
}

// Render a raw trajectory as a grid path. Each crossed cell appears once per
// visit with the length of path overlapping it; has_sample / leave_t mark the
// last GPS point observed in the cell during the visit.
inline GridPath trace_path(const GridSpec& spec, const std::vector<GpsPoint>& traj) {
  std::vector<TimedProjectedPoint> pts;
  pts.reserve(traj.size());
  for (const GpsPoint& p : traj) {
    if (!spec.bbox.contains(p)) throw std::out_of_range("GPS point outside bounding box");
    ProjectedPoint q = spec.project(p);
    pts.push_back({q.x, q.y, p.t});
  }
  return trace_projected(spec, pts);
}

// All cells at Chebyshev distance exactly d, row-major; out-of-grid slots stay
// empty so the ring has fixed cardinality (1 for d=0, else 8d).
inline std::vector<std::optional<GridCell>> neighbor_set(const GridSpec& spec,
                                                         const GridCell& g, int d) {
  if (d < 0) throw std::invalid_argument("neighbor distance must be >= 0");
  std::vector<std::optional<GridCell>> ring;
  if (d == 0) {
    if (g.x >= 0 && g.x < spec.n && g.y >= 0 && g.y < spec.n)
      ring.push_back(GridCell{g.x, g.y});
    else
      ring.push_back(std::nullopt);
    return ring;
  }
  ring.reserve(static_cast<size_t>(8) * d);
  for (int x = g.x - d; x <= g.x + d; ++x) {
    for (int y = g.y - d; y <= g.y + d; ++y) {
      if (std::max(std::abs(x - g.x), std::abs(y - g.y)) != d) continue;
      if (x >= 0 && x < spec.n && y >= 0 && y < spec.n)
        ring.push_back(GridCell{x, y});
      else
        ring.push_back(std::nullopt);
    }
  }
  return ring;
}

}  // namespace gridtte
