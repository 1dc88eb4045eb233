#pragma once

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gridtte/geo.hpp"
#include "gridtte/rng.hpp"

namespace gridtte {

struct Trajectory {
  std::string id;
  std::vector<GpsPoint> points;
};

struct RowError {
  size_t record = 0;  // 1-based data record index (header excluded)
  std::string message;
};

struct ParseResult {
  std::vector<Trajectory> trajectories;
  std::vector<RowError> errors;
};

namespace csv {

// Reads one CSV record (RFC-4180 quoting, fields may contain commas and
// newlines). Returns false on end of stream.
inline bool read_record(std::istream& is, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int ch;
  while ((ch = is.get()) != std::char_traits<char>::eof()) {
    any = true;
    char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (is.peek() == '"') {
          field.push_back('"');
          is.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c == '\r') {
      // swallow; CRLF handled at the following '\n'
    } else {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

inline void write_field(std::ostream& os, std::string_view s) {
  bool needs_quotes = s.find_first_of(",\"\n") != std::string_view::npos;
  if (!needs_quotes) {
    os << s;
    return;
  }
  os << '"';
  for (char c : s) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}

inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

inline int find_column(const std::vector<std::string>& header, std::string_view name) {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

}  // namespace csv

// Porto-style taxi CSV: polyline of [lon, lat] pairs sampled every 15 s from
// the row's start TIMESTAMP. Rows flagged MISSING_DATA or with fewer than two
// points are dropped; malformed rows are reported and skipped.
inline ParseResult parse_porto_csv(std::istream& is, double sampling_interval_s = 15.0) {
  std::vector<std::string> header;
  if (!csv::read_record(is, header)) throw std::runtime_error("porto csv: empty input");
  int c_id = csv::find_column(header, "TRIP_ID");
  int c_ts = csv::find_column(header, "TIMESTAMP");
  int c_poly = csv::find_column(header, "POLYLINE");
  int c_missing = csv::find_column(header, "MISSING_DATA");
  if (c_id < 0 || c_ts < 0 || c_poly < 0 || c_missing < 0)
    throw std::runtime_error("porto csv: header must contain TRIP_ID, TIMESTAMP, POLYLINE, MISSING_DATA");

  ParseResult out;
  std::vector<std::string> rec;
  size_t row = 0;
  int max_col = std::max(std::max(c_id, c_ts), std::max(c_poly, c_missing));
  while (csv::read_record(is, rec)) {
    ++row;
    if (rec.size() == 1 && rec[0].empty()) continue;  // blank line
    if (static_cast<int>(rec.size()) <= max_col) {
      out.errors.push_back({row, "too few fields"});
      continue;
    }
    std::string missing = rec[c_missing];
    std::transform(missing.begin(), missing.end(), missing.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (missing == "true" || missing == "1") continue;

    double t0 = 0.0;
    if (!csv::parse_double(rec[c_ts], t0)) {
      out.errors.push_back({row, "bad TIMESTAMP: " + rec[c_ts]});
      continue;
    }
    nlohmann::json poly = nlohmann::json::parse(rec[c_poly], nullptr, false);
    if (poly.is_discarded() || !poly.is_array()) {
      out.errors.push_back({row, "malformed POLYLINE"});
      continue;
    }
    Trajectory traj;
    traj.id = rec[c_id];
    bool bad = false;
    for (size_t k = 0; k < poly.size(); ++k) {
      const auto& pair = poly[k];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
        bad = true;
        break;
      }
      // source order is [lon, lat]
      traj.points.push_back({pair[1].get<double>(), pair[0].get<double>(),
                             t0 + sampling_interval_s * static_cast<double>(k)});
    }
    if (bad) {
      out.errors.push_back({row, "malformed POLYLINE entry"});
      continue;
    }
    if (traj.points.size() < 2) continue;
    out.trajectories.push_back(std::move(traj));
  }
  return out;
}

// Generic point-per-row format: header trip_id,lat,lon,t. Points are grouped
// by trip_id (first-appearance order) and sorted by t within each trip.
inline ParseResult parse_generic_csv(std::istream& is) {
  std::vector<std::string> header;
  if (!csv::read_record(is, header)) throw std::runtime_error("generic csv: empty input");
  int c_id = csv::find_column(header, "trip_id");
  int c_lat = csv::find_column(header, "lat");
  int c_lon = csv::find_column(header, "lon");
  int c_t = csv::find_column(header, "t");
  if (c_id < 0 || c_lat < 0 || c_lon < 0 || c_t < 0)
    throw std::runtime_error("generic csv: header must contain trip_id, lat, lon, t");

  ParseResult out;
  std::map<std::string, size_t> index_of;
  std::vector<std::string> rec;
  size_t row = 0;
  int max_col = std::max(std::max(c_id, c_lat), std::max(c_lon, c_t));
  while (csv::read_record(is, rec)) {
    ++row;
    if (rec.size() == 1 && rec[0].empty()) continue;
    if (static_cast<int>(rec.size()) <= max_col) {
      out.errors.push_back({row, "too few fields"});
      continue;
    }
    GpsPoint p;
    if (!csv::parse_double(rec[c_lat], p.lat) || !csv::parse_double(rec[c_lon], p.lon) ||
        !csv::parse_double(rec[c_t], p.t)) {
      out.errors.push_back({row, "non-numeric field"});
      continue;
    }
    auto [it, inserted] = index_of.try_emplace(rec[c_id], out.trajectories.size());
    if (inserted) out.trajectories.push_back({rec[c_id], {}});
    out.trajectories[it->second].points.push_back(p);
  }
  for (Trajectory& traj : out.trajectories)
    std::stable_sort(traj.points.begin(), traj.points.end(),
                     [](const GpsPoint& a, const GpsPoint& b) { return a.t < b.t; });
  return out;
}

inline void write_generic_csv(std::ostream& os, const std::vector<Trajectory>& trajs) {
  os << "trip_id,lat,lon,t\n";
  for (const Trajectory& traj : trajs) {
    for (const GpsPoint& p : traj.points) {
      csv::write_field(os, traj.id);
      os << ',' << csv::format_double(p.lat) << ',' << csv::format_double(p.lon) << ','
         << csv::format_double(p.t) << '\n';
    }
  }
}

struct FilterLimits {
  size_t min_points = 2;
  double max_speed_mps = 50.0;
};

// Keeps trajectories that stay inside the grid bbox, have strictly increasing
// timestamps, enough points, and plausible implied speeds.
inline std::vector<Trajectory> filter_valid(const std::vector<Trajectory>& trajs,
                                            const GridSpec& spec, const FilterLimits& lim = {}) {
  std::vector<Trajectory> kept;
  for (const Trajectory& traj : trajs) {
    if (traj.points.size() < lim.min_points) continue;
    bool ok = true;
    for (const GpsPoint& p : traj.points) {
      if (!spec.bbox.contains(p) || !std::isfinite(p.t) || p.t < 0.0) {
        ok = false;
        break;
      }
    }
    for (size_t k = 1; ok && k < traj.points.size(); ++k) {
      double dt = traj.points[k].t - traj.points[k - 1].t;
      if (dt <= 0.0) {
        ok = false;
        break;
      }
      if (spec.distance_m(traj.points[k - 1], traj.points[k]) / dt > lim.max_speed_mps) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(traj);
  }
  return kept;
}

struct DatasetSplit {
  std::vector<Trajectory> train;
  std::vector<Trajectory> val;
  std::vector<Trajectory> test;
};

// Deterministic 8:1:1 split by trajectory count.
inline DatasetSplit split_dataset(const std::vector<Trajectory>& trajs, uint64_t seed) {
  if (trajs.size() < 10) throw std::invalid_argument("split needs at least 10 trajectories");
  std::vector<size_t> idx(trajs.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);

  size_t n = trajs.size();
  size_t n_train = static_cast<size_t>(0.8 * static_cast<double>(n));
  size_t n_val = static_cast<size_t>(0.1 * static_cast<double>(n));
  DatasetSplit split;
  for (size_t i = 0; i < n; ++i) {
    const Trajectory& t = trajs[idx[i]];
    if (i < n_train)
      split.train.push_back(t);
    else if (i < n_train + n_val)
      split.val.push_back(t);
    else
      split.test.push_back(t);
  }
  return split;
}

// Time-ordered alternative for leakage-averse experiments: earliest 80% train,
// next 10% validation, latest 10% test.
inline DatasetSplit split_dataset_by_time(const std::vector<Trajectory>& trajs) {
  if (trajs.size() < 10) throw std::invalid_argument("split needs at least 10 trajectories");
  std::vector<size_t> idx(trajs.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return trajs[a].points.front().t < trajs[b].points.front().t;
  });
  size_t n = trajs.size();
  size_t n_train = static_cast<size_t>(0.8 * static_cast<double>(n));
  size_t n_val = static_cast<size_t>(0.1 * static_cast<double>(n));
  DatasetSplit split;
  for (size_t i = 0; i < n; ++i) {
    const Trajectory& t = trajs[idx[i]];
    if (i < n_train)
      split.train.push_back(t);
    else if (i < n_train + n_val)
      split.val.push_back(t);
    else
      split.test.push_back(t);
  }
  return split;
}

}  // namespace gridtte
