// Copyright 2026 The TrendSketch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// @file core.hpp
/// @brief Domain types shared by every trendsketch module: signals, datasets,
/// normalization modes, segment descriptors, penalty configuration and the
/// result types produced by alignment, search and clustering.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace trendsketch {

/// Error categories. Callers (CLI, HTTP service) map these onto exit codes
/// and status codes.
enum class ErrorKind {
  kInvalidArgument,
  kParse,
  kRangeViolation,
  kDegenerateSegment,
  kDimensionMismatch,
  kNotFound,
  kStaleIndex,
  kConstraint,
  kData,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

using Vec = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline double norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double distance(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Schema / signals / datasets
// ---------------------------------------------------------------------------

struct Schema {
  std::string time_field;
  std::vector<std::string> categorical_fields;
  std::vector<std::string> measure_fields;

  /// Throws kInvalidArgument unless every list is non-empty and no field
  /// name is used twice.
  void validate() const {
    if (time_field.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "schema: time field is empty");
    }
    if (categorical_fields.empty()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "schema: at least one categorical field is required");
    }
    if (measure_fields.empty()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "schema: at least one measure field is required");
    }
    std::set<std::string> seen{time_field};
    for (const auto* group : {&categorical_fields, &measure_fields}) {
      for (const auto& f : *group) {
        if (f.empty() || !seen.insert(f).second) {
          throw Error(ErrorKind::kInvalidArgument,
                      "schema: duplicate or empty field name '" + f + "'");
        }
      }
    }
  }

  std::size_t measure_count() const { return measure_fields.size(); }

  std::optional<std::size_t> measure_index(const std::string& name) const {
    for (std::size_t i = 0; i < measure_fields.size(); ++i) {
      if (measure_fields[i] == name) return i;
    }
    return std::nullopt;
  }

  bool is_categorical(const std::string& name) const {
    return std::find(categorical_fields.begin(), categorical_fields.end(),
                     name) != categorical_fields.end();
  }

  bool operator==(const Schema&) const = default;
};

/// One sample: timestamp in seconds since the epoch plus one value per
/// measure.
struct Point {
  double t = 0.0;
  Vec y;

  bool operator==(const Point&) const = default;
};

class Signal {
 public:
  /// Rejects fewer than two points, non-increasing timestamps, non-finite
  /// coordinates and ragged measure vectors.
  Signal(std::string id, std::map<std::string, std::string> dims,
         std::vector<Point> points)
      : id_(std::move(id)), dims_(std::move(dims)), points_(std::move(points)) {
    if (points_.size() < 2) {
      throw Error(ErrorKind::kInvalidArgument,
                  "signal '" + id_ + "': needs at least 2 points");
    }
    const std::size_t dim = points_.front().y.size();
    if (dim == 0) {
      throw Error(ErrorKind::kInvalidArgument,
                  "signal '" + id_ + "': points carry no measures");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      if (p.y.size() != dim) {
        throw Error(ErrorKind::kDimensionMismatch,
                    "signal '" + id_ + "': point " + std::to_string(i) +
                        " has " + std::to_string(p.y.size()) +
                        " measures, expected " + std::to_string(dim));
      }
      if (!std::isfinite(p.t) ||
          !std::all_of(p.y.begin(), p.y.end(),
                       [](double v) { return std::isfinite(v); })) {
        throw Error(ErrorKind::kInvalidArgument,
                    "signal '" + id_ + "': non-finite value at point " +
                        std::to_string(i));
      }
      if (i > 0 && !(p.t > points_[i - 1].t)) {
        throw Error(ErrorKind::kInvalidArgument,
                    "signal '" + id_ +
                        "': timestamps must be strictly increasing (point " +
                        std::to_string(i) + ")");
      }
    }
  }

  const std::string& id() const { return id_; }
  const std::map<std::string, std::string>& dims() const { return dims_; }
  const std::vector<Point>& points() const { return points_; }
  std::size_t measure_count() const { return points_.front().y.size(); }
  double t_first() const { return points_.front().t; }
  double t_last() const { return points_.back().t; }

  bool operator==(const Signal&) const = default;

 private:
  std::string id_;
  std::map<std::string, std::string> dims_;
  std::vector<Point> points_;
};

struct AxisRange {
  double min = kInf;
  double max = -kInf;

  void include(double v) {
    min = std::min(min, v);
    max = std::max(max, v);
  }
  bool contains(double v) const { return v >= min && v <= max; }
  bool degenerate() const { return !(min < max); }

  bool operator==(const AxisRange&) const = default;
};

/// Time and per-measure min/max.
struct Extents {
  AxisRange time;
  std::vector<AxisRange> measures;

  static Extents of(const Signal& s) {
    Extents e;
    e.measures.resize(s.measure_count());
    for (const auto& p : s.points()) {
      e.time.include(p.t);
      for (std::size_t k = 0; k < p.y.size(); ++k) e.measures[k].include(p.y[k]);
    }
    return e;
  }

  void merge(const Extents& other) {
    if (measures.empty()) measures.resize(other.measures.size());
    time.include(other.time.min);
    time.include(other.time.max);
    for (std::size_t k = 0; k < measures.size() && k < other.measures.size();
         ++k) {
      measures[k].include(other.measures[k].min);
      measures[k].include(other.measures[k].max);
    }
  }

  bool covers(const Extents& inner) const {
    if (inner.measures.size() != measures.size()) return false;
    if (inner.time.min < time.min || inner.time.max > time.max) return false;
    for (std::size_t k = 0; k < measures.size(); ++k) {
      if (inner.measures[k].min < measures[k].min ||
          inner.measures[k].max > measures[k].max) {
        return false;
      }
    }
    return true;
  }

  /// Degenerate axes (min == max) are widened by 0.5 on each side so that
  /// the constant value maps to 0.5, matching the local-mode rule.
  Extents widened_if_degenerate() const {
    Extents e = *this;
    auto widen = [](AxisRange& r) {
      if (r.degenerate()) {
        r.min -= 0.5;
        r.max += 0.5;
      }
    };
    widen(e.time);
    for (auto& m : e.measures) widen(m);
    return e;
  }

  bool operator==(const Extents&) const = default;
};

class Dataset {
 public:
  /// Computes global extents from the signals.
  Dataset(std::string id, Schema schema, std::vector<Signal> signals)
      : id_(std::move(id)), schema_(std::move(schema)), signals_(std::move(signals)) {
    schema_.validate();
    if (signals_.empty()) {
      throw Error(ErrorKind::kData, "dataset '" + id_ + "' has no signals");
    }
    std::unordered_set<std::string> ids;
    extents_.measures.resize(schema_.measure_count());
    for (const auto& s : signals_) {
      if (!ids.insert(s.id()).second) {
        throw Error(ErrorKind::kData, "duplicate signal id '" + s.id() + "'");
      }
      if (s.measure_count() != schema_.measure_count()) {
        throw Error(ErrorKind::kDimensionMismatch,
                    "signal '" + s.id() + "' does not match schema measures");
      }
      extents_.merge(Extents::of(s));
    }
  }

  const std::string& id() const { return id_; }
  const Schema& schema() const { return schema_; }
  const std::vector<Signal>& signals() const { return signals_; }
  const Extents& global_extents() const { return extents_; }

  const Signal* find(const std::string& signal_id) const {
    for (const auto& s : signals_) {
      if (s.id() == signal_id) return &s;
    }
    return nullptr;
  }

  bool operator==(const Dataset&) const = default;

 private:
  std::string id_;
  Schema schema_;
  std::vector<Signal> signals_;
  Extents extents_;
};

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// Local: each signal is scaled by its own min/max. Global: every signal is
/// scaled by one externally supplied extent.
class NormalizationMode {
 public:
  static NormalizationMode local() { return NormalizationMode{}; }

  static NormalizationMode global(Extents extents) {
    if (extents.time.degenerate()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "global extents: time axis needs min < max");
    }
    for (std::size_t k = 0; k < extents.measures.size(); ++k) {
      if (extents.measures[k].degenerate()) {
        throw Error(ErrorKind::kInvalidArgument,
                    "global extents: measure " + std::to_string(k) +
                        " needs min < max");
      }
    }
    NormalizationMode m;
    m.extents_ = std::move(extents);
    return m;
  }

  bool is_global() const { return extents_.has_value(); }
  const Extents& extents() const { return extents_.value(); }

  bool operator==(const NormalizationMode&) const = default;

 private:
  std::optional<Extents> extents_;
};

struct NormalizedPoint {
  double t = 0.0;
  Vec y;

  bool operator==(const NormalizedPoint&) const = default;
};

class NormalizedSignal {
 public:
  static constexpr double kTolerance = 1e-9;

  NormalizedSignal(std::string id, std::vector<NormalizedPoint> points,
                   NormalizationMode mode)
      : id_(std::move(id)), points_(std::move(points)), mode_(std::move(mode)) {
    auto in_unit = [](double v) {
      return v >= -kTolerance && v <= 1.0 + kTolerance;
    };
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const auto& p = points_[i];
      if (!in_unit(p.t) || !std::all_of(p.y.begin(), p.y.end(), in_unit)) {
        throw Error(ErrorKind::kRangeViolation,
                    "normalized signal '" + id_ + "': point " +
                        std::to_string(i) + " lies outside [0,1]");
      }
    }
  }

  const std::string& id() const { return id_; }
  const std::vector<NormalizedPoint>& points() const { return points_; }
  const NormalizationMode& mode() const { return mode_; }
  std::size_t size() const { return points_.size(); }

  bool operator==(const NormalizedSignal&) const = default;

 private:
  std::string id_;
  std::vector<NormalizedPoint> points_;
  NormalizationMode mode_;
};

// ---------------------------------------------------------------------------
// Segments, penalties, results
// ---------------------------------------------------------------------------

struct SegmentDescriptor {
  double length = 0.0;    ///< norm of (dt, dy) in normalized space-time
  Vec mid_spatial;        ///< measure-space midpoint
  double mid_time = 0.0;  ///< temporal midpoint
  Vec velocity;           ///< dy/dt per measure

  bool operator==(const SegmentDescriptor&) const = default;
};

using Descriptors = std::vector<SegmentDescriptor>;

/// The seven user-settable weights plus simplification tolerance, velocity
/// clamp and normalization mode.
struct PenaltyConfig {
  double w_length = 1.0;
  double w_midpoint = 1.0;
  double w_time = 1.0;
  double w_velocity = 1.0;
  double w_skip = 1.0;
  double w_count = 0.5;
  double w_stretch = 0.2;
  double epsilon = 0.02;
  double v_max = 10.0;
  NormalizationMode mode = NormalizationMode::local();

  void validate() const {
    const double weights[] = {w_length, w_midpoint, w_time,   w_velocity,
                              w_skip,   w_count,    w_stretch};
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw Error(ErrorKind::kInvalidArgument,
                    "penalty weights must be finite and non-negative");
      }
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw Error(ErrorKind::kInvalidArgument, "epsilon must be > 0");
    }
    if (!(v_max > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "v_max must be > 0");
    }
  }

  /// True when two configs produce identical preprocessed signals.
  bool same_preprocessing(const PenaltyConfig& other) const {
    return epsilon == other.epsilon && mode == other.mode;
  }

  bool operator==(const PenaltyConfig&) const = default;
};

/// Maps the UI precision slider in [0,1] linearly onto epsilon in
/// [0.005, 0.1].
inline double epsilon_from_precision(double slider) {
  slider = std::clamp(slider, 0.0, 1.0);
  return 0.005 + slider * (0.1 - 0.005);
}

enum class Side { kSketch, kSignal };

struct SegmentMatch {
  std::size_t sketch = 0;
  std::size_t signal = 0;

  bool operator==(const SegmentMatch&) const = default;
  auto operator<=>(const SegmentMatch&) const = default;
};

struct SkippedSegment {
  Side side = Side::kSketch;
  std::size_t index = 0;

  bool operator==(const SkippedSegment&) const = default;
};

struct AlignmentResult {
  double score = 0.0;
  std::vector<SegmentMatch> matches;
  /// Sketch-side skips and signal-side skips that lie between two matches.
  std::vector<SkippedSegment> skipped_interior;
  /// Signal-side skips before the first or after the last match.
  std::vector<SkippedSegment> skipped_boundary;
};

struct RankedEntry {
  std::string signal_id;
  double score = 0.0;
  AlignmentResult alignment;
};

/// Ascending by score, ties by signal id.
struct RankedMatches {
  std::vector<RankedEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

inline bool ranked_before(const RankedEntry& a, const RankedEntry& b) {
  if (a.score != b.score) return a.score < b.score;
  return a.signal_id < b.signal_id;
}

class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  explicit DistanceMatrix(std::vector<std::string> ids)
      : ids_(std::move(ids)), values_(ids_.size() * ids_.size(), 0.0) {}

  std::size_t n() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }

  double at(std::size_t i, std::size_t j) const { return values_[i * n() + j]; }
  void set(std::size_t i, std::size_t j, double v) { values_[i * n() + j] = v; }

  /// Throws unless the matrix is square-symmetric within @p tol, has a zero
  /// diagonal and only finite non-negative entries.
  void validate(double tol = 1e-9) const {
    for (std::size_t i = 0; i < n(); ++i) {
      if (at(i, i) != 0.0) {
        throw Error(ErrorKind::kInvalidArgument,
                    "distance matrix: non-zero diagonal at " + std::to_string(i));
      }
      for (std::size_t j = 0; j < n(); ++j) {
        const double v = at(i, j);
        if (!std::isfinite(v) || v < 0.0) {
          throw Error(ErrorKind::kInvalidArgument,
                      "distance matrix: entries must be finite and >= 0");
        }
        if (std::abs(v - at(j, i)) > tol) {
          throw Error(ErrorKind::kInvalidArgument,
                      "distance matrix: not symmetric");
        }
      }
    }
  }

 private:
  std::vector<std::string> ids_;
  std::vector<double> values_;
};

}  // namespace trendsketch
