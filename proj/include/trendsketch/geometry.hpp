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

/// @file geometry.hpp
/// @brief Normalization, Douglas-Peucker simplification and per-segment
/// descriptor extraction.

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trendsketch/core.hpp"

namespace trendsketch {

namespace detail {

inline double scale_unit(double v, const AxisRange& r) {
  if (r.degenerate()) return 0.5;
  return (v - r.min) / (r.max - r.min);
}

inline std::string axis_name(std::size_t k) {
  return "measure " + std::to_string(k);
}

/// (t, y0, y1, ...) as one flat vector.
inline Vec flatten(const NormalizedPoint& p) {
  Vec v;
  v.reserve(p.y.size() + 1);
  v.push_back(p.t);
  v.insert(v.end(), p.y.begin(), p.y.end());
  return v;
}

}  // namespace detail

/// Min-max scales time and every measure axis into [0,1]. Constant axes map
/// to 0.5. In global mode a value outside the supplied extents raises
/// kRangeViolation naming the axis.
inline NormalizedSignal normalize(const Signal& signal,
                                  const NormalizationMode& mode) {
  Extents ext;
  if (mode.is_global()) {
    ext = mode.extents();
    if (ext.measures.size() != signal.measure_count()) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "normalize: extents have " +
                      std::to_string(ext.measures.size()) +
                      " measures, signal '" + signal.id() + "' has " +
                      std::to_string(signal.measure_count()));
    }
    const Extents own = Extents::of(signal);
    if (own.time.min < ext.time.min || own.time.max > ext.time.max) {
      throw Error(ErrorKind::kRangeViolation,
                  "normalize: signal '" + signal.id() +
                      "' exceeds global extents on axis time");
    }
    for (std::size_t k = 0; k < ext.measures.size(); ++k) {
      if (own.measures[k].min < ext.measures[k].min ||
          own.measures[k].max > ext.measures[k].max) {
        throw Error(ErrorKind::kRangeViolation,
                    "normalize: signal '" + signal.id() +
                        "' exceeds global extents on axis " +
                        detail::axis_name(k));
      }
    }
  } else {
    ext = Extents::of(signal);
  }

  std::vector<NormalizedPoint> out;
  out.reserve(signal.points().size());
  for (const auto& p : signal.points()) {
    NormalizedPoint q;
    q.t = detail::scale_unit(p.t, ext.time);
    q.y.reserve(p.y.size());
    for (std::size_t k = 0; k < p.y.size(); ++k) {
      q.y.push_back(detail::scale_unit(p.y[k], ext.measures[k]));
    }
    out.push_back(std::move(q));
  }
  return NormalizedSignal(signal.id(), std::move(out), mode);
}

/// Distance from @p p to the infinite line through @p a and @p b, or to @p a
/// when the two coincide.
inline double perpendicular_distance(std::span<const double> p,
                                     std::span<const double> a,
                                     std::span<const double> b) {
  const std::size_t d = p.size();
  double uu = 0.0, wu = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double u = b[i] - a[i];
    uu += u * u;
    wu += (p[i] - a[i]) * u;
  }
  const double s = uu > 0.0 ? wu / uu : 0.0;
  double r = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double e = p[i] - (a[i] + s * (b[i] - a[i]));
    r += e * e;
  }
  return std::sqrt(r);
}

/// Distance from @p p to the closed segment [a, b].
inline double segment_point_distance(std::span<const double> p,
                                     std::span<const double> a,
                                     std::span<const double> b) {
  const std::size_t d = p.size();
  double uu = 0.0, wu = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double u = b[i] - a[i];
    uu += u * u;
    wu += (p[i] - a[i]) * u;
  }
  const double s = uu > 0.0 ? std::clamp(wu / uu, 0.0, 1.0) : 0.0;
  double r = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double e = p[i] - (a[i] + s * (b[i] - a[i]));
    r += e * e;
  }
  return std::sqrt(r);
}

/// Douglas-Peucker simplification in normalized (t, y) space. Splits on the
/// point farthest from the current chord (first index wins ties) while that
/// distance exceeds @p epsilon. Distances are taken to the chord segment, not
/// the infinite line, so every dropped point stays within epsilon of the
/// output polyline.
inline NormalizedSignal simplify(const NormalizedSignal& signal, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "simplify: epsilon must be > 0");
  }
  const auto& pts = signal.points();
  if (pts.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "simplify: signal '" + signal.id() + "' has fewer than 2 points");
  }
  if (pts.size() == 2) return signal;

  std::vector<Vec> flat;
  flat.reserve(pts.size());
  for (const auto& p : pts) flat.push_back(detail::flatten(p));

  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, pts.size() - 1}};
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    double best = -1.0;
    std::size_t best_i = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double d = segment_point_distance(flat[i], flat[lo], flat[hi]);
      if (d > best) {
        best = d;
        best_i = i;
      }
    }
    if (best > epsilon) {
      keep[best_i] = true;
      stack.emplace_back(best_i, hi);
      stack.emplace_back(lo, best_i);
    }
  }

  std::vector<NormalizedPoint> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (keep[i]) out.push_back(pts[i]);
  }
  return NormalizedSignal(signal.id(), std::move(out), signal.mode());
}

/// One descriptor per consecutive point pair. A zero time step raises
/// kDegenerateSegment.
inline Descriptors describe(const NormalizedSignal& signal) {
  const auto& pts = signal.points();
  if (pts.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "describe: signal '" + signal.id() + "' has fewer than 2 points");
  }
  Descriptors out;
  out.reserve(pts.size() - 1);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const auto& a = pts[k];
    const auto& b = pts[k + 1];
    const double dt = b.t - a.t;
    if (dt == 0.0) {
      throw Error(ErrorKind::kDegenerateSegment,
                  "describe: signal '" + signal.id() + "' segment " +
                      std::to_string(k) + " has zero duration");
    }
    SegmentDescriptor d;
    double len2 = dt * dt;
    d.mid_spatial.resize(a.y.size());
    d.velocity.resize(a.y.size());
    for (std::size_t m = 0; m < a.y.size(); ++m) {
      const double dy = b.y[m] - a.y[m];
      len2 += dy * dy;
      d.mid_spatial[m] = (a.y[m] + b.y[m]) / 2.0;
      d.velocity[m] = dy / dt;
    }
    d.length = std::sqrt(len2);
    d.mid_time = (a.t + b.t) / 2.0;
    out.push_back(std::move(d));
  }
  return out;
}

/// Freehand strokes can stall or backtrack along time. Consecutive points
/// sharing a timestamp collapse to the last of them; points that step back
/// in time are dropped.
inline std::vector<NormalizedPoint> deduplicate_sketch(
    std::vector<NormalizedPoint> points) {
  std::vector<NormalizedPoint> out;
  out.reserve(points.size());
  for (auto& p : points) {
    if (!out.empty() && p.t == out.back().t) {
      out.back() = std::move(p);
    } else if (out.empty() || p.t > out.back().t) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace trendsketch
