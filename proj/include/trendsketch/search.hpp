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

/// @file search.hpp
/// @brief Index construction, sketch queries and the all-pairs distance
/// matrix.

#pragma once

#include <algorithm>
#include <atomic>
#include <memory>
#include <optional>
#include <thread>
#include <vector>

#include "trendsketch/alignment.hpp"
#include "trendsketch/core.hpp"
#include "trendsketch/geometry.hpp"

namespace trendsketch {

inline constexpr std::size_t kDefaultTopK = 10;

namespace detail {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

}  // namespace detail

struct CanvasPoint {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const CanvasPoint&) const = default;
};

/// Maps a canvas rectangle onto a data window. Canvas y grows downward, so
/// y_top shows y_data.max.
struct Viewport {
  double x_left = 0.0;
  double x_right = 1.0;
  double y_top = 0.0;
  double y_bottom = 1.0;
  AxisRange x_data;
  AxisRange y_data;
};

struct IndexEntry {
  std::string signal_id;
  NormalizedSignal simplified;
  Descriptors descriptors;
};

struct UnindexableSignal {
  std::string signal_id;
  std::string reason;
};

/// Preprocessed signals for one (mode, epsilon) pair. Immutable once built.
class Index {
 public:
  Index(std::shared_ptr<const Dataset> dataset, PenaltyConfig build_config,
        std::vector<IndexEntry> entries, std::vector<UnindexableSignal> skipped)
      : dataset_(std::move(dataset)),
        build_config_(std::move(build_config)),
        entries_(std::move(entries)),
        unindexable_(std::move(skipped)) {}

  const std::string& dataset_id() const { return dataset_->id(); }
  const Dataset& dataset() const { return *dataset_; }
  std::shared_ptr<const Dataset> dataset_ptr() const { return dataset_; }
  const PenaltyConfig& build_config() const { return build_config_; }
  const std::vector<IndexEntry>& entries() const { return entries_; }
  const std::vector<UnindexableSignal>& unindexable() const {
    return unindexable_;
  }
  std::size_t size() const { return entries_.size(); }

  /// Throws kStaleIndex if @p cfg would preprocess signals differently.
  void check_config(const PenaltyConfig& cfg) const {
    if (!build_config_.same_preprocessing(cfg)) {
      throw Error(ErrorKind::kStaleIndex,
                  "penalty config (mode, epsilon) differs from the index build "
                  "config; rebuild the index");
    }
  }

 private:
  std::shared_ptr<const Dataset> dataset_;
  PenaltyConfig build_config_;
  std::vector<IndexEntry> entries_;
  std::vector<UnindexableSignal> unindexable_;
};

/// Normalizes, simplifies and describes every signal. Signals that fail are
/// recorded as unindexable; if none survive, throws kData.
inline Index build_index(std::shared_ptr<const Dataset> dataset,
                         const PenaltyConfig& cfg) {
  cfg.validate();
  if (!dataset || dataset->signals().empty()) {
    throw Error(ErrorKind::kData, "build_index: dataset is empty");
  }
  const auto& signals = dataset->signals();
  std::vector<std::optional<IndexEntry>> built(signals.size());
  std::vector<std::string> failures(signals.size());
  detail::parallel_for(signals.size(), [&](std::size_t i) {
    try {
      NormalizedSignal simplified =
          simplify(normalize(signals[i], cfg.mode), cfg.epsilon);
      if (simplified.size() < 2) {
        failures[i] = "fewer than 2 points after simplification";
        return;
      }
      Descriptors desc = describe(simplified);
      built[i] = IndexEntry{signals[i].id(), std::move(simplified), std::move(desc)};
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  std::vector<IndexEntry> entries;
  std::vector<UnindexableSignal> skipped;
  for (std::size_t i = 0; i < signals.size(); ++i) {
    if (built[i]) {
      entries.push_back(std::move(*built[i]));
    } else {
      skipped.push_back({signals[i].id(), failures[i]});
    }
  }
  if (entries.empty()) {
    throw Error(ErrorKind::kData,
                "build_index: no signal could be indexed (first failure: " +
                    skipped.front().reason + ")");
  }
  return Index(std::move(dataset), cfg, std::move(entries), std::move(skipped));
}

inline Index build_index(const Dataset& dataset, const PenaltyConfig& cfg) {
  return build_index(std::make_shared<const Dataset>(dataset), cfg);
}

/// Maps canvas sketch points into normalized space.
///
/// Univariate datasets: x is time and y the measure. Two-measure datasets
/// (tracks): x and y are the two measures and time follows stroke order,
/// parameterized by cumulative arc length. Canvas y is flipped so that up
/// means larger.
///
/// Local mode scales by the sketch's own bounding box. Global mode maps the
/// canvas through @p viewport into data coordinates and then scales by the
/// global extents, clamping to [0,1].
inline std::vector<NormalizedPoint> sketch_to_normalized(
    const std::vector<CanvasPoint>& canvas, std::size_t measure_count,
    const NormalizationMode& mode, const std::optional<Viewport>& viewport) {
  if (measure_count != 1 && measure_count != 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "sketch: only 1- or 2-measure datasets can be sketched");
  }
  if (mode.is_global() && !viewport) {
    throw Error(ErrorKind::kInvalidArgument,
                "sketch: global normalization requires a viewport");
  }
  std::vector<CanvasPoint> pts;
  for (const auto& p : canvas) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorKind::kInvalidArgument, "sketch: non-finite point");
    }
    if (pts.empty() || !(p == pts.back())) pts.push_back(p);
  }

  // (u, v): horizontal and vertical position in [0,1], v pointing up.
  std::vector<std::pair<double, double>> uv;
  uv.reserve(pts.size());
  if (!mode.is_global()) {
    AxisRange xr, yr;
    for (const auto& p : pts) {
      xr.include(p.x);
      yr.include(p.y);
    }
    for (const auto& p : pts) {
      const double u = xr.degenerate() ? 0.5 : (p.x - xr.min) / (xr.max - xr.min);
      const double v = yr.degenerate() ? 0.5 : (yr.max - p.y) / (yr.max - yr.min);
      uv.emplace_back(u, v);
    }
  } else {
    const Viewport& vp = *viewport;
    if (vp.x_left == vp.x_right || vp.y_top == vp.y_bottom ||
        vp.x_data.degenerate() || vp.y_data.degenerate()) {
      throw Error(ErrorKind::kInvalidArgument, "sketch: degenerate viewport");
    }
    const Extents& ext = mode.extents();
    const AxisRange& x_norm = measure_count == 1 ? ext.time : ext.measures[0];
    const AxisRange& y_norm =
        measure_count == 1 ? ext.measures[0] : ext.measures[1];
    for (const auto& p : pts) {
      const double xd = vp.x_data.min + (p.x - vp.x_left) / (vp.x_right - vp.x_left) *
                                            (vp.x_data.max - vp.x_data.min);
      const double yd = vp.y_data.max - (p.y - vp.y_top) / (vp.y_bottom - vp.y_top) *
                                            (vp.y_data.max - vp.y_data.min);
      uv.emplace_back(std::clamp(detail::scale_unit(xd, x_norm), 0.0, 1.0),
                      std::clamp(detail::scale_unit(yd, y_norm), 0.0, 1.0));
    }
  }

  std::vector<NormalizedPoint> out;
  out.reserve(uv.size());
  if (measure_count == 1) {
    for (const auto& [u, v] : uv) out.push_back({u, {v}});
  } else {
    std::vector<double> arc(uv.size(), 0.0);
    for (std::size_t i = 1; i < uv.size(); ++i) {
      arc[i] = arc[i - 1] + std::hypot(uv[i].first - uv[i - 1].first,
                                       uv[i].second - uv[i - 1].second);
    }
    const double total = arc.empty() ? 0.0 : arc.back();
    for (std::size_t i = 0; i < uv.size(); ++i) {
      const double t = total > 0.0 ? arc[i] / total : 0.0;
      out.push_back({t, {uv[i].first, uv[i].second}});
    }
  }
  out = deduplicate_sketch(std::move(out));
  if (out.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "sketch: needs at least 2 distinct points");
  }
  return out;
}

/// Normalized, simplified and described sketch.
inline Descriptors sketch_descriptors(const std::vector<CanvasPoint>& canvas,
                                      std::size_t measure_count,
                                      const PenaltyConfig& cfg,
                                      const std::optional<Viewport>& viewport) {
  NormalizedSignal sketch("sketch",
                          sketch_to_normalized(canvas, measure_count, cfg.mode,
                                               viewport),
                          cfg.mode);
  return describe(simplify(sketch, cfg.epsilon));
}

/// Aligns @p sketch against every indexed signal and returns the @p k best,
/// ascending by score with ties broken by signal id.
inline RankedMatches rank_descriptors(const Index& index, const Descriptors& sketch,
                                      const PenaltyConfig& cfg, std::size_t k) {
  index.check_config(cfg);
  cfg.validate();
  const auto& entries = index.entries();
  std::vector<RankedEntry> all(entries.size());
  detail::parallel_for(entries.size(), [&](std::size_t i) {
    AlignmentResult a = align(sketch, entries[i].descriptors, cfg);
    all[i] = RankedEntry{entries[i].signal_id, a.score, std::move(a)};
  });
  std::sort(all.begin(), all.end(), ranked_before);
  if (all.size() > k) all.resize(k);
  return RankedMatches{std::move(all)};
}

inline RankedMatches query(const Index& index,
                           const std::vector<CanvasPoint>& sketch_points,
                           const PenaltyConfig& cfg, std::size_t k = kDefaultTopK,
                           const std::optional<Viewport>& viewport = std::nullopt) {
  index.check_config(cfg);
  const Descriptors sketch = sketch_descriptors(
      sketch_points, index.dataset().schema().measure_count(), cfg, viewport);
  return rank_descriptors(index, sketch, cfg, k);
}

/// All-pairs shape distance. Alignment is directional (only the signal side
/// is allowed to stretch), so each cell is the mean of both directions:
/// values[i][j] = (align(i, j) + align(j, i)) / 2.
inline DistanceMatrix pairwise_matrix(const Index& index, const PenaltyConfig& cfg) {
  index.check_config(cfg);
  cfg.validate();
  const auto& entries = index.entries();
  const std::size_t n = entries.size();
  std::vector<std::string> ids;
  ids.reserve(n);
  for (const auto& e : entries) ids.push_back(e.signal_id);
  DistanceMatrix directed(ids);
  detail::parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) {
        directed.set(i, j, align(entries[i].descriptors, entries[j].descriptors, cfg).score);
      }
    }
  });
  DistanceMatrix out(std::move(ids));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = (directed.at(i, j) + directed.at(j, i)) / 2.0;
      out.set(i, j, v);
      out.set(j, i, v);
    }
  }
  out.validate();
  return out;
}

}  // namespace trendsketch
