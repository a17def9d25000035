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

/// @file alignment.hpp
/// @brief Penalty-weighted segment distance and least-cost monotone
/// segment correspondence.
///
/// A correspondence pairs sketch segments with signal segments one-to-one,
/// strictly increasing on both sides. Every unpaired segment is skipped:
///
///   - a skipped sketch segment costs w_skip;
///   - a skipped signal segment costs w_stretch when it lies before the first
///     or after the last matched signal segment (or when nothing is matched),
///     and w_skip when it lies between two matches.
///
/// The total is the sum of matched segment distances, the skip costs and
/// w_count * |m - n|.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "trendsketch/core.hpp"

namespace trendsketch {

inline double segment_distance(const SegmentDescriptor& a,
                               const SegmentDescriptor& b,
                               const PenaltyConfig& cfg) {
  if (a.mid_spatial.size() != b.mid_spatial.size() ||
      a.velocity.size() != b.velocity.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "segment_distance: descriptors have different measure counts");
  }
  double d = 0.0;
  if (cfg.w_length != 0.0) d += cfg.w_length * std::abs(a.length - b.length);
  if (cfg.w_midpoint != 0.0) {
    d += cfg.w_midpoint * detail::distance(a.mid_spatial, b.mid_spatial);
  }
  if (cfg.w_time != 0.0) d += cfg.w_time * std::abs(a.mid_time - b.mid_time);
  if (cfg.w_velocity != 0.0) {
    d += cfg.w_velocity *
         std::min(detail::distance(a.velocity, b.velocity), cfg.v_max);
  }
  return d;
}

/// Prices a given correspondence from scratch and fills in the skip lists.
/// @p matches must be strictly increasing on both sides.
inline AlignmentResult cost_of(std::span<const SegmentDescriptor> sketch,
                               std::span<const SegmentDescriptor> signal,
                               std::vector<SegmentMatch> matches,
                               const PenaltyConfig& cfg) {
  const std::size_t m = sketch.size(), n = signal.size();
  for (std::size_t k = 0; k < matches.size(); ++k) {
    if (matches[k].sketch >= m || matches[k].signal >= n ||
        (k > 0 && (matches[k].sketch <= matches[k - 1].sketch ||
                   matches[k].signal <= matches[k - 1].signal))) {
      throw Error(ErrorKind::kInvalidArgument,
                  "cost_of: matches must be in range and strictly increasing");
    }
  }
  AlignmentResult r;
  std::vector<bool> sketch_used(m, false), signal_used(n, false);
  double score = 0.0;
  for (const auto& mt : matches) {
    sketch_used[mt.sketch] = signal_used[mt.signal] = true;
    score += segment_distance(sketch[mt.sketch], signal[mt.signal], cfg);
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!sketch_used[i]) {
      score += cfg.w_skip;
      r.skipped_interior.push_back({Side::kSketch, i});
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (signal_used[j]) continue;
    const bool boundary = matches.empty() || j < matches.front().signal ||
                          j > matches.back().signal;
    if (boundary) {
      score += cfg.w_stretch;
      r.skipped_boundary.push_back({Side::kSignal, j});
    } else {
      score += cfg.w_skip;
      r.skipped_interior.push_back({Side::kSignal, j});
    }
  }
  score += cfg.w_count * static_cast<double>(m > n ? m - n : n - m);
  r.score = score;
  r.matches = std::move(matches);
  return r;
}

/// Least-cost correspondence by dynamic programming.
///
/// Signal-side skip prices depend on whether a match occurs before and after
/// the skipped segment, so each cell carries four states:
///   kNone     no match yet;
///   kMatched  the last step matched (i, j);
///   kGap      skips after a match, priced as interior, a later match is owed;
///   kTail     skips after the final match.
/// Every correspondence maps to exactly one state path with its exact cost,
/// so the minimum over paths is the minimum over correspondences.
/// Ties prefer match over sketch skip over signal skip when walking back
/// from the end.
inline AlignmentResult align(std::span<const SegmentDescriptor> sketch,
                             std::span<const SegmentDescriptor> signal,
                             const PenaltyConfig& cfg) {
  const std::size_t m = sketch.size(), n = signal.size();
  if (m == 0 || n == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "align: descriptor lists must be non-empty");
  }

  enum State : std::uint8_t { kNone = 0, kMatched = 1, kGap = 2, kTail = 3 };
  enum Step : std::uint8_t { kFromMatch = 0, kSkipSketch = 1, kSkipSignal = 2 };
  struct Cell {
    std::array<double, 4> cost{kInf, kInf, kInf, kInf};
    std::array<State, 4> prev{};  // state of the predecessor cell
    std::array<Step, 4> step{};   // how this state was entered
  };

  const std::size_t cols = n + 1;
  std::vector<Cell> table((m + 1) * cols);
  auto at = [&](std::size_t i, std::size_t j) -> Cell& {
    return table[i * cols + j];
  };

  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      Cell& c = at(i, j);
      c.cost[kNone] = static_cast<double>(i) * cfg.w_skip +
                      static_cast<double>(j) * cfg.w_stretch;
      if (i > 0 && j > 0) {
        const Cell& d = at(i - 1, j - 1);
        const double dist = segment_distance(sketch[i - 1], signal[j - 1], cfg);
        State best = kMatched;
        for (State s : {kGap, kNone}) {
          if (d.cost[s] < d.cost[best]) best = s;
        }
        c.cost[kMatched] = d.cost[best] + dist;
        c.prev[kMatched] = best;
        c.step[kMatched] = kFromMatch;
      }
      // kGap and kTail: entered by a sketch skip (from above) or a signal
      // skip (from the left), continuing from kMatched or from themselves.
      for (State target : {kGap, kTail}) {
        const double signal_price = target == kGap ? cfg.w_skip : cfg.w_stretch;
        if (i > 0) {
          const Cell& up = at(i - 1, j);
          for (State s : {kMatched, target}) {
            const double v = up.cost[s] + cfg.w_skip;
            if (v < c.cost[target]) {
              c.cost[target] = v;
              c.prev[target] = s;
              c.step[target] = kSkipSketch;
            }
          }
        }
        if (j > 0) {
          const Cell& left = at(i, j - 1);
          for (State s : {kMatched, target}) {
            const double v = left.cost[s] + signal_price;
            if (v < c.cost[target]) {
              c.cost[target] = v;
              c.prev[target] = s;
              c.step[target] = kSkipSignal;
            }
          }
        }
      }
    }
  }

  const Cell& end = at(m, n);
  State state = kMatched;
  // Prefer ending on a match; among skip endings prefer a trailing sketch
  // skip over a trailing signal skip.
  auto rank = [&](State s) {
    if (s == kMatched) return 0;
    if (s == kTail) return end.step[kTail] == kSkipSketch ? 1 : 2;
    return 3;
  };
  for (State s : {kTail, kNone}) {
    if (end.cost[s] < end.cost[state] ||
        (end.cost[s] == end.cost[state] && rank(s) < rank(state))) {
      state = s;
    }
  }
  const double best = end.cost[state];

  std::vector<SegmentMatch> matches;
  std::size_t i = m, j = n;
  while (state != kNone && (i > 0 || j > 0)) {
    const Cell& c = at(i, j);
    const State prev = c.prev[state];
    switch (c.step[state]) {
      case kFromMatch:
        matches.push_back({i - 1, j - 1});
        --i;
        --j;
        break;
      case kSkipSketch:
        --i;
        break;
      case kSkipSignal:
        --j;
        break;
    }
    state = prev;
  }
  std::reverse(matches.begin(), matches.end());

  AlignmentResult r = cost_of(sketch, signal, std::move(matches), cfg);
  r.score = best + cfg.w_count * static_cast<double>(m > n ? m - n : n - m);
  return r;
}

/// Exhaustive search over every monotone correspondence. Test oracle only;
/// both sides are capped at kMaxSegments.
inline AlignmentResult brute_force_align(std::span<const SegmentDescriptor> sketch,
                                         std::span<const SegmentDescriptor> signal,
                                         const PenaltyConfig& cfg) {
  constexpr std::size_t kMaxSegments = 6;
  const std::size_t m = sketch.size(), n = signal.size();
  if (m == 0 || n == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "brute_force_align: descriptor lists must be non-empty");
  }
  if (m > kMaxSegments || n > kMaxSegments) {
    throw Error(ErrorKind::kInvalidArgument,
                "brute_force_align: at most 6 segments per side");
  }
  std::optional<AlignmentResult> best;
  std::vector<SegmentMatch> current;
  std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t i0,
                                                             std::size_t j0) {
    AlignmentResult r = cost_of(sketch, signal, current, cfg);
    if (!best || r.score < best->score) best = std::move(r);
    for (std::size_t i = i0; i < m; ++i) {
      for (std::size_t j = j0; j < n; ++j) {
        current.push_back({i, j});
        visit(i + 1, j + 1);
        current.pop_back();
      }
    }
  };
  visit(0, 0);
  return *best;
}

}  // namespace trendsketch
