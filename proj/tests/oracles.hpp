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

// Independent reference implementations and random generators shared by the
// unit tests and the acceptance binary. Nothing here calls the library code
// it is used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "trendsketch/trendsketch.hpp"

namespace oracle {

using trendsketch::DistanceMatrix;

// --- geometry --------------------------------------------------------------

/// Distance from p to segment [a,b] by numerically minimizing
/// |a + s(b-a) - p| over s in [0,1].
inline double point_segment(const std::vector<double>& p, const std::vector<double>& a,
                            const std::vector<double>& b) {
  auto dist_at = [&](double s) {
    double r = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double e = a[i] + s * (b[i] - a[i]) - p[i];
      r += e * e;
    }
    return std::sqrt(r);
  };
  // The squared distance is a convex quadratic in s, so ternary search
  // converges to the global minimum on [0,1].
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    if (dist_at(m1) <= dist_at(m2)) hi = m2;
    else lo = m1;
  }
  return std::min({dist_at(0.0), dist_at(1.0), dist_at((lo + hi) / 2.0)});
}

/// Minimum distance from p to any segment of the polyline.
inline double point_polyline(const std::vector<double>& p,
                             const std::vector<std::vector<double>>& polyline) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
    best = std::min(best, point_segment(p, polyline[k], polyline[k + 1]));
  }
  return best;
}

inline std::vector<double> flat(const trendsketch::NormalizedPoint& p) {
  std::vector<double> v{p.t};
  v.insert(v.end(), p.y.begin(), p.y.end());
  return v;
}

// --- clustering ------------------------------------------------------------

using Partition = std::set<std::set<std::string>>;

/// Textbook average linkage: recompute every cross-cluster mean from the raw
/// matrix at each step.
inline Partition average_linkage(const DistanceMatrix& m, std::size_t k) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < m.n(); ++i) clusters.push_back({i});
  auto mean = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double s = 0.0;
    for (auto i : a)
      for (auto j : b) s += m.at(i, j);
    return s / static_cast<double>(a.size() * b.size());
  };
  while (clusters.size() > k) {
    std::size_t ba = 0, bb = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const double d = mean(clusters[a], clusters[b]);
        const auto key = std::make_pair(*std::min_element(clusters[a].begin(), clusters[a].end()),
                                        *std::min_element(clusters[b].begin(), clusters[b].end()));
        const auto best_key =
            std::make_pair(*std::min_element(clusters[ba].begin(), clusters[ba].end()),
                           *std::min_element(clusters[bb].begin(), clusters[bb].end()));
        if (d < best || (d == best && key < best_key)) {
          best = d;
          ba = a;
          bb = b;
        }
      }
    }
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    clusters.erase(clusters.begin() + static_cast<long>(bb));
  }
  Partition out;
  for (const auto& c : clusters) {
    std::set<std::string> ids;
    for (auto i : c) ids.insert(m.ids()[i]);
    out.insert(ids);
  }
  return out;
}

inline double cross_mean(const DistanceMatrix& m, const std::vector<std::size_t>& a,
                         const std::vector<std::size_t>& b) {
  double s = 0.0;
  for (auto i : a)
    for (auto j : b) s += m.at(i, j);
  return s / static_cast<double>(a.size() * b.size());
}

/// All members whose summed distance is minimal.
inline std::set<std::string> medoid_candidates(const std::vector<std::string>& members,
                                               const DistanceMatrix& m) {
  auto index_of = [&](const std::string& id) {
    return static_cast<std::size_t>(std::find(m.ids().begin(), m.ids().end(), id) - m.ids().begin());
  };
  std::vector<double> sums;
  for (const auto& a : members) {
    double s = 0.0;
    for (const auto& b : members) s += m.at(index_of(a), index_of(b));
    sums.push_back(s);
  }
  const double best = *std::min_element(sums.begin(), sums.end());
  std::set<std::string> out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (sums[i] == best) out.insert(members[i]);
  }
  return out;
}

// --- text ------------------------------------------------------------------

/// Plain recursive edit distance with memoization, ASCII only.
inline std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == 0) return j;
    if (j == 0) return i;
    auto it = memo.find({i, j});
    if (it != memo.end()) return it->second;
    const std::size_t r = std::min({go(i - 1, j) + 1, go(i, j - 1) + 1,
                                    go(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1)});
    memo[{i, j}] = r;
    return r;
  };
  return go(a.size(), b.size());
}

// --- graphs ----------------------------------------------------------------

/// Transitive closure by Warshall's algorithm over an explicit adjacency
/// matrix; returns the nodes reachable from @p source (excluding it unless
/// on a cycle, which is irrelevant for undirected use).
inline std::vector<bool> reachable(std::vector<std::vector<bool>> adj, std::size_t source) {
  const std::size_t n = adj.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (adj[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (adj[k][j]) adj[i][j] = true;
  return adj[source];
}

// --- random inputs ---------------------------------------------------------

inline trendsketch::Signal random_signal(std::mt19937_64& rng, const std::string& id,
                                         std::size_t points, std::size_t measures = 1,
                                         double t0 = 0.0) {
  std::uniform_real_distribution<double> step(0.5, 3.0), val(-50.0, 50.0);
  std::vector<trendsketch::Point> pts;
  double t = t0;
  for (std::size_t i = 0; i < points; ++i) {
    trendsketch::Point p{t, {}};
    for (std::size_t k = 0; k < measures; ++k) p.y.push_back(val(rng));
    pts.push_back(std::move(p));
    t += step(rng);
  }
  return trendsketch::Signal(id, {{"name", id}}, std::move(pts));
}

inline trendsketch::SegmentDescriptor random_descriptor(std::mt19937_64& rng,
                                                        std::size_t measures = 1) {
  std::uniform_real_distribution<double> u(0.0, 1.0), v(-5.0, 5.0);
  trendsketch::SegmentDescriptor d;
  d.length = u(rng) * 1.5;
  d.mid_time = u(rng);
  for (std::size_t k = 0; k < measures; ++k) {
    d.mid_spatial.push_back(u(rng));
    d.velocity.push_back(v(rng));
  }
  return d;
}

inline trendsketch::PenaltyConfig random_weights(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(0.0, 2.0);
  trendsketch::PenaltyConfig c;
  c.w_length = w(rng);
  c.w_midpoint = w(rng);
  c.w_time = w(rng);
  c.w_velocity = w(rng);
  c.w_skip = w(rng);
  c.w_count = w(rng);
  c.w_stretch = w(rng);
  c.v_max = 1.0 + 9.0 * w(rng);
  return c;
}

inline DistanceMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));
  DistanceMatrix m(ids);
  std::uniform_real_distribution<double> d(0.0, 10.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = d(rng);
      m.set(i, j, v);
      m.set(j, i, v);
    }
  return m;
}

}  // namespace oracle
