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

/// @file clustering.hpp
/// @brief Average-linkage agglomerative clustering with medoid selection.

#pragma once

#include <algorithm>
#include <string>
#include <variant>
#include <vector>

#include "trendsketch/core.hpp"

namespace trendsketch {

enum class Linkage { kAverage };

struct CountCut {
  std::size_t k = 1;
};

/// Stop before any merge whose linkage distance exceeds tau.
struct ThresholdCut {
  double tau = 0.0;
};

using ClusterCut = std::variant<CountCut, ThresholdCut>;

inline ClusterCut default_cut(std::size_t n) {
  return CountCut{std::min<std::size_t>(8, n)};
}

struct Cluster {
  std::vector<std::string> member_ids;
  std::string medoid_id;
};

/// One merge step. Members are matrix indices.
struct Merge {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  double distance = 0.0;
};

struct ClusterReport {
  std::vector<Cluster> clusters;
  ClusterCut cut;
  Linkage linkage = Linkage::kAverage;
  std::vector<Merge> merges;
};

/// Member minimizing summed distance to the other members; ties go to the
/// lexicographically lowest id.
inline std::string medoid(const std::vector<std::string>& member_ids,
                          const DistanceMatrix& matrix) {
  if (member_ids.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "medoid: empty member list");
  }
  const auto& ids = matrix.ids();
  std::vector<std::size_t> idx;
  idx.reserve(member_ids.size());
  for (const auto& id : member_ids) {
    auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) {
      throw Error(ErrorKind::kNotFound, "medoid: unknown id '" + id + "'");
    }
    idx.push_back(static_cast<std::size_t>(it - ids.begin()));
  }
  std::size_t best = idx.front();
  double best_sum = kInf;
  for (std::size_t a : idx) {
    double sum = 0.0;
    for (std::size_t b : idx) sum += matrix.at(a, b);
    if (sum < best_sum || (sum == best_sum && ids[a] < ids[best])) {
      best = a;
      best_sum = sum;
    }
  }
  return ids[best];
}

/// Bottom-up merging under average linkage (mean of all cross-cluster
/// pairwise distances). Among equally close pairs the one whose smallest
/// member indices are lexicographically smallest merges first.
inline ClusterReport agglomerate(const DistanceMatrix& matrix, const ClusterCut& cut) {
  matrix.validate();
  const std::size_t n = matrix.n();
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "agglomerate: empty matrix");
  std::size_t target = 1;
  double tau = kInf;
  if (const auto* c = std::get_if<CountCut>(&cut)) {
    if (c->k < 1 || c->k > n) {
      throw Error(ErrorKind::kInvalidArgument,
                  "agglomerate: k must be in [1, " + std::to_string(n) + "]");
    }
    target = c->k;
  } else {
    tau = std::get<ThresholdCut>(cut).tau;
    if (!(tau >= 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "agglomerate: tau must be >= 0");
    }
  }

  // Clusters are kept sorted by their smallest member, so pair order equals
  // (min-index, min-index) order. cross[a][b] holds the sum of raw distances
  // between clusters a and b.
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<std::vector<double>> cross(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    members[i] = {i};
    for (std::size_t j = 0; j < n; ++j) cross[i][j] = matrix.at(i, j);
  }

  ClusterReport report;
  report.cut = cut;
  while (members.size() > target) {
    std::size_t ba = 0, bb = 1;
    double best = kInf;
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const double avg = cross[a][b] / static_cast<double>(members[a].size() *
                                                             members[b].size());
        if (avg < best) {
          best = avg;
          ba = a;
          bb = b;
        }
      }
    }
    if (best > tau) break;
    report.merges.push_back({members[ba], members[bb], best});

    members[ba].insert(members[ba].end(), members[bb].begin(), members[bb].end());
    std::sort(members[ba].begin(), members[ba].end());
    for (std::size_t c = 0; c < members.size(); ++c) {
      cross[ba][c] += cross[bb][c];
      cross[c][ba] = cross[ba][c];
    }
    cross[ba][ba] = 0.0;
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(bb));
    cross.erase(cross.begin() + static_cast<std::ptrdiff_t>(bb));
    for (auto& row : cross) row.erase(row.begin() + static_cast<std::ptrdiff_t>(bb));
  }

  for (const auto& group : members) {
    Cluster c;
    for (std::size_t i : group) c.member_ids.push_back(matrix.ids()[i]);
    c.medoid_id = medoid(c.member_ids, matrix);
    report.clusters.push_back(std::move(c));
  }
  return report;
}

}  // namespace trendsketch
