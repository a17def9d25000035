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

/// @file pipeline.hpp
/// @brief Request-level operations shared by the CLI and the HTTP service:
/// JSON request body in, JSON response body out.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trendsketch/clustering.hpp"
#include "trendsketch/constraint.hpp"
#include "trendsketch/json_io.hpp"
#include "trendsketch/ps.hpp"
#include "trendsketch/search.hpp"

namespace trendsketch::pipeline {

using json = nlohmann::json;

/// Weights from the request overlaid on the index build config. A request
/// that changes epsilon or the normalization mode is rejected as stale.
inline PenaltyConfig request_config(const Index& index, const json& penalties) {
  PenaltyConfig cfg = json_io::penalty_from_json(penalties, index.build_config(), &index.dataset());
  index.check_config(cfg);
  return cfg;
}

/// A constraint is either text for the annotation interpreter or a JSON AST.
inline std::optional<ConstraintExpr> request_constraint(
    const json& c, const Schema& schema,
    const AnnotationInterpreter& interpreter = TextConstraintInterpreter{}) {
  if (c.is_null()) return std::nullopt;
  if (c.is_string()) return interpreter.interpret({c.get<std::string>()}, schema);
  ConstraintExpr e = json_io::constraint_from_json(c);
  validate(e, schema);
  return e;
}

struct QueryOutcome {
  RankedMatches matches;
  std::size_t dropped_by_constraint = 0;
};

/// Ranks every indexed signal, intersects the ranking with the constraint's
/// allowed set, then keeps the first @p k.
inline QueryOutcome run_query(const Index& index, const std::vector<CanvasPoint>& sketch,
                              const PenaltyConfig& cfg, std::size_t k,
                              const std::optional<ConstraintExpr>& constraint,
                              const std::optional<Viewport>& viewport) {
  QueryOutcome out;
  out.matches = query(index, sketch, cfg, index.size(), viewport);
  if (constraint) {
    RankedMatches kept = intersect(out.matches, allowed_ids(*constraint, index.dataset()));
    out.dropped_by_constraint = out.matches.size() - kept.size();
    out.matches = std::move(kept);
  }
  if (out.matches.entries.size() > k) out.matches.entries.resize(k);
  return out;
}

inline json to_json(const QueryOutcome& q) {
  json matches = json::array();
  for (const auto& e : q.matches.entries) matches.push_back(json_io::to_json(e));
  return json{{"matches", std::move(matches)}, {"dropped_by_constraint", q.dropped_by_constraint}};
}

/// Body: {sketch_points, penalty_config?, k?, constraint?, viewport?}.
inline json handle_query(const Index& index, const json& body) {
  if (!body.is_object()) throw json_io::bad("query body must be an object");
  const auto sketch = json_io::sketch_from_json(json_io::get<json>(body, "sketch_points"));
  const PenaltyConfig cfg = request_config(index, json_io::get_or<json>(body, "penalty_config", nullptr));
  const json k_json = json_io::get_or<json>(body, "k", json(kDefaultTopK));
  if (!k_json.is_number_integer() || k_json.get<long long>() < 1) {
    throw json_io::bad("k must be a positive integer");
  }
  const auto constraint = request_constraint(json_io::get_or<json>(body, "constraint", nullptr),
                                             index.dataset().schema());
  std::optional<Viewport> viewport;
  if (body.contains("viewport") && !body.at("viewport").is_null()) {
    viewport = json_io::viewport_from_json(body.at("viewport"));
  }
  return to_json(run_query(index, sketch, cfg, k_json.get<std::size_t>(), constraint, viewport));
}

/// Body: {cut?, penalty_config?, include_matrix?}.
inline json handle_cluster(const Index& index, const json& body) {
  const json b = body.is_null() ? json::object() : body;
  if (!b.is_object()) throw json_io::bad("cluster body must be an object");
  const PenaltyConfig cfg = request_config(index, json_io::get_or<json>(b, "penalty_config", nullptr));
  const DistanceMatrix matrix = pairwise_matrix(index, cfg);
  const ClusterCut cut = json_io::cut_from_json(json_io::get_or<json>(b, "cut", nullptr), matrix.n());
  json out = json_io::to_json(agglomerate(matrix, cut), matrix);
  if (json_io::get_or<bool>(b, "include_matrix", false)) out["matrix"] = json_io::to_json(matrix);
  return out;
}

inline json handle_ps_resolve(const json& body) {
  const json_io::Scene scene = json_io::scene_from_json(body);
  return json_io::to_json(ps::resolve(scene.query, scene.elements, scene.connectors, scene.spaces));
}

}  // namespace trendsketch::pipeline
