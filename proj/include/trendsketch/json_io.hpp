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

/// @file json_io.hpp
/// @brief JSON encoding shared by the CLI and the HTTP service. Both go
/// through these functions so identical inputs give identical bytes.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "trendsketch/clustering.hpp"
#include "trendsketch/constraint.hpp"
#include "trendsketch/core.hpp"
#include "trendsketch/ingest.hpp"
#include "trendsketch/ps.hpp"
#include "trendsketch/search.hpp"

namespace trendsketch::json_io {

using json = nlohmann::json;

inline Error bad(const std::string& what) { return Error(ErrorKind::kInvalidArgument, what); }

/// Reads a key with a type check, turning nlohmann exceptions into ours.
template <typename T>
T get(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw bad("missing field '" + std::string(key) + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw bad("field '" + std::string(key) + "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return get<T>(j, key);
}

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("invalid JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Extents, schema, datasets
// ---------------------------------------------------------------------------

inline json to_json(const AxisRange& r) { return json::array({r.min, r.max}); }

inline AxisRange axis_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw bad("axis range must be [min, max]");
  }
  return AxisRange{j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const Extents& e) {
  json measures = json::array();
  for (const auto& m : e.measures) measures.push_back(to_json(m));
  return json{{"time", to_json(e.time)}, {"measures", std::move(measures)}};
}

inline Extents extents_from_json(const json& j) {
  Extents e;
  e.time = axis_from_json(get<json>(j, "time"));
  for (const auto& m : get<json>(j, "measures")) e.measures.push_back(axis_from_json(m));
  return e;
}

inline json to_json(const Schema& s) {
  return json{{"time_field", s.time_field},
              {"categorical_fields", s.categorical_fields},
              {"measure_fields", s.measure_fields}};
}

inline Schema schema_from_json(const json& j) {
  Schema s{get<std::string>(j, "time_field"),
           get<std::vector<std::string>>(j, "categorical_fields"),
           get<std::vector<std::string>>(j, "measure_fields")};
  s.validate();
  return s;
}

inline json to_json(const Signal& s) {
  json pts = json::array();
  for (const auto& p : s.points()) pts.push_back(json::array({p.t, p.y}));
  return json{{"id", s.id()}, {"dims", s.dims()}, {"points", std::move(pts)}};
}

inline Signal signal_from_json(const json& j) {
  std::vector<Point> pts;
  for (const auto& p : get<json>(j, "points")) {
    if (!p.is_array() || p.size() != 2) throw bad("signal point must be [t, [y...]]");
    try {
      pts.push_back(Point{p[0].get<double>(), p[1].get<Vec>()});
    } catch (const json::exception&) {
      throw bad("signal point must be [t, [y...]]");
    }
  }
  return Signal(get<std::string>(j, "id"),
                get_or<std::map<std::string, std::string>>(j, "dims", {}), std::move(pts));
}

inline json to_json(const Dataset& d) {
  json signals = json::array();
  for (const auto& s : d.signals()) signals.push_back(to_json(s));
  return json{{"id", d.id()},
              {"schema", to_json(d.schema())},
              {"global_extents", to_json(d.global_extents())},
              {"signals", std::move(signals)}};
}

inline Dataset dataset_from_json(const json& j) {
  std::vector<Signal> signals;
  for (const auto& s : get<json>(j, "signals")) signals.push_back(signal_from_json(s));
  return Dataset(get<std::string>(j, "id"), schema_from_json(get<json>(j, "schema")),
                 std::move(signals));
}

inline json to_json(const DatasetSummary& s) {
  return json{{"signal_count", s.signal_count},
              {"point_count", s.point_count},
              {"extents", to_json(s.extents)},
              {"dim_cardinalities", s.dim_cardinalities}};
}

inline CsvMapping mapping_from_json(const json& j) {
  CsvMapping m;
  m.time_field = get<std::string>(j, "time_field");
  m.categorical_fields = get<std::vector<std::string>>(j, "categorical_fields");
  m.measure_fields = get<std::vector<std::string>>(j, "measure_fields");
  const auto fmt = get_or<std::string>(j, "time_format", "auto");
  if (fmt == "auto") m.time_format = TimeFormat::kAuto;
  else if (fmt == "iso8601") m.time_format = TimeFormat::kIso8601;
  else if (fmt == "year") m.time_format = TimeFormat::kYear;
  else if (fmt == "epoch") m.time_format = TimeFormat::kEpochSeconds;
  else throw bad("time_format must be one of auto, iso8601, year, epoch");
  if (j.contains("id_field") && !j.at("id_field").is_null()) {
    m.id_field = get<std::string>(j, "id_field");
  }
  return m;
}

// ---------------------------------------------------------------------------
// Penalty configuration
// ---------------------------------------------------------------------------

inline json to_json(const NormalizationMode& m) {
  if (!m.is_global()) return "local";
  return json{{"global", to_json(m.extents())}};
}

/// "local", "global" (the dataset's extents, degenerate axes widened) or
/// {"global": extents}.
inline NormalizationMode mode_from_json(const json& j, const Dataset* dataset) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "local") return NormalizationMode::local();
    if (s == "global") {
      if (!dataset) throw bad("mode 'global' needs a dataset to take extents from");
      return NormalizationMode::global(dataset->global_extents().widened_if_degenerate());
    }
    throw bad("mode must be 'local' or 'global'");
  }
  if (j.is_object() && j.contains("global")) {
    return NormalizationMode::global(extents_from_json(j.at("global")));
  }
  throw bad("mode must be 'local', 'global' or {\"global\": extents}");
}

inline json to_json(const PenaltyConfig& c) {
  return json{{"w_length", c.w_length},   {"w_midpoint", c.w_midpoint},
              {"w_time", c.w_time},       {"w_velocity", c.w_velocity},
              {"w_skip", c.w_skip},       {"w_count", c.w_count},
              {"w_stretch", c.w_stretch}, {"epsilon", c.epsilon},
              {"v_max", c.v_max},         {"mode", to_json(c.mode)}};
}

/// Overlays the keys present in @p j onto @p base. Unknown keys are
/// rejected.
inline PenaltyConfig penalty_from_json(const json& j, PenaltyConfig base,
                                       const Dataset* dataset = nullptr) {
  if (j.is_null()) return base;
  if (!j.is_object()) throw bad("penalty config must be an object");
  for (const auto& [key, value] : j.items()) {
    auto num = [&]() {
      if (!value.is_number()) throw bad("penalty '" + key + "' must be a number");
      return value.get<double>();
    };
    if (key == "w_length") base.w_length = num();
    else if (key == "w_midpoint") base.w_midpoint = num();
    else if (key == "w_time") base.w_time = num();
    else if (key == "w_velocity") base.w_velocity = num();
    else if (key == "w_skip") base.w_skip = num();
    else if (key == "w_count") base.w_count = num();
    else if (key == "w_stretch") base.w_stretch = num();
    else if (key == "epsilon") base.epsilon = num();
    else if (key == "v_max") base.v_max = num();
    else if (key == "mode") base.mode = mode_from_json(value, dataset);
    else throw bad("unknown penalty key '" + key + "'");
  }
  base.validate();
  return base;
}

// ---------------------------------------------------------------------------
// Alignment and rankings
// ---------------------------------------------------------------------------

inline json to_json(const SkippedSegment& s) {
  return json{{"side", s.side == Side::kSketch ? "sketch" : "signal"}, {"index", s.index}};
}

inline json to_json(const AlignmentResult& a) {
  json matches = json::array(), interior = json::array(), boundary = json::array();
  for (const auto& m : a.matches) matches.push_back(json::array({m.sketch, m.signal}));
  for (const auto& s : a.skipped_interior) interior.push_back(to_json(s));
  for (const auto& s : a.skipped_boundary) boundary.push_back(to_json(s));
  return json{{"score", a.score},
              {"matches", std::move(matches)},
              {"skipped_interior", std::move(interior)},
              {"skipped_boundary", std::move(boundary)}};
}

inline json to_json(const RankedEntry& e) {
  return json{{"signal_id", e.signal_id}, {"score", e.score}, {"alignment", to_json(e.alignment)}};
}

inline json to_json(const DistanceMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.n(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.n(); ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"ids", m.ids()}, {"values", std::move(rows)}};
}

inline json to_json(const ClusterReport& r, const DistanceMatrix& m) {
  json clusters = json::array(), merges = json::array();
  for (const auto& c : r.clusters) {
    clusters.push_back(json{{"member_ids", c.member_ids}, {"medoid_id", c.medoid_id}});
  }
  auto names = [&](const std::vector<std::size_t>& idx) {
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(m.ids()[i]);
    return out;
  };
  for (const auto& mg : r.merges) {
    merges.push_back(json{{"left", names(mg.left)}, {"right", names(mg.right)}, {"distance", mg.distance}});
  }
  json cut;
  if (const auto* c = std::get_if<CountCut>(&r.cut)) cut = json{{"k", c->k}};
  else cut = json{{"threshold", std::get<ThresholdCut>(r.cut).tau}};
  return json{{"linkage", "average"}, {"cut", std::move(cut)},
              {"clusters", std::move(clusters)}, {"merges", std::move(merges)}};
}

/// {"k": n} or {"threshold": tau}; null selects the default count cut.
inline ClusterCut cut_from_json(const json& j, std::size_t n) {
  if (j.is_null()) return default_cut(n);
  if (j.is_object() && j.contains("k")) {
    const auto& k = j.at("k");
    if (!k.is_number_integer() || k.get<long long>() < 1) throw bad("cut.k must be a positive integer");
    return CountCut{k.get<std::size_t>()};
  }
  if (j.is_object() && j.contains("threshold")) {
    if (!j.at("threshold").is_number()) throw bad("cut.threshold must be a number");
    return ThresholdCut{j.at("threshold").get<double>()};
  }
  throw bad("cut must be {\"k\": n} or {\"threshold\": tau}");
}

// ---------------------------------------------------------------------------
// Sketches
// ---------------------------------------------------------------------------

inline std::vector<CanvasPoint> sketch_from_json(const json& j) {
  if (!j.is_array()) throw bad("sketch points must be an array of [x, y]");
  std::vector<CanvasPoint> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw bad("sketch point must be [x, y]");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

/// {"canvas": {"left", "right", "top", "bottom"}, "x_data": [min, max],
///  "y_data": [min, max]}
inline Viewport viewport_from_json(const json& j) {
  const json canvas = get<json>(j, "canvas");
  Viewport v;
  v.x_left = get<double>(canvas, "left");
  v.x_right = get<double>(canvas, "right");
  v.y_top = get<double>(canvas, "top");
  v.y_bottom = get<double>(canvas, "bottom");
  v.x_data = axis_from_json(get<json>(j, "x_data"));
  v.y_data = axis_from_json(get<json>(j, "y_data"));
  return v;
}

// ---------------------------------------------------------------------------
// Index files
// ---------------------------------------------------------------------------

inline json to_json(const Index& index) {
  json entries = json::array(), skipped = json::array();
  for (const auto& e : index.entries()) {
    json pts = json::array();
    for (const auto& p : e.simplified.points()) pts.push_back(json::array({p.t, p.y}));
    entries.push_back(json{{"signal_id", e.signal_id}, {"simplified", std::move(pts)}});
  }
  for (const auto& u : index.unindexable()) {
    skipped.push_back(json{{"signal_id", u.signal_id}, {"reason", u.reason}});
  }
  return json{{"format", "trendsketch-index/1"},
              {"build_config", to_json(index.build_config())},
              {"dataset", to_json(index.dataset())},
              {"entries", std::move(entries)},
              {"unindexable", std::move(skipped)}};
}

/// Rebuilds the index from the embedded dataset and build config, then
/// checks the stored simplified polylines against the rebuild.
inline Index index_from_json(const json& j) {
  if (get_or<std::string>(j, "format", "") != "trendsketch-index/1") {
    throw Error(ErrorKind::kData, "not a trendsketch index file");
  }
  auto dataset = std::make_shared<const Dataset>(dataset_from_json(get<json>(j, "dataset")));
  const PenaltyConfig cfg = penalty_from_json(get<json>(j, "build_config"), PenaltyConfig{},
                                              dataset.get());
  Index index = build_index(dataset, cfg);
  const json stored = get_or<json>(j, "entries", json::array());
  if (stored.size() != index.entries().size()) {
    throw Error(ErrorKind::kData, "index file is inconsistent with its dataset");
  }
  for (std::size_t i = 0; i < stored.size(); ++i) {
    const auto& e = index.entries()[i];
    if (get<std::string>(stored[i], "signal_id") != e.signal_id ||
        get<json>(stored[i], "simplified").size() != e.simplified.size()) {
      throw Error(ErrorKind::kData, "index file entry '" + e.signal_id + "' is stale");
    }
  }
  return index;
}

// ---------------------------------------------------------------------------
// Constraint AST
// ---------------------------------------------------------------------------

inline json literal_to_json(const Literal& l) {
  if (const auto* s = std::get_if<std::string>(&l)) return *s;
  return std::get<double>(l);
}

inline Literal literal_from_json(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return j.get<double>();
  throw Error(ErrorKind::kConstraint, "constraint literal must be a string or number");
}

inline json bound_to_json(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

inline double bound_from_json(const json& j, const char* key, double open) {
  if (!j.contains(key) || j.at(key).is_null()) return open;
  if (!j.at(key).is_number()) throw Error(ErrorKind::kConstraint, std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

inline json to_json(const ConstraintExpr& e) {
  struct V {
    json operator()(const Compare& c) const {
      return json{{"op", "compare"}, {"field", c.field},
                  {"cmp", detail::op_text(c.op)}, {"value", literal_to_json(c.value)}};
    }
    json operator()(const In& in) const {
      json values = json::array();
      for (const auto& l : in.values) values.push_back(literal_to_json(l));
      return json{{"op", "in"}, {"field", in.field}, {"values", std::move(values)}};
    }
    json operator()(const TimeRange& r) const {
      return json{{"op", "time_range"}, {"start", bound_to_json(r.start)}, {"end", bound_to_json(r.end)}};
    }
    json operator()(const ValueRange& r) const {
      return json{{"op", "value_range"}, {"measure", r.measure},
                  {"lo", bound_to_json(r.lo)}, {"hi", bound_to_json(r.hi)}};
    }
    json list(const char* op, const std::vector<ConstraintExpr>& ops) const {
      json args = json::array();
      for (const auto& o : ops) args.push_back(std::visit(*this, o.node));
      return json{{"op", op}, {"args", std::move(args)}};
    }
    json operator()(const And& a) const { return list("and", a.operands); }
    json operator()(const Or& o) const { return list("or", o.operands); }
    json operator()(const Not& n) const {
      return json{{"op", "not"}, {"arg", std::visit(*this, n.operand->node)}};
    }
  };
  return std::visit(V{}, e.node);
}

inline ConstraintExpr constraint_from_json(const json& j) {
  auto fail = [](const std::string& m) { return Error(ErrorKind::kConstraint, "constraint: " + m); };
  if (!j.is_object() || !j.contains("op") || !j.at("op").is_string()) throw fail("node needs an 'op'");
  const auto op = j.at("op").get<std::string>();
  auto str = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_string()) throw fail(std::string("'") + key + "' must be a string");
    return j.at(key).get<std::string>();
  };
  if (op == "compare") {
    static const std::map<std::string, CompareOp> ops{{"=", CompareOp::kEq},  {"!=", CompareOp::kNe},
                                                      {"<", CompareOp::kLt},  {"<=", CompareOp::kLe},
                                                      {">", CompareOp::kGt},  {">=", CompareOp::kGe}};
    auto it = ops.find(str("cmp"));
    if (it == ops.end()) throw fail("unknown comparison '" + str("cmp") + "'");
    if (!j.contains("value")) throw fail("compare needs 'value'");
    return ConstraintExpr{Compare{str("field"), it->second, literal_from_json(j.at("value"))}};
  }
  if (op == "in") {
    In in{str("field"), {}};
    if (!j.contains("values") || !j.at("values").is_array()) throw fail("in needs 'values'");
    for (const auto& v : j.at("values")) in.values.push_back(literal_from_json(v));
    return ConstraintExpr{std::move(in)};
  }
  if (op == "time_range") {
    return ConstraintExpr{TimeRange{bound_from_json(j, "start", -kInf), bound_from_json(j, "end", kInf)}};
  }
  if (op == "value_range") {
    return ConstraintExpr{ValueRange{str("measure"), bound_from_json(j, "lo", -kInf),
                                     bound_from_json(j, "hi", kInf)}};
  }
  if (op == "and" || op == "or") {
    if (!j.contains("args") || !j.at("args").is_array()) throw fail(op + " needs 'args'");
    std::vector<ConstraintExpr> args;
    for (const auto& a : j.at("args")) args.push_back(constraint_from_json(a));
    if (op == "and") return ConstraintExpr{And{std::move(args)}};
    return ConstraintExpr{Or{std::move(args)}};
  }
  if (op == "not") {
    if (!j.contains("arg")) throw fail("not needs 'arg'");
    return make_not(constraint_from_json(j.at("arg")));
  }
  throw fail("unknown op '" + op + "'");
}

// ---------------------------------------------------------------------------
// Proximity-semantics scenes
// ---------------------------------------------------------------------------

inline ps::Position position_from_json(const json& j) {
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  if (j.is_object()) return {get<double>(j, "x"), get<double>(j, "y")};
  throw bad("position must be [x, y] or {x, y}");
}

inline ps::Element element_from_json(const json& j) {
  ps::Element e;
  e.id = get<std::string>(j, "id");
  const auto kind = get<std::string>(j, "kind");
  if (kind == "glyph") e.kind = ps::ElementKind::kGlyph;
  else if (kind == "text") e.kind = ps::ElementKind::kText;
  else if (kind == "data_region") e.kind = ps::ElementKind::kDataRegion;
  else throw bad("element kind must be glyph, text or data_region");
  e.position = position_from_json(get<json>(j, "position"));
  if (j.contains("text") && !j.at("text").is_null()) e.text = get<std::string>(j, "text");
  if (j.contains("timestamp") && !j.at("timestamp").is_null()) e.timestamp = get<double>(j, "timestamp");
  e.validate();
  return e;
}

struct Scene {
  ps::Element query;
  std::vector<ps::Element> elements;
  std::vector<ps::Connector> connectors;
  std::vector<ps::Space> spaces;
};

/// {"query": id | element, "elements": [...], "connectors": [{"from", "to"}],
///  "spaces": [{"type": "canvas"|"semantic"|"temporal", "threshold", "snap_radius"?}],
///  "canvas": {"width", "height"}}. Without "spaces" the defaults derived
/// from "canvas" apply.
inline Scene scene_from_json(const json& j) {
  Scene s;
  for (const auto& e : get<json>(j, "elements")) s.elements.push_back(element_from_json(e));
  for (const auto& c : get_or<json>(j, "connectors", json::array())) {
    s.connectors.push_back({position_from_json(get<json>(c, "from")), position_from_json(get<json>(c, "to"))});
  }
  const json q = get<json>(j, "query");
  if (q.is_string()) {
    const auto id = q.get<std::string>();
    auto it = std::find_if(s.elements.begin(), s.elements.end(), [&](const auto& e) { return e.id == id; });
    if (it == s.elements.end()) throw Error(ErrorKind::kNotFound, "query element '" + id + "' not in scene");
    s.query = *it;
  } else {
    s.query = element_from_json(q);
  }
  std::optional<double> diag;
  if (j.contains("canvas")) {
    const json c = j.at("canvas");
    diag = std::hypot(get<double>(c, "width"), get<double>(c, "height"));
  }
  if (j.contains("spaces")) {
    for (const auto& sp : j.at("spaces")) {
      const auto type = get<std::string>(sp, "type");
      const double threshold = get<double>(sp, "threshold");
      if (type == "canvas") {
        double snap = 0.0;
        if (sp.contains("snap_radius")) snap = get<double>(sp, "snap_radius");
        else if (diag) snap = 0.02 * *diag;
        s.spaces.push_back(ps::CanvasSpace{threshold, snap});
      } else if (type == "semantic") {
        s.spaces.push_back(ps::SemanticSpace{threshold});
      } else if (type == "temporal") {
        s.spaces.push_back(ps::TemporalSpace{threshold});
      } else {
        throw bad("space type must be canvas, semantic or temporal");
      }
    }
  } else {
    if (!diag) throw bad("scene needs either 'spaces' or 'canvas' for default thresholds");
    const json c = j.at("canvas");
    s.spaces = ps::default_spaces(get<double>(c, "width"), get<double>(c, "height"));
  }
  return s;
}

inline json to_json(const ps::ResolutionSet& r) {
  const char* card = r.cardinality == ps::Cardinality::kZero  ? "zero"
                     : r.cardinality == ps::Cardinality::kOne ? "one"
                                                              : "many";
  return json{{"candidates", r.candidates}, {"cardinality", card}};
}

}  // namespace trendsketch::json_io
