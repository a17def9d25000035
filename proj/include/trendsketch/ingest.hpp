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

/// @file ingest.hpp
/// @brief CSV time-series corpora to Datasets, and back.

#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trendsketch/core.hpp"
#include "trendsketch/time.hpp"

namespace trendsketch {

enum class TimeFormat {
  kAuto,          ///< bare integer year (<= 4 digits) or ISO-8601
  kIso8601,
  kYear,
  kEpochSeconds,
};

struct CsvMapping {
  std::string time_field;
  std::vector<std::string> categorical_fields;
  std::vector<std::string> measure_fields;
  TimeFormat time_format = TimeFormat::kAuto;
  /// Column holding an explicit signal id. Without it the id is the
  /// categorical values joined by '/'.
  std::optional<std::string> id_field;
};

struct IngestResult {
  Dataset dataset;
  std::vector<std::string> warnings;
};

namespace detail {

/// RFC-4180 records. Handles quoted fields with embedded commas, quotes and
/// newlines, CRLF or LF line ends and a leading UTF-8 BOM. Blank lines are
/// skipped.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, field_started = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
    row.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_row();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw Error(ErrorKind::kData, "csv: unterminated quoted field");
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<double> parse_time(const std::string& raw, TimeFormat fmt) {
  const auto b = raw.find_first_not_of(" \t");
  if (b == std::string::npos) return std::nullopt;
  const std::string s = raw.substr(b, raw.find_last_not_of(" \t") - b + 1);
  switch (fmt) {
    case TimeFormat::kAuto: return timeutil::parse_year_or_iso(s);
    case TimeFormat::kIso8601: return timeutil::parse_iso8601(s);
    case TimeFormat::kYear: {
      if (!std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
          s.size() > 6) {
        return std::nullopt;
      }
      return timeutil::year_to_seconds(std::stoi(s));
    }
    case TimeFormat::kEpochSeconds: return parse_double(s);
  }
  return std::nullopt;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Groups rows into signals by their categorical values (or the id column),
/// sorts each signal by time, keeps the last row among duplicate timestamps
/// and drops signals with fewer than two points; both cases are reported as
/// warnings. Malformed timestamps or measures abort the whole load.
inline IngestResult load_csv(std::string_view bytes, const CsvMapping& mapping,
                             std::string dataset_id) {
  Schema schema{mapping.time_field, mapping.categorical_fields, mapping.measure_fields};
  schema.validate();
  const auto rows = detail::parse_csv(bytes);
  if (rows.empty()) throw Error(ErrorKind::kData, "csv: missing header row");

  const auto& header = rows.front();
  auto column = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorKind::kData, "csv: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t time_col = column(mapping.time_field);
  std::vector<std::size_t> dim_cols, measure_cols;
  for (const auto& f : mapping.categorical_fields) dim_cols.push_back(column(f));
  for (const auto& f : mapping.measure_fields) measure_cols.push_back(column(f));
  std::optional<std::size_t> id_col;
  if (mapping.id_field) id_col = column(*mapping.id_field);

  struct Pending {
    std::map<std::string, std::string> dims;
    std::vector<std::pair<Point, std::size_t>> points;  // (point, data row)
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, Pending> groups;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "csv row " + std::to_string(r);
    if (row.size() != header.size()) {
      throw Error(ErrorKind::kData, where + ": expected " + std::to_string(header.size()) +
                                        " fields, found " + std::to_string(row.size()));
    }
    const auto t = detail::parse_time(row[time_col], mapping.time_format);
    if (!t) {
      throw Error(ErrorKind::kData, where + ": cannot parse timestamp '" + row[time_col] + "'");
    }
    Point p{*t, {}};
    for (std::size_t k = 0; k < measure_cols.size(); ++k) {
      const auto v = detail::parse_double(row[measure_cols[k]]);
      if (!v) {
        throw Error(ErrorKind::kData, where + ": cannot parse measure '" +
                                          mapping.measure_fields[k] + "' value '" +
                                          row[measure_cols[k]] + "'");
      }
      p.y.push_back(*v);
    }
    std::map<std::string, std::string> dims;
    std::string id;
    for (std::size_t k = 0; k < dim_cols.size(); ++k) {
      dims[mapping.categorical_fields[k]] = row[dim_cols[k]];
      if (k) id += '/';
      id += row[dim_cols[k]];
    }
    if (id_col) id = row[*id_col];
    auto [it, inserted] = groups.try_emplace(id);
    if (inserted) {
      order.push_back(id);
      it->second.dims = std::move(dims);
    }
    it->second.points.emplace_back(std::move(p), r);
  }

  std::vector<std::string> warnings;
  std::vector<Signal> signals;
  for (const auto& id : order) {
    auto& g = groups[id];
    std::stable_sort(g.points.begin(), g.points.end(),
                     [](const auto& a, const auto& b) { return a.first.t < b.first.t; });
    std::vector<Point> pts;
    for (auto& [p, row] : g.points) {
      if (!pts.empty() && pts.back().t == p.t) {
        warnings.push_back("signal '" + id + "': duplicate timestamp at csv row " +
                           std::to_string(row) + ", kept the last row");
        pts.back() = std::move(p);
      } else {
        pts.push_back(std::move(p));
      }
    }
    if (pts.size() < 2) {
      warnings.push_back("signal '" + id + "': dropped, fewer than 2 points");
      continue;
    }
    signals.emplace_back(id, std::move(g.dims), std::move(pts));
  }
  if (signals.empty()) throw Error(ErrorKind::kData, "csv: no signal has at least 2 points");
  return IngestResult{Dataset(std::move(dataset_id), std::move(schema), std::move(signals)),
                      std::move(warnings)};
}

struct DatasetSummary {
  std::size_t signal_count = 0;
  std::size_t point_count = 0;
  Extents extents;
  std::map<std::string, std::size_t> dim_cardinalities;
};

inline DatasetSummary dataset_summary(const Dataset& dataset) {
  DatasetSummary s;
  s.signal_count = dataset.signals().size();
  s.extents = dataset.global_extents();
  std::map<std::string, std::set<std::string>> values;
  for (const auto& sig : dataset.signals()) {
    s.point_count += sig.points().size();
    for (const auto& [k, v] : sig.dims()) values[k].insert(v);
  }
  for (const auto& f : dataset.schema().categorical_fields) {
    s.dim_cardinalities[f] = values[f].size();
  }
  return s;
}

struct CsvExport {
  std::string csv;
  CsvMapping mapping;
};

/// Writes one row per point with exact (round-trippable) epoch seconds. An
/// id column is added only when some signal id differs from its joined
/// categorical values.
inline CsvExport export_csv(const Dataset& dataset) {
  const Schema& schema = dataset.schema();
  CsvExport out;
  out.mapping = CsvMapping{schema.time_field, schema.categorical_fields, schema.measure_fields,
                           TimeFormat::kEpochSeconds, std::nullopt};
  bool need_id = false;
  for (const auto& s : dataset.signals()) {
    std::string joined;
    for (std::size_t k = 0; k < schema.categorical_fields.size(); ++k) {
      if (k) joined += '/';
      auto it = s.dims().find(schema.categorical_fields[k]);
      if (it != s.dims().end()) joined += it->second;
    }
    if (joined != s.id()) need_id = true;
  }
  std::string id_name = "signal_id";
  while (need_id && (id_name == schema.time_field || schema.is_categorical(id_name) ||
                     schema.measure_index(id_name))) {
    id_name = "_" + id_name;
  }
  if (need_id) out.mapping.id_field = id_name;

  std::string& csv = out.csv;
  std::vector<std::string> header;
  if (need_id) header.push_back(id_name);
  header.insert(header.end(), schema.categorical_fields.begin(), schema.categorical_fields.end());
  header.push_back(schema.time_field);
  header.insert(header.end(), schema.measure_fields.begin(), schema.measure_fields.end());
  for (std::size_t i = 0; i < header.size(); ++i) {
    csv += (i ? "," : "") + detail::csv_escape(header[i]);
  }
  csv += "\n";
  for (const auto& s : dataset.signals()) {
    for (const auto& p : s.points()) {
      std::string line;
      if (need_id) line += detail::csv_escape(s.id()) + ",";
      for (const auto& f : schema.categorical_fields) {
        auto it = s.dims().find(f);
        line += detail::csv_escape(it == s.dims().end() ? "" : it->second) + ",";
      }
      line += detail::format_double(p.t);
      for (double v : p.y) line += "," + detail::format_double(v);
      csv += line + "\n";
    }
  }
  return out;
}

}  // namespace trendsketch
