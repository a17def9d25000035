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

/// @file service.hpp
/// @brief HTTP JSON API over an in-memory registry of datasets and indexes.
///
/// Routes:
///   POST /datasets                       multipart {csv, mapping} or JSON {csv, mapping}
///   GET  /datasets/{id}/signals          ?limit&offset
///   POST /datasets/{id}/index            {penalty_config}
///   POST /indexes/{id}/query             {sketch_points, penalty_config, k, constraint, viewport}
///   POST /indexes/{id}/cluster           {cut, penalty_config, include_matrix}
///   POST /ps/resolve                     scene
///   GET  /healthz
///
/// Handlers are plain functions of (registry, request) so they can be
/// tested without a socket; mount() binds them to an httplib::Server.

#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>

#include "httplib.h"
#include "trendsketch/ingest.hpp"
#include "trendsketch/json_io.hpp"
#include "trendsketch/pipeline.hpp"

namespace trendsketch::service {

using json = nlohmann::json;

struct Response {
  int status = 200;
  std::string body;
};

/// Datasets and indexes by id. Values are immutable once inserted; inserts
/// take an exclusive lock, lookups a shared one. With a data directory every
/// insert is also written as a JSON snapshot and reloaded on startup.
class Registry {
 public:
  explicit Registry(std::optional<std::filesystem::path> data_dir = std::nullopt)
      : data_dir_(std::move(data_dir)) {
    if (data_dir_) load_snapshots();
  }

  std::string next_dataset_id() { return "ds-" + std::to_string(++dataset_counter_); }
  std::string next_index_id() { return "ix-" + std::to_string(++index_counter_); }

  void add_dataset(std::shared_ptr<const Dataset> d) {
    {
      std::unique_lock lock(mu_);
      datasets_[d->id()] = d;
    }
    if (data_dir_) write(*data_dir_ / "datasets" / (d->id() + ".json"), json_io::to_json(*d));
  }

  void add_index(const std::string& id, std::shared_ptr<const Index> ix) {
    {
      std::unique_lock lock(mu_);
      indexes_[id] = ix;
    }
    if (data_dir_) write(*data_dir_ / "indexes" / (id + ".json"), json_io::to_json(*ix));
  }

  std::shared_ptr<const Dataset> dataset(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = datasets_.find(id);
    if (it == datasets_.end()) throw Error(ErrorKind::kNotFound, "unknown dataset '" + id + "'");
    return it->second;
  }

  std::shared_ptr<const Index> index(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = indexes_.find(id);
    if (it == indexes_.end()) throw Error(ErrorKind::kNotFound, "unknown index '" + id + "'");
    return it->second;
  }

 private:
  static void write(const std::filesystem::path& path, const json& j) {
    std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary);
      out << j.dump();
      if (!out) throw Error(ErrorKind::kIo, "cannot write snapshot " + path.string());
    }
    std::filesystem::rename(tmp, path);
  }

  static json read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return json_io::parse(ss.str());
  }

  static std::size_t counter_of(const std::string& id) {
    const auto dash = id.find('-');
    try {
      return dash == std::string::npos ? 0 : std::stoul(id.substr(dash + 1));
    } catch (const std::exception&) {
      return 0;
    }
  }

  void load_snapshots() {
    namespace fs = std::filesystem;
    const fs::path ds_dir = *data_dir_ / "datasets", ix_dir = *data_dir_ / "indexes";
    if (fs::exists(ds_dir)) {
      for (const auto& f : fs::directory_iterator(ds_dir)) {
        if (f.path().extension() != ".json") continue;
        auto d = std::make_shared<const Dataset>(json_io::dataset_from_json(read(f.path())));
        dataset_counter_ = std::max<std::size_t>(dataset_counter_, counter_of(d->id()));
        datasets_[d->id()] = std::move(d);
      }
    }
    if (fs::exists(ix_dir)) {
      for (const auto& f : fs::directory_iterator(ix_dir)) {
        if (f.path().extension() != ".json") continue;
        const std::string id = f.path().stem().string();
        index_counter_ = std::max<std::size_t>(index_counter_, counter_of(id));
        indexes_[id] = std::make_shared<const Index>(json_io::index_from_json(read(f.path())));
      }
    }
  }

  std::optional<std::filesystem::path> data_dir_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
  std::map<std::string, std::shared_ptr<const Index>> indexes_;
  std::atomic<std::size_t> dataset_counter_{0};
  std::atomic<std::size_t> index_counter_{0};
};

inline int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotFound: return 404;
    case ErrorKind::kStaleIndex: return 409;
    case ErrorKind::kConstraint: return 422;
    case ErrorKind::kIo: return 500;
    default: return 400;
  }
}

inline const char* kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kRangeViolation: return "range_violation";
    case ErrorKind::kDegenerateSegment: return "degenerate_segment";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kStaleIndex: return "stale_index";
    case ErrorKind::kConstraint: return "constraint";
    case ErrorKind::kData: return "data";
    case ErrorKind::kIo: return "io";
  }
  return "error";
}

inline Response error_response(const Error& e) {
  return {status_for(e.kind()),
          json{{"error", {{"kind", kind_name(e.kind())}, {"message", e.what()}}}}.dump()};
}

/// Runs @p fn and converts library errors into JSON error responses.
template <typename Fn>
Response guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return {500, json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump()};
  }
}

inline json body_json(const std::string& body) {
  if (body.empty()) return json::object();
  return json_io::parse(body);
}

// ---------------------------------------------------------------------------
// Handlers
// ---------------------------------------------------------------------------

inline Response post_dataset(Registry& reg, const std::string& csv, const json& mapping) {
  return guarded([&]() -> Response {
    const CsvMapping m = json_io::mapping_from_json(mapping);
    IngestResult r = load_csv(csv, m, reg.next_dataset_id());
    auto ds = std::make_shared<const Dataset>(std::move(r.dataset));
    reg.add_dataset(ds);
    return {201, json{{"dataset_id", ds->id()},
                      {"summary", json_io::to_json(dataset_summary(*ds))},
                      {"warnings", r.warnings}}
                     .dump()};
  });
}

inline Response get_signals(const Registry& reg, const std::string& dataset_id,
                            std::size_t limit, std::size_t offset) {
  return guarded([&]() -> Response {
    const auto ds = reg.dataset(dataset_id);
    json page = json::array();
    const auto& sigs = ds->signals();
    for (std::size_t i = offset; i < sigs.size() && i < offset + limit; ++i) {
      page.push_back(json{{"id", sigs[i].id()},
                          {"dims", sigs[i].dims()},
                          {"point_count", sigs[i].points().size()},
                          {"t_first", sigs[i].t_first()},
                          {"t_last", sigs[i].t_last()}});
    }
    return {200, json{{"total", sigs.size()}, {"offset", offset}, {"limit", limit},
                      {"signals", std::move(page)}}
                     .dump()};
  });
}

inline Response post_index(Registry& reg, const std::string& dataset_id, const std::string& body) {
  return guarded([&]() -> Response {
    const auto ds = reg.dataset(dataset_id);
    const json b = body_json(body);
    const PenaltyConfig cfg =
        json_io::penalty_from_json(json_io::get_or<json>(b, "penalty_config", nullptr), PenaltyConfig{}, ds.get());
    auto ix = std::make_shared<const Index>(build_index(ds, cfg));
    const std::string id = reg.next_index_id();
    reg.add_index(id, ix);
    json skipped = json::array();
    for (const auto& u : ix->unindexable()) skipped.push_back({{"signal_id", u.signal_id}, {"reason", u.reason}});
    return {201, json{{"index_id", id}, {"dataset_id", ds->id()}, {"indexed", ix->size()},
                      {"unindexable", std::move(skipped)}}
                     .dump()};
  });
}

inline Response post_query(const Registry& reg, const std::string& index_id, const std::string& body) {
  return guarded([&]() -> Response {
    const auto ix = reg.index(index_id);
    return {200, pipeline::handle_query(*ix, body_json(body)).dump()};
  });
}

inline Response post_cluster(const Registry& reg, const std::string& index_id, const std::string& body) {
  return guarded([&]() -> Response {
    const auto ix = reg.index(index_id);
    return {200, pipeline::handle_cluster(*ix, body_json(body)).dump()};
  });
}

inline Response post_ps_resolve(const std::string& body) {
  return guarded([&]() -> Response { return {200, pipeline::handle_ps_resolve(body_json(body)).dump()}; });
}

// ---------------------------------------------------------------------------
// HTTP binding
// ---------------------------------------------------------------------------

inline void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body, "application/json");
}

inline void mount(httplib::Server& server, Registry& reg) {
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    reply(res, {200, json{{"status", "ok"}}.dump()});
  });

  server.Post("/datasets", [&reg](const httplib::Request& req, httplib::Response& res) {
    reply(res, guarded([&]() -> Response {
            if (req.is_multipart_form_data()) {
              if (!req.has_file("csv") || !req.has_file("mapping")) {
                throw json_io::bad("multipart upload needs 'csv' and 'mapping' parts");
              }
              return post_dataset(reg, req.get_file_value("csv").content,
                                  json_io::parse(req.get_file_value("mapping").content));
            }
            const json b = body_json(req.body);
            return post_dataset(reg, json_io::get<std::string>(b, "csv"), json_io::get<json>(b, "mapping"));
          }));
  });

  server.Get(R"(/datasets/([^/]+)/signals)", [&reg](const httplib::Request& req, httplib::Response& res) {
    reply(res, guarded([&]() -> Response {
            auto num = [&](const char* key, std::size_t fallback) -> std::size_t {
              if (!req.has_param(key)) return fallback;
              try {
                return std::stoul(req.get_param_value(key));
              } catch (const std::exception&) {
                throw json_io::bad(std::string(key) + " must be a non-negative integer");
              }
            };
            return get_signals(reg, req.matches[1], num("limit", 100), num("offset", 0));
          }));
  });

  server.Post(R"(/datasets/([^/]+)/index)", [&reg](const httplib::Request& req, httplib::Response& res) {
    reply(res, post_index(reg, req.matches[1], req.body));
  });

  server.Post(R"(/indexes/([^/]+)/query)", [&reg](const httplib::Request& req, httplib::Response& res) {
    reply(res, post_query(reg, req.matches[1], req.body));
  });

  server.Post(R"(/indexes/([^/]+)/cluster)", [&reg](const httplib::Request& req, httplib::Response& res) {
    reply(res, post_cluster(reg, req.matches[1], req.body));
  });

  server.Post("/ps/resolve", [](const httplib::Request& req, httplib::Response& res) {
    reply(res, post_ps_resolve(req.body));
  });
}

}  // namespace trendsketch::service
