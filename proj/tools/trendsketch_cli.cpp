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

// trendsketch: batch front end over the same pipeline the HTTP service uses.
//
// Exit codes: 0 success, 2 usage error, 3 data error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "trendsketch/service.hpp"
#include "trendsketch/trendsketch.hpp"

namespace {

using json = nlohmann::json;
namespace ts = trendsketch;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ts::Error(ts::ErrorKind::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw ts::Error(ts::ErrorKind::kIo, "cannot write '" + path + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json penalties_arg(const std::string& text) {
  return text.empty() ? json(nullptr) : ts::json_io::parse(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sketch-based trend search over time-series corpora"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load a CSV corpus into dataset.json");
  std::string csv_path, time_col, dims_arg, measures_arg, out_path, time_format = "auto", id_field, dataset_name;
  ingest->add_option("--csv", csv_path, "Input CSV file")->required();
  ingest->add_option("--time", time_col, "Time column")->required();
  ingest->add_option("--dims", dims_arg, "Comma-separated categorical columns")->required();
  ingest->add_option("--measures", measures_arg, "Comma-separated measure columns")->required();
  ingest->add_option("--time-format", time_format, "auto | iso8601 | year | epoch")
      ->check(CLI::IsMember({"auto", "iso8601", "year", "epoch"}));
  ingest->add_option("--id-field", id_field, "Column holding explicit signal ids");
  ingest->add_option("--name", dataset_name, "Dataset id (default: CSV file stem)");
  ingest->add_option("--out", out_path, "Output dataset.json")->required();

  // index
  auto* index_cmd = app.add_subcommand("index", "Preprocess a dataset into index.json");
  std::string dataset_path, mode = "local", index_out;
  double epsilon = ts::PenaltyConfig{}.epsilon;
  index_cmd->add_option("--dataset", dataset_path, "dataset.json")->required();
  index_cmd->add_option("--epsilon", epsilon, "Douglas-Peucker tolerance (normalized units)");
  index_cmd->add_option("--mode", mode, "local | global")->check(CLI::IsMember({"local", "global"}));
  index_cmd->add_option("--out", index_out, "Output index.json")->required();

  // query
  auto* query_cmd = app.add_subcommand("query", "Rank indexed signals against a sketch");
  std::string index_path, sketch_path, constraint, penalties;
  std::size_t k = ts::kDefaultTopK;
  query_cmd->add_option("--index", index_path, "index.json")->required();
  query_cmd->add_option("--sketch", sketch_path, "polyline.json: {\"points\": [[x,y],...]}")->required();
  query_cmd->add_option("--k", k, "Number of matches")->check(CLI::PositiveNumber);
  query_cmd->add_option("--constraint", constraint, "Constraint expression");
  query_cmd->add_option("--penalties", penalties, "JSON object of penalty weights");

  // cluster
  auto* cluster_cmd = app.add_subcommand("cluster", "Cluster indexed signals by shape");
  std::string cluster_index;
  std::size_t cluster_k = 0;
  double threshold = -1.0;
  bool with_matrix = false;
  std::string cluster_penalties;
  cluster_cmd->add_option("--index", cluster_index, "index.json")->required();
  auto* k_opt = cluster_cmd->add_option("--k", cluster_k, "Target cluster count")->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--threshold", threshold, "Linkage distance cut")->excludes(k_opt);
  cluster_cmd->add_option("--penalties", cluster_penalties, "JSON object of penalty weights");
  cluster_cmd->add_flag("--matrix", with_matrix, "Include the distance matrix");

  // ps-resolve
  auto* ps_cmd = app.add_subcommand("ps-resolve", "Resolve a deictic reference in a scene");
  std::string scene_path;
  ps_cmd->add_option("--scene", scene_path, "scene.json")->required();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP JSON API");
  std::string host = "127.0.0.1", data_dir;
  int port = 8080;
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port");
  serve_cmd->add_option("--data-dir", data_dir, "Persist JSON snapshots here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*ingest) {
      ts::CsvMapping mapping{time_col, split_list(dims_arg), split_list(measures_arg), ts::TimeFormat::kAuto,
                             std::nullopt};
      mapping.time_format = ts::json_io::mapping_from_json(json{{"time_field", time_col},
                                                                {"categorical_fields", mapping.categorical_fields},
                                                                {"measure_fields", mapping.measure_fields},
                                                                {"time_format", time_format}})
                                .time_format;
      if (!id_field.empty()) mapping.id_field = id_field;
      const std::string name =
          dataset_name.empty() ? std::filesystem::path(csv_path).stem().string() : dataset_name;
      auto result = ts::load_csv(read_file(csv_path), mapping, name);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      write_file(out_path, ts::json_io::to_json(result.dataset).dump());
      std::cout << ts::json_io::to_json(ts::dataset_summary(result.dataset)).dump() << "\n";
    } else if (*index_cmd) {
      auto ds = std::make_shared<const ts::Dataset>(
          ts::json_io::dataset_from_json(ts::json_io::parse(read_file(dataset_path))));
      const ts::PenaltyConfig cfg =
          ts::json_io::penalty_from_json(json{{"epsilon", epsilon}, {"mode", mode}}, ts::PenaltyConfig{}, ds.get());
      const ts::Index ix = ts::build_index(ds, cfg);
      for (const auto& u : ix.unindexable()) {
        std::cerr << "warning: signal '" << u.signal_id << "' not indexed: " << u.reason << "\n";
      }
      write_file(index_out, ts::json_io::to_json(ix).dump());
      std::cout << json{{"indexed", ix.size()}, {"unindexable", ix.unindexable().size()}}.dump() << "\n";
    } else if (*query_cmd) {
      const ts::Index ix = ts::json_io::index_from_json(ts::json_io::parse(read_file(index_path)));
      const json polyline = ts::json_io::parse(read_file(sketch_path));
      json body{{"sketch_points", ts::json_io::get<json>(polyline, "points")},
                {"penalty_config", penalties_arg(penalties)},
                {"k", k}};
      if (polyline.contains("viewport")) body["viewport"] = polyline.at("viewport");
      if (!constraint.empty()) body["constraint"] = constraint;
      const json response = ts::pipeline::handle_query(ix, body);
      for (const auto& m : response.at("matches")) std::cout << m.dump() << "\n";
      if (response.at("dropped_by_constraint").get<std::size_t>() > 0) {
        std::cerr << "dropped_by_constraint: " << response.at("dropped_by_constraint") << "\n";
      }
    } else if (*cluster_cmd) {
      const ts::Index ix = ts::json_io::index_from_json(ts::json_io::parse(read_file(cluster_index)));
      json body{{"penalty_config", penalties_arg(cluster_penalties)}, {"include_matrix", with_matrix}};
      if (cluster_k > 0) body["cut"] = {{"k", cluster_k}};
      else if (threshold >= 0.0) body["cut"] = {{"threshold", threshold}};
      std::cout << ts::pipeline::handle_cluster(ix, body).dump() << "\n";
    } else if (*ps_cmd) {
      std::cout << ts::pipeline::handle_ps_resolve(ts::json_io::parse(read_file(scene_path))).dump() << "\n";
    } else if (*serve_cmd) {
      ts::service::Registry registry(data_dir.empty() ? std::nullopt
                                                      : std::optional<std::filesystem::path>(data_dir));
      httplib::Server server;
      ts::service::mount(server, registry);
      std::cerr << "listening on " << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return kExitData;
      }
    }
  } catch (const ts::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
