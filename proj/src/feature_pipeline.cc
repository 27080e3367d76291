// Copyright 2026 The qtroute Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtroute/feature_pipeline.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "qtroute/errors.h"
#include "text_util.h"

namespace qtroute {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

const char* EntityKey(std::size_t t) {
  static constexpr const char* kKeys[] = {"path", "link", "node"};
  return kKeys[t];
}

Matrix& EntityMatrix(EntityFeatures& f, std::size_t t) {
  return t == 0 ? f.path : t == 1 ? f.link : f.node;
}

// One loadable record located in the inputs.
struct WorkItem {
  std::size_t file = 0;
  std::streamoff offset = 0;
  std::size_t line = 0;
  std::string sample_id;
  std::string stem;
};

std::vector<fs::path> ExpandInputs(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> files;
  for (const fs::path& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(in)) {
      files.push_back(in);
    } else {
      throw IoError("input not found: " + in.string());
    }
  }
  return files;
}

NetworkSample ReadAt(std::ifstream& in, const WorkItem& item) {
  in.clear();
  in.seekg(item.offset);
  std::string line;
  if (!std::getline(in, line)) throw IoError("short read re-reading a sample");
  return ParseSample(line, item.line);
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

EntityFeatures TransformRaw(const NetworkSample& sample) {
  const std::size_t n_paths = sample.paths.size();
  const std::size_t n_links = sample.links.size();

  EntityFeatures f;
  f.path_columns = {"avg_pkts_lambda", "eq_lambda", "avg_bw", "pkts_gen",
                    "total_pkts_gen"};
  f.link_columns = {"capacity"};
  f.node_columns = {"zero"};
  f.path = Matrix(n_paths, f.path_columns.size());
  f.link = Matrix(n_links, 1);
  f.node = Matrix(static_cast<std::size_t>(sample.n_nodes), 1);

  std::vector<double> lambda_sum(n_links, 0.0);
  std::vector<std::size_t> lambda_count(n_links, 0);
  double all_sum = 0.0;
  for (std::size_t k = 0; k < n_paths; ++k) {
    const TrafficDescriptor& t = sample.paths[k].traffic;
    if (!(t.avg_pkts_lambda > 0)) {
      throw ValidationError("traffic.avg_pkts_lambda_positive",
                            "path " + std::to_string(k) + " of sample '" +
                                sample.sample_id +
                                "' has avg_pkts_lambda == 0 and cannot be rescaled");
    }
    const double d = t.avg_pkts_lambda;
    f.path(k, 0) = t.avg_pkts_lambda / d;
    f.path(k, 1) = t.eq_lambda / d;
    f.path(k, 2) = t.avg_bw / d;
    f.path(k, 3) = t.pkts_gen / d;
    f.path(k, 4) = 0.0;
    all_sum += d;
    for (int l : sample.paths[k].link_seq) {
      lambda_sum[l] += d;
      ++lambda_count[l];
    }
  }
  const double fallback = n_paths ? all_sum / static_cast<double>(n_paths) : 1.0;
  for (std::size_t l = 0; l < n_links; ++l) {
    const double divisor = lambda_count[l]
                               ? lambda_sum[l] / static_cast<double>(lambda_count[l])
                               : fallback;
    f.link(l, 0) = sample.links[l].capacity / divisor;
  }
  return f;
}

void Standardizer::Apply(EntityFeatures& features) const {
  for (std::size_t t = 0; t < 3; ++t) {
    Matrix& m = EntityMatrix(features, t);
    const auto& stats = stats_[t];
    if (m.rows > 0 && m.cols != stats.size()) {
      throw DimensionError(std::string(EntityKey(t)) + " rows have " +
                           std::to_string(m.cols) + " columns, statistics cover " +
                           std::to_string(stats.size()));
    }
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t c = 0; c < m.cols; ++c) {
        if (stats[c].passthrough) continue;
        m(r, c) = (m(r, c) - stats[c].mean) / stats[c].std;
      }
    }
  }
}

std::string Standardizer::ToJson() const {
  Json j{{"version", 1}, {"num_samples", num_samples_}};
  for (std::size_t t = 0; t < 3; ++t) {
    Json e{{"columns", columns_[t]}};
    Json mean = Json::array(), sd = Json::array(), pass = Json::array();
    for (const ColumnStats& s : stats_[t]) {
      mean.push_back(s.mean);
      sd.push_back(s.std);
      pass.push_back(s.passthrough);
    }
    e["mean"] = std::move(mean);
    e["std"] = std::move(sd);
    e["passthrough"] = std::move(pass);
    j[EntityKey(t)] = std::move(e);
  }
  return j.dump(2) + "\n";
}

Standardizer Standardizer::FromJson(const std::string& text) {
  Standardizer s;
  try {
    const Json j = Json::parse(text);
    if (j.at("version").get<int>() != 1) {
      throw ParseError(0, "version", "unsupported statistics version");
    }
    s.num_samples_ = j.at("num_samples").get<std::size_t>();
    for (std::size_t t = 0; t < 3; ++t) {
      const Json& e = j.at(EntityKey(t));
      s.columns_[t] = e.at("columns").get<std::vector<std::string>>();
      const auto mean = e.at("mean").get<std::vector<double>>();
      const auto sd = e.at("std").get<std::vector<double>>();
      const auto pass = e.at("passthrough").get<std::vector<bool>>();
      if (mean.size() != s.columns_[t].size() || sd.size() != mean.size() ||
          pass.size() != mean.size()) {
        throw ParseError(0, EntityKey(t), "column arrays differ in length");
      }
      for (std::size_t c = 0; c < mean.size(); ++c) {
        if (!pass[c] && !(sd[c] > 0)) {
          throw ParseError(0, EntityKey(t), "non-positive std on a scaled column");
        }
        s.stats_[t].push_back(ColumnStats{mean[c], sd[c], pass[c]});
      }
    }
  } catch (const Json::exception& e) {
    throw ParseError(0, "", std::string("bad statistics file: ") + e.what());
  }
  return s;
}

void Standardizer::Save(const std::string& path) const { WriteText(path, ToJson()); }

Standardizer Standardizer::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return FromJson(text);
}

void StandardizerAccumulator::AddMatrix(EntityType type, const Matrix& m,
                                        const std::vector<std::string>& names) {
  const auto t = static_cast<std::size_t>(type);
  if (columns_[t].empty() && moments_[t].empty()) {
    columns_[t] = names;
    moments_[t].resize(m.cols);
  }
  if (m.cols != moments_[t].size()) {
    throw DimensionError(std::string(EntityKey(t)) + " column count changed between samples");
  }
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      Moments& mo = moments_[t][c];
      const double x = m(r, c);
      ++mo.n;
      const double delta = x - mo.mean;
      mo.mean += delta / static_cast<double>(mo.n);
      mo.m2 += delta * (x - mo.mean);
    }
  }
}

void StandardizerAccumulator::Add(const EntityFeatures& features) {
  AddMatrix(EntityType::kPath, features.path, features.path_columns);
  AddMatrix(EntityType::kLink, features.link, features.link_columns);
  AddMatrix(EntityType::kNode, features.node, features.node_columns);
  ++num_samples_;
}

Standardizer StandardizerAccumulator::Finish() const {
  if (num_samples_ < 2) {
    throw DomainError("standardizer needs at least two training samples, got " +
                      std::to_string(num_samples_));
  }
  Standardizer s;
  s.num_samples_ = num_samples_;
  for (std::size_t t = 0; t < 3; ++t) {
    s.columns_[t] = columns_[t];
    for (const Moments& mo : moments_[t]) {
      ColumnStats cs;
      cs.mean = mo.mean;
      const double sd = mo.n ? std::sqrt(mo.m2 / static_cast<double>(mo.n)) : 0.0;
      if (mo.n == 0 || sd <= 1e-12 * std::max(1.0, std::abs(mo.mean))) {
        cs.std = 1.0;
        cs.passthrough = true;
      } else {
        cs.std = sd;
      }
      s.stats_[t].push_back(cs);
    }
  }
  return s;
}

Standardizer FitStandardizer(std::span<const EntityFeatures> training) {
  StandardizerAccumulator acc;
  for (const EntityFeatures& f : training) acc.Add(f);
  return acc.Finish();
}

GraphBundle MakeBundle(const NetworkSample& sample, const Standardizer& standardizer,
                       const GraphBuildOptions& options) {
  GraphBundle b;
  b.sample_id = sample.sample_id;
  b.variant = options.variant;
  b.features = TransformRaw(sample);
  standardizer.Apply(b.features);
  b.qt = ExtractFeatures(sample, options.qt, options.variant);
  b.graph = BuildGraph(sample, b.features, options.hidden);
  for (const Link& l : sample.links) {
    b.link_capacity.push_back(l.capacity);
    b.link_queue_size_bits.push_back(l.queue_size_bits);
  }
  for (const PathFlow& p : sample.paths) {
    b.labels.push_back(p.label_delay.value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  return b;
}

std::string ConversionReport::ToJson() const {
  Json fails = Json::array();
  for (const ConversionFailure& f : failures) {
    fails.push_back(Json{{"source", f.source},
                         {"line", f.line},
                         {"sample_id", f.sample_id},
                         {"message", f.message}});
  }
  return Json{{"total", total},
              {"converted", converted},
              {"failed", failures.size()},
              {"wall_seconds", wall_seconds},
              {"failures", std::move(fails)}}
             .dump(2) +
         "\n";
}

ConversionReport ConvertDataset(const ConvertOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<fs::path> files = ExpandInputs(options.inputs);
  const fs::path samples_dir = options.output_dir / "samples";
  fs::create_directories(samples_dir);

  ConversionReport report;
  std::vector<WorkItem> items;
  std::map<std::string, std::size_t> stems;

  // Scan: locate and validate every record.
  for (std::size_t fi = 0; fi < files.size(); ++fi) {
    std::ifstream in(files[fi], std::ios::binary);
    if (!in) throw IoError("cannot open " + files[fi].string());
    std::string line;
    std::size_t line_no = 0;
    while (true) {
      const std::streamoff offset = in.tellg();
      if (!std::getline(in, line)) break;
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ++report.total;
      std::string id;
      try {
        const NetworkSample s = ParseSample(line, line_no);
        id = s.sample_id;
        TransformRaw(s);
        WorkItem item{fi, offset, line_no, s.sample_id, detail::FileStem(s.sample_id)};
        if (!stems.emplace(item.stem, items.size()).second) {
          throw ValidationError("sample.id_unique",
                                "duplicate sample id '" + s.sample_id + "'");
        }
        items.push_back(std::move(item));
      } catch (const Error& e) {
        report.failures.push_back({files[fi].string(), line_no, id, e.what()});
      }
    }
  }

  // Canonical order, so nothing downstream depends on input arrangement.
  std::sort(items.begin(), items.end(),
            [](const WorkItem& a, const WorkItem& b) { return a.stem < b.stem; });

  Standardizer standardizer;
  if (options.stats_path) {
    standardizer = Standardizer::Load(options.stats_path->string());
  } else {
    StandardizerAccumulator acc;
    std::vector<std::ifstream> streams;
    for (const fs::path& f : files) streams.emplace_back(f, std::ios::binary);
    for (const WorkItem& item : items) acc.Add(TransformRaw(ReadAt(streams[item.file], item)));
    standardizer = acc.Finish();
  }
  standardizer.Save((options.output_dir / "stats.json").string());

  std::vector<char> ok(items.size(), 0);
  std::mutex fail_mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::vector<std::ifstream> streams;
    for (const fs::path& f : files) streams.emplace_back(f, std::ios::binary);
    for (std::size_t i = next++; i < items.size(); i = next++) {
      const WorkItem& item = items[i];
      try {
        const NetworkSample s = ReadAt(streams[item.file], item);
        WriteBundle((samples_dir / (item.stem + ".bundle")).string(),
                    MakeBundle(s, standardizer, options.build));
        ok[i] = 1;
      } catch (const Error& e) {
        std::lock_guard lock(fail_mu);
        report.failures.push_back(
            {files[item.file].string(), item.line, item.sample_id, e.what()});
      }
    }
  };
  {
    const std::size_t n = std::max<std::size_t>(1, std::min(options.workers, items.size()));
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(worker);
  }

  Json manifest_samples = Json::array();
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!ok[i]) continue;
    ++report.converted;
    manifest_samples.push_back(
        Json{{"sample_id", items[i].sample_id}, {"file", "samples/" + items[i].stem + ".bundle"}});
  }
  const QTConfig& qt = options.build.qt;
  const HiddenWidths& hw = options.build.hidden;
  const Json manifest{
      {"format", "qtroute-converted"},
      {"version", 1},
      {"variant", ToString(options.build.variant)},
      {"qt", Json{{"num_iterations", qt.num_iterations},
                  {"pb_init", qt.pb_init},
                  {"x_mode", ToString(qt.x_mode)},
                  {"rho_singularity_eps", qt.rho_singularity_eps}}},
      {"hidden_widths", Json{{"path", hw.path}, {"link", hw.link}, {"node", hw.node}}},
      {"stats", "stats.json"},
      {"samples", std::move(manifest_samples)}};
  WriteText(options.output_dir / "manifest.json", manifest.dump(2) + "\n");

  std::sort(report.failures.begin(), report.failures.end(),
            [](const ConversionFailure& a, const ConversionFailure& b) {
              return std::tie(a.source, a.line) < std::tie(b.source, b.line);
            });
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  WriteText(options.output_dir / "report.json", report.ToJson());
  return report;
}

}  // namespace qtroute
