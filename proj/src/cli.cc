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

#include "qtroute/cli.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "qtroute/errors.h"
#include "qtroute/feature_pipeline.h"
#include "qtroute/metrics.h"
#include "qtroute/net_model.h"
#include "qtroute/qt_engine.h"
#include "qtroute/sim_oracle.h"
#include "text_util.h"

namespace qtroute::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

// Shared knobs. Config-file values are loaded first; flags parsed afterwards
// overwrite them.
struct Settings {
  std::optional<int> iterations;
  std::optional<double> pb_init;
  std::string x_mode = "pi0";
  std::string variant = "m1";
  std::size_t workers = 1;
  std::uint64_t seed = 1;
  double sim_time = 1e5;
  double warmup = 0.1;
  std::string packet_size = "exponential";

  GraphBuildOptions Build() const {
    GraphBuildOptions b;
    b.variant = ParseVariant(variant);
    b.qt = QTConfig::ForVariant(b.variant);
    if (iterations) b.qt.num_iterations = *iterations;
    if (pb_init) b.qt.pb_init = *pb_init;
    b.qt.x_mode = ParseXMode(x_mode);
    b.qt.Validate();
    b.hidden = HiddenWidths::ForVariant(b.variant);
    return b;
  }

  SimConfig Sim() const {
    SimConfig c;
    c.seed = seed;
    c.sim_time = sim_time;
    c.warmup_frac = warmup;
    c.packet_size_dist = ParsePacketSizeDist(packet_size);
    c.Validate();
    return c;
  }
};

void ApplyConfigFile(const std::string& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(0, "", path + ": " + e.what());
  }
  static const char* kKeys[] = {"iterations", "pb_init", "x_mode",   "variant", "workers",
                                "seed",       "sim_time", "warmup", "packet_size"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw ParseError(0, key, path + ": unknown config key");
    }
  }
  try {
    if (j.contains("iterations")) s.iterations = j["iterations"].get<int>();
    if (j.contains("pb_init")) s.pb_init = j["pb_init"].get<double>();
    if (j.contains("x_mode")) s.x_mode = j["x_mode"].get<std::string>();
    if (j.contains("variant")) s.variant = j["variant"].get<std::string>();
    if (j.contains("workers")) s.workers = j["workers"].get<std::size_t>();
    if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("sim_time")) s.sim_time = j["sim_time"].get<double>();
    if (j.contains("warmup")) s.warmup = j["warmup"].get<double>();
    if (j.contains("packet_size")) s.packet_size = j["packet_size"].get<std::string>();
  } catch (const Json::exception& e) {
    throw ParseError(0, "", path + ": " + e.what());
  }
}

spdlog::level::level_enum LevelFromEnv() {
  const char* v = std::getenv("QTRN_LOG");
  if (!v) return spdlog::level::warn;
  const auto level = spdlog::level::from_str(v);
  // from_str maps unknown names to "off"; keep warnings in that case.
  if (level == spdlog::level::off && std::string(v) != "off") return spdlog::level::warn;
  return level;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void ParallelFor(std::size_t n, std::size_t workers, Fn fn) {
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  const std::size_t count = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < count; ++w) pool.emplace_back(body);
  body();
}

std::vector<NetworkSample> ReadAll(const std::vector<std::string>& files) {
  std::vector<NetworkSample> out;
  for (const std::string& f : files) {
    auto part = ReadSamplesFile(f);
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

void AddQtFlags(CLI::App* cmd, Settings& s) {
  cmd->add_option("--iterations", s.iterations, "fixed-point rounds (default 5 for m1, 3 for m2)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--pb-init", s.pb_init, "initial blocking probability")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--x-mode", s.x_mode, "delay numerator term")
      ->check(CLI::IsMember({"one", "pi0"}));
  cmd->add_option("--variant", s.variant, "feature variant")->check(CLI::IsMember({"m1", "m2"}));
}

void AddSimFlags(CLI::App* cmd, Settings& s) {
  cmd->add_option("--seed", s.seed, "PRNG seed");
  cmd->add_option("--sim-time", s.sim_time, "simulated time units")->check(CLI::PositiveNumber);
  cmd->add_option("--warmup", s.warmup, "fraction of sim time discarded")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--packet-size", s.packet_size, "packet size distribution")
      ->check(CLI::IsMember({"exponential", "deterministic"}));
}

int RunConvert(const std::vector<std::string>& inputs, const std::string& output,
               const std::string& stats, const Settings& s, std::ostream& out,
               spdlog::logger& log) {
  ConvertOptions opt;
  for (const auto& i : inputs) opt.inputs.emplace_back(i);
  opt.output_dir = output;
  opt.workers = s.workers;
  opt.build = s.Build();
  if (!stats.empty()) opt.stats_path = stats;
  const ConversionReport report = ConvertDataset(opt);
  for (const ConversionFailure& f : report.failures) {
    log.warn("{}:{}: {}", f.source, f.line, f.message);
  }
  out << "converted " << report.converted << " of " << report.total << " samples, "
      << report.failures.size() << " failed\n";
  return 0;
}

int RunBaseline(const std::vector<std::string>& inputs, const std::string& output,
                const std::string& export_dir, const Settings& s, std::ostream& out,
                spdlog::logger& log) {
  const GraphBuildOptions build = s.Build();
  const std::vector<NetworkSample> samples = ReadAll(inputs);
  std::vector<FixedPointResult> states(samples.size());
  ParallelFor(samples.size(), s.workers,
              [&](std::size_t i) { states[i] = RunFixedPoint(samples[i], build.qt); });

  PredictionSet preds;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<double> delays;
    for (const QTLinkState& l : states[i].links) delays.push_back(l.link_delay);
    const std::vector<double> b_path = GetPathDelay(delays, samples[i]);
    for (std::size_t k = 0; k < b_path.size(); ++k) {
      preds.push_back({samples[i].sample_id, static_cast<int>(k), b_path[k],
                       PredictionSource::kBaseline});
    }
    log.debug("{}: final residual {}", samples[i].sample_id, states[i].residuals.back());
  }
  WritePredictionsCsv(output, preds);

  if (!export_dir.empty()) {
    fs::create_directories(export_dir);
    nlohmann::ordered_json manifest{{"variant", s.variant},
                                    {"num_iterations", build.qt.num_iterations},
                                    {"pb_init", build.qt.pb_init},
                                    {"x_mode", ToString(build.qt.x_mode)},
                                    {"samples", nlohmann::ordered_json::array()}};
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::string stem = detail::FileStem(samples[i].sample_id);
      WriteQTFeatureCsv(export_dir, stem, samples[i], states[i]);
      manifest["samples"].push_back({{"sample_id", samples[i].sample_id},
                                     {"links", stem + ".links.csv"},
                                     {"paths", stem + ".paths.csv"}});
    }
    std::ofstream mf(fs::path(export_dir) / "manifest.json");
    mf << manifest.dump(2) << '\n';
    if (!mf) throw IoError("failed writing QT manifest");
  }
  out << "wrote " << preds.size() << " baseline predictions for " << samples.size()
      << " samples\n";
  return 0;
}

int RunSimulate(const std::vector<std::string>& inputs, const std::string& output,
                const std::string& label, const Settings& s, std::ostream& out,
                spdlog::logger& log) {
  const SimConfig base = s.Sim();
  const std::vector<NetworkSample> samples = ReadAll(inputs);
  std::vector<SimResult> results(samples.size());
  ParallelFor(samples.size(), s.workers, [&](std::size_t i) {
    SimConfig cfg = base;
    // Sample i always gets the same stream, whatever the worker count.
    cfg.seed = ReplicationSeed(base.seed, i);
    results[i] = Simulate(samples[i], cfg);
  });

  if (!output.empty()) {
    std::ofstream res(output);
    if (!res) throw IoError("cannot open " + output);
    for (const SimResult& r : results) res << r.ToJson() << '\n';
    if (!res) throw IoError("failed writing " + output);
  } else {
    for (const SimResult& r : results) out << r.ToJson() << '\n';
  }
  if (!label.empty()) {
    std::vector<NetworkSample> labeled;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      labeled.push_back(LabelSample(samples[i], results[i]));
      for (std::size_t k = 0; k < results[i].paths.size(); ++k) {
        if (!results[i].paths[k].mean_delay) {
          log.warn("{}: path {} delivered no packets and stays unlabeled",
                   samples[i].sample_id, k);
        }
      }
    }
    WriteSamplesFile(label, labeled);
  }
  return 0;
}

int RunEvaluate(const std::string& predictions, const std::vector<std::string>& labels,
                const std::string& subsets, const std::string& output, std::ostream& out,
                std::ostream& err) {
  const PredictionSet preds = ReadPredictionsCsv(predictions);
  std::vector<NetworkSample> labeled;
  std::map<std::string, std::string> subset_of;
  for (const std::string& f : labels) {
    const std::string tag = fs::path(f).stem().string();
    for (NetworkSample& s : ReadSamplesFile(f)) {
      subset_of[s.sample_id] = tag;
      labeled.push_back(std::move(s));
    }
  }
  if (!subsets.empty()) {
    std::ifstream in(subsets);
    if (!in) throw IoError("cannot open " + subsets);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || (line_no == 1 && line == "sample_id,subset")) continue;
      const auto cells = detail::SplitCsv(line);
      if (cells.size() != 2) throw ParseError(line_no, "", subsets + ": expected sample_id,subset");
      subset_of[std::string(cells[0])] = std::string(cells[1]);
    }
  }
  const MapeReport report = Report(preds, labeled, subset_of);
  out << report.ToText();
  if (!output.empty()) {
    std::ofstream rf(output);
    rf << report.ToJson();
    if (!rf) throw IoError("failed writing " + output);
  }
  if (!report.unmatched.empty()) {
    err << "error: " << report.unmatched.size()
        << " predictions have no labeled path to compare against\n";
    return 1;
  }
  return 0;
}

int RunEnsemble(const std::vector<std::string>& inputs, const std::string& output,
                std::ostream& out) {
  std::vector<PredictionSet> members;
  for (const std::string& f : inputs) members.push_back(ReadPredictionsCsv(f));
  const PredictionSet ens = Ensemble(members);
  WritePredictionsCsv(output, ens);
  out << "averaged " << members.size() << " prediction sets over " << ens.size() << " paths\n";
  return 0;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  spdlog::logger log("qtroute", sink);
  log.set_pattern("[%l] %v");
  log.set_level(LevelFromEnv());

  Settings s;
  CLI::App app{"qtroute: queueing-theory features, baseline delays and simulation", "qtroute"};
  app.require_subcommand(1);
  // Global options may also follow the subcommand.
  app.fallthrough();
  std::string config_path;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON file with default flag values")
      ->check(CLI::ExistingFile);
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_option("--workers", s.workers, "worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> inputs, labels;
  std::string output, stats, export_dir, label_out, predictions, subsets;

  auto* convert = app.add_subcommand("convert", "convert a dataset into graph bundles");
  convert->add_option("--input", inputs, "JSON-Lines files or directories")->required();
  convert->add_option("--output", output, "output directory")->required();
  convert->add_option("--stats", stats, "reuse standardizer statistics")->check(CLI::ExistingFile);
  AddQtFlags(convert, s);

  auto* baseline = app.add_subcommand("baseline", "QT baseline per-path delays to CSV");
  baseline->add_option("--input", inputs, "JSON-Lines sample files")->required();
  baseline->add_option("--output", output, "predictions CSV")->required();
  baseline->add_option("--export-dir", export_dir, "also write per-sample QT feature CSVs");
  AddQtFlags(baseline, s);

  auto* simulate = app.add_subcommand("simulate", "packet-level simulation");
  simulate->add_option("--input", inputs, "JSON-Lines sample files")->required();
  simulate->add_option("--output", output, "SimResult JSON-Lines (stdout if omitted)");
  simulate->add_option("--label", label_out, "write samples labeled with simulated delays");
  AddSimFlags(simulate, s);

  auto* evaluate = app.add_subcommand("evaluate", "MAPE report against labeled samples");
  evaluate->add_option("--predictions", predictions, "predictions CSV")->required();
  evaluate->add_option("--labels", labels, "labeled JSON-Lines files (subset = file stem)")
      ->required();
  evaluate->add_option("--subsets", subsets, "CSV sample_id,subset overriding file stems");
  evaluate->add_option("--output", output, "report JSON");

  auto* ensemble = app.add_subcommand("ensemble", "average prediction CSVs");
  ensemble->add_option("--input", inputs, "prediction CSVs")->required();
  ensemble->add_option("--output", output, "averaged predictions CSV")->required();

  auto* export_graphs =
      app.add_subcommand("export-graphs", "write graph bundles for the learned stage");
  export_graphs->add_option("--input", inputs, "JSON-Lines files or directories")->required();
  export_graphs->add_option("--output", output, "output directory")->required();
  export_graphs->add_option("--stats", stats, "reuse standardizer statistics")
      ->check(CLI::ExistingFile);
  AddQtFlags(export_graphs, s);

  // The config file must be read before flag values land in `s`.
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") config_path = args[i + 1];
  }
  try {
    if (!config_path.empty() && std::filesystem::exists(config_path)) {
      ApplyConfigFile(config_path, s);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }
  if (verbose) log.set_level(spdlog::level::debug);

  try {
    if (*convert) return RunConvert(inputs, output, stats, s, out, log);
    if (*export_graphs) return RunConvert(inputs, output, stats, s, out, log);
    if (*baseline) return RunBaseline(inputs, output, export_dir, s, out, log);
    if (*simulate) return RunSimulate(inputs, output, label_out, s, out, log);
    if (*evaluate) return RunEvaluate(predictions, labels, subsets, output, out, err);
    if (*ensemble) return RunEnsemble(inputs, output, out);
  } catch (const std::exception& e) {
    log.error("{}", e.what());
    err.flush();
    return 1;
  }
  return 2;
}

}  // namespace qtroute::cli
