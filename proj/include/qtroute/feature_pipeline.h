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

#ifndef QTROUTE_FEATURE_PIPELINE_H_
#define QTROUTE_FEATURE_PIPELINE_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qtroute/hetero_graph.h"
#include "qtroute/net_model.h"
#include "qtroute/qt_engine.h"

namespace qtroute {

// Raw fixed features with the demand-based rescaling applied:
//   path rows: every traffic attribute / that path's avg_pkts_lambda, with
//              total_pkts_gen forced to 0;
//   link rows: capacity / mean avg_pkts_lambda of the paths crossing the
//              link (links no path crosses use the mean over all paths);
//   node rows: a single zero column.
// Throws ValidationError if any path has avg_pkts_lambda == 0.
EntityFeatures TransformRaw(const NetworkSample& sample);

struct ColumnStats {
  double mean = 0.0;
  double std = 1.0;
  bool passthrough = false;  // zero variance, left unscaled

  friend bool operator==(const ColumnStats&, const ColumnStats&) = default;
};

// Per-column statistics, kept separately for each entity type.
class Standardizer {
 public:
  Standardizer() = default;

  const std::vector<ColumnStats>& Stats(EntityType t) const {
    return stats_[static_cast<std::size_t>(t)];
  }
  const std::vector<std::string>& Columns(EntityType t) const {
    return columns_[static_cast<std::size_t>(t)];
  }
  std::size_t num_samples() const { return num_samples_; }

  // Standardizes in place. Throws DimensionError on column-count mismatch.
  void Apply(EntityFeatures& features) const;

  std::string ToJson() const;
  static Standardizer FromJson(const std::string& text);
  void Save(const std::string& path) const;
  static Standardizer Load(const std::string& path);

  friend bool operator==(const Standardizer&, const Standardizer&) = default;

 private:
  friend class StandardizerAccumulator;
  std::array<std::vector<ColumnStats>, 3> stats_;
  std::array<std::vector<std::string>, 3> columns_;
  std::size_t num_samples_ = 0;
};

// Streaming fit. Population mean and standard deviation over every entity row
// seen, computed with Welford updates in the order rows are added.
class StandardizerAccumulator {
 public:
  void Add(const EntityFeatures& features);
  // Throws DomainError if fewer than two samples were added.
  Standardizer Finish() const;

 private:
  struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  void AddMatrix(EntityType t, const Matrix& m, const std::vector<std::string>& names);

  std::array<std::vector<Moments>, 3> moments_;
  std::array<std::vector<std::string>, 3> columns_;
  std::size_t num_samples_ = 0;
};

Standardizer FitStandardizer(std::span<const EntityFeatures> training);

struct GraphBuildOptions {
  ModelVariant variant = ModelVariant::kM1;
  QTConfig qt = QTConfig::ForVariant(ModelVariant::kM1);
  HiddenWidths hidden = HiddenWidths::ForVariant(ModelVariant::kM1);
};

// transform_raw -> standardize -> fixed point -> features -> graph.
GraphBundle MakeBundle(const NetworkSample& sample, const Standardizer& standardizer,
                       const GraphBuildOptions& options);

struct ConvertOptions {
  // JSON-Lines files, or directories whose *.jsonl files are read in name
  // order.
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output_dir;
  std::size_t workers = 1;
  GraphBuildOptions build;
  // Reuse statistics fitted on a training split; fit on the inputs otherwise.
  std::optional<std::filesystem::path> stats_path;
};

struct ConversionFailure {
  std::string source;  // input file
  std::size_t line = 0;
  std::string sample_id;  // empty if the record did not parse
  std::string message;
};

struct ConversionReport {
  std::size_t total = 0;
  std::size_t converted = 0;
  std::vector<ConversionFailure> failures;
  double wall_seconds = 0.0;

  std::string ToJson() const;
};

// Writes <output_dir>/{manifest.json, stats.json, report.json,
// samples/<id>.bundle}. Per-sample failures are recorded in the report and do
// not stop the run. Bundle bytes, manifest and stats do not depend on the
// worker count or on the order samples appear in the inputs.
ConversionReport ConvertDataset(const ConvertOptions& options);

}  // namespace qtroute

#endif  // QTROUTE_FEATURE_PIPELINE_H_
