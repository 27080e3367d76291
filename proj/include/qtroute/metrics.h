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

#ifndef QTROUTE_METRICS_H_
#define QTROUTE_METRICS_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "qtroute/net_model.h"

namespace qtroute {

enum class PredictionSource { kBaseline, kM1, kM2, kEnsemble };

std::string ToString(PredictionSource s);
PredictionSource ParsePredictionSource(const std::string& s);

struct PredictionRecord {
  std::string sample_id;
  int path_id = 0;
  double predicted_delay = 0.0;
  PredictionSource source = PredictionSource::kBaseline;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

using PredictionSet = std::vector<PredictionRecord>;

// 100 * mean(|pred - truth| / truth). Throws DimensionError on length
// mismatch or empty input, DomainError when a truth value is not positive.
double Mape(std::span<const double> pred, std::span<const double> truth);

// Per-path arithmetic mean of several prediction sets over the same
// (sample_id, path_id) keys. Output is sorted by key and tagged as ensemble;
// the result does not depend on member order. Throws DimensionError when the
// sets cover different keys.
PredictionSet Ensemble(const std::vector<PredictionSet>& members);

// CSV with header sample_id,path_id,predicted_delay,source.
void WritePredictionsCsv(const std::string& path, const PredictionSet& preds);
PredictionSet ReadPredictionsCsv(const std::string& path);

struct ReportRow {
  std::string source;
  std::string subset;  // "overall" for the all-subsets row
  std::size_t n_paths = 0;
  double mape = 0.0;
};

struct MapeReport {
  std::vector<ReportRow> rows;
  // Predictions without a labeled path, as "sample_id:path_id".
  std::vector<std::string> unmatched;

  std::string ToText() const;
  std::string ToJson() const;
};

// Rows are ordered by source, then subset name, with each source's overall
// row last. Samples missing from `subset_of` fall into subset "default".
MapeReport Report(const PredictionSet& preds, const std::vector<NetworkSample>& labeled,
                  const std::map<std::string, std::string>& subset_of);

}  // namespace qtroute

#endif  // QTROUTE_METRICS_H_
