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

#include "qtroute/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "qtroute/errors.h"
#include "text_util.h"

namespace qtroute {
namespace {

using Key = std::pair<std::string, int>;

Key KeyOf(const PredictionRecord& r) { return {r.sample_id, r.path_id}; }

}  // namespace

std::string ToString(PredictionSource s) {
  switch (s) {
    case PredictionSource::kBaseline: return "baseline";
    case PredictionSource::kM1: return "m1";
    case PredictionSource::kM2: return "m2";
    case PredictionSource::kEnsemble: return "ensemble";
  }
  return "unknown";
}

PredictionSource ParsePredictionSource(const std::string& s) {
  if (s == "baseline") return PredictionSource::kBaseline;
  if (s == "m1") return PredictionSource::kM1;
  if (s == "m2") return PredictionSource::kM2;
  if (s == "ensemble") return PredictionSource::kEnsemble;
  throw ParseError(0, "source", "unknown prediction source '" + s + "'");
}

double Mape(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw DimensionError("prediction and truth lengths differ");
  }
  if (pred.empty()) throw DimensionError("MAPE of an empty set");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!(truth[i] > 0)) throw DomainError("truth values must be positive");
    sum += std::abs(pred[i] - truth[i]) / truth[i];
  }
  return 100.0 * sum / static_cast<double>(pred.size());
}

PredictionSet Ensemble(const std::vector<PredictionSet>& members) {
  if (members.empty()) throw DimensionError("ensemble of zero prediction sets");
  std::map<Key, std::vector<double>> by_key;
  for (std::size_t m = 0; m < members.size(); ++m) {
    std::map<Key, double> seen;
    for (const PredictionRecord& r : members[m]) {
      if (!seen.emplace(KeyOf(r), r.predicted_delay).second) {
        throw DimensionError("duplicate prediction for " + r.sample_id + ":" +
                             std::to_string(r.path_id));
      }
    }
    if (m > 0 && seen.size() != by_key.size()) {
      throw DimensionError("ensemble members cover different paths");
    }
    for (const auto& [key, v] : seen) {
      auto it = by_key.find(key);
      if (m > 0 && it == by_key.end()) {
        throw DimensionError("ensemble members are misaligned at " + key.first + ":" +
                             std::to_string(key.second));
      }
      by_key[key].push_back(v);
    }
  }
  PredictionSet out;
  out.reserve(by_key.size());
  for (auto& [key, values] : by_key) {
    // Sorted summation makes the mean independent of member order.
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    out.push_back({key.first, key.second, sum / static_cast<double>(values.size()),
                   PredictionSource::kEnsemble});
  }
  return out;
}

void WritePredictionsCsv(const std::string& path, const PredictionSet& preds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "sample_id,path_id,predicted_delay,source\n";
  for (const PredictionRecord& r : preds) {
    if (r.sample_id.find(',') != std::string::npos) {
      throw IoError("sample id '" + r.sample_id + "' contains a comma");
    }
    out << r.sample_id << ',' << r.path_id << ',' << detail::FormatDouble(r.predicted_delay)
        << ',' << ToString(r.source) << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

PredictionSet ReadPredictionsCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "sample_id,path_id,predicted_delay,source") {
    throw ParseError(1, "", path + ": missing predictions header");
  }
  PredictionSet out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::SplitCsv(line);
    if (cells.size() != 4) throw ParseError(line_no, "", "expected 4 columns");
    try {
      PredictionRecord r;
      r.sample_id = std::string(cells[0]);
      r.path_id = static_cast<int>(detail::ParseInt(cells[1]));
      r.predicted_delay = detail::ParseDouble(cells[2]);
      r.source = ParsePredictionSource(std::string(cells[3]));
      if (!(r.predicted_delay > 0)) {
        throw ValidationError("prediction.positive", "predicted_delay must be > 0");
      }
      out.push_back(std::move(r));
    } catch (const ParseError& e) {
      throw ParseError(line_no, "", e.what());
    }
  }
  return out;
}

MapeReport Report(const PredictionSet& preds, const std::vector<NetworkSample>& labeled,
                  const std::map<std::string, std::string>& subset_of) {
  std::map<Key, double> truth;
  for (const NetworkSample& s : labeled) {
    for (const PathFlow& p : s.paths) {
      if (p.label_delay) truth[{s.sample_id, p.id}] = *p.label_delay;
    }
  }

  // (source, subset) -> (pred, truth) pairs
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>>
      groups;
  MapeReport report;
  for (const PredictionRecord& r : preds) {
    auto it = truth.find(KeyOf(r));
    if (it == truth.end()) {
      report.unmatched.push_back(r.sample_id + ":" + std::to_string(r.path_id));
      continue;
    }
    auto sub = subset_of.find(r.sample_id);
    const std::string subset = sub == subset_of.end() ? "default" : sub->second;
    const std::string source = ToString(r.source);
    for (const std::string& s : {subset, std::string()}) {
      auto& g = groups[{source, s}];
      g.first.push_back(r.predicted_delay);
      g.second.push_back(it->second);
    }
  }
  std::sort(report.unmatched.begin(), report.unmatched.end());

  // The empty subset key sorts first; emit it as each source's last row.
  std::string current;
  std::vector<ReportRow> pending_overall;
  for (const auto& [key, g] : groups) {
    ReportRow row{key.first, key.second.empty() ? "overall" : key.second, g.first.size(),
                  Mape(g.first, g.second)};
    if (key.second.empty()) {
      pending_overall.push_back(row);
      continue;
    }
    report.rows.push_back(row);
    auto next = groups.upper_bound(key);
    if (next == groups.end() || next->first.first != key.first) {
      report.rows.push_back(pending_overall.back());
    }
  }
  return report;
}

std::string MapeReport::ToText() const {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-10s %-16s %10s %12s\n", "source", "subset", "paths",
                "MAPE(%)");
  out << buf;
  for (const ReportRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-10s %-16s %10zu %12.4f\n", r.source.c_str(),
                  r.subset.c_str(), r.n_paths, r.mape);
    out << buf;
  }
  if (!unmatched.empty()) {
    out << "unmatched predictions: " << unmatched.size() << '\n';
    for (const std::string& u : unmatched) out << "  " << u << '\n';
  }
  return out.str();
}

std::string MapeReport::ToJson() const {
  using Json = nlohmann::ordered_json;
  Json rows_j = Json::array();
  for (const ReportRow& r : rows) {
    rows_j.push_back(Json{{"source", r.source},
                          {"subset", r.subset},
                          {"n_paths", r.n_paths},
                          {"mape", r.mape}});
  }
  return Json{{"rows", std::move(rows_j)}, {"unmatched", unmatched}}.dump(2) + "\n";
}

}  // namespace qtroute
