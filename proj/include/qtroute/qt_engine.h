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

#ifndef QTROUTE_QT_ENGINE_H_
#define QTROUTE_QT_ENGINE_H_

// M/M/1/B reduced-load baseline. Every link is an independent finite-buffer
// queue; path demands are thinned by upstream blocking and the blocking
// probabilities are refined by a fixed number of substitution rounds.

#include <span>
#include <string>
#include <vector>

#include "qtroute/net_model.h"

namespace qtroute {

enum class ModelVariant { kM1, kM2 };

// Additive term in the per-link delay numerator: x = 1 or x = pi0.
enum class XMode { kOne, kPi0 };

std::string ToString(ModelVariant v);
std::string ToString(XMode m);
ModelVariant ParseVariant(const std::string& s);
XMode ParseXMode(const std::string& s);

struct QTConfig {
  int num_iterations = 5;
  double pb_init = 0.3;
  XMode x_mode = XMode::kPi0;
  double rho_singularity_eps = 1e-9;

  // Iteration count used by each model: 5 for m1, 3 for m2.
  static QTConfig ForVariant(ModelVariant v);

  void Validate() const;
};

struct QTLinkState {
  double total_traffic = 0.0;   // packets per time unit offered to the link
  double rho = 0.0;
  double pb = 0.0;
  double pi0 = 1.0;
  double occupancy_frac = 0.0;  // mean number in system / B
  // (x + mean number in system) / B. Multiplied by queue_size / c this is the
  // link delay; it is the "L" baseline feature handed to the learned stage.
  double utilization = 0.0;
  double link_delay = 0.0;      // time units
};

struct FixedPointResult {
  std::vector<QTLinkState> links;
  // max_l |Pb_l(after) - Pb_l(before)| for each round, diagnostics only.
  std::vector<double> residuals;
};

struct TrafficPropagation {
  // per_hop[k][j] is the rate of path k entering the j-th link of its route.
  std::vector<std::vector<double>> per_hop;
  std::vector<double> link_totals;
};

// Thinning of each path demand A_k = pkts_gen by upstream blocking.
TrafficPropagation PropagateTraffic(const NetworkSample& sample,
                                    std::span<const double> pb);

// Loss probability of an M/M/1/B queue. Uses the analytic limit 1/(B+1) when
// |1 - rho| < eps. Throws DomainError for negative or non-finite rho.
double BlockingProbability(double rho, int buffer_pkts, double eps = 1e-9);

// Probability the M/M/1/B queue is empty.
double EmptyProbability(double rho, int buffer_pkts, double eps = 1e-9);

// Mean number of packets in an M/M/1/B system, sum_{j=0}^{B} j * pi_j.
double MeanOccupancy(double rho, int buffer_pkts, double eps = 1e-9);

FixedPointResult RunFixedPoint(const NetworkSample& sample, const QTConfig& cfg);

// Sums one value per link over every path's route.
std::vector<double> GetPathDelay(std::span<const double> per_link,
                                 const NetworkSample& sample);

struct QTFeatureSet {
  ModelVariant variant = ModelVariant::kM1;
  // Row-major, one row per link: [L] for m1, [pi0, rho, L] for m2.
  std::vector<double> b_link;
  int b_link_width = 1;
  std::vector<double> b_path;  // baseline delay per path, time units

  std::span<const double> LinkRow(std::size_t l) const {
    return {b_link.data() + l * b_link_width, static_cast<std::size_t>(b_link_width)};
  }
};

QTFeatureSet ExtractFeatures(const NetworkSample& sample, const QTConfig& cfg,
                             ModelVariant variant);

// Writes <dir>/<file_stem>.links.csv (link_id,pi0,rho,L) and
// <dir>/<file_stem>.paths.csv (path_id,baseline_delay).
void WriteQTFeatureCsv(const std::string& dir, const std::string& file_stem,
                       const NetworkSample& sample, const FixedPointResult& state);

}  // namespace qtroute

#endif  // QTROUTE_QT_ENGINE_H_
