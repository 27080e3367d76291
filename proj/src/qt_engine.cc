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

#include "qtroute/qt_engine.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "qtroute/errors.h"
#include "text_util.h"

namespace qtroute {
namespace {

void CheckRho(double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw DomainError("traffic intensity must be finite and >= 0, got " +
                      std::to_string(rho));
  }
}

// Stationary distribution pi_0..pi_B of the M/M/1/B chain. For rho > 1 the
// geometric weights are taken in powers of 1/rho so nothing overflows.
std::vector<double> StateProbabilities(double rho, int b, double eps) {
  CheckRho(rho);
  std::vector<double> pi(static_cast<std::size_t>(b) + 1);
  if (std::abs(1.0 - rho) < eps) {
    std::fill(pi.begin(), pi.end(), 1.0 / (b + 1));
    return pi;
  }
  if (rho < 1.0) {
    // 1 - rho^{B+1} via expm1 keeps precision close to rho = 1.
    const double pi0 = (1.0 - rho) / -std::expm1((b + 1) * std::log(rho));
    for (int j = 0; j <= b; ++j) pi[j] = pi0 * std::pow(rho, j);
  } else {
    const double r = 1.0 / rho;
    const double top = (1.0 - r) / -std::expm1((b + 1) * std::log(r));
    for (int j = 0; j <= b; ++j) pi[j] = top * std::pow(r, b - j);
  }
  return pi;
}

}  // namespace

std::string ToString(ModelVariant v) { return v == ModelVariant::kM1 ? "m1" : "m2"; }
std::string ToString(XMode m) { return m == XMode::kOne ? "one" : "pi0"; }

ModelVariant ParseVariant(const std::string& s) {
  if (s == "m1") return ModelVariant::kM1;
  if (s == "m2") return ModelVariant::kM2;
  throw DomainError("unknown model variant '" + s + "' (expected m1 or m2)");
}

XMode ParseXMode(const std::string& s) {
  if (s == "one") return XMode::kOne;
  if (s == "pi0") return XMode::kPi0;
  throw DomainError("unknown x mode '" + s + "' (expected one or pi0)");
}

QTConfig QTConfig::ForVariant(ModelVariant v) {
  QTConfig cfg;
  cfg.num_iterations = v == ModelVariant::kM1 ? 5 : 3;
  return cfg;
}

void QTConfig::Validate() const {
  if (num_iterations < 1) {
    throw DomainError("num_iterations must be >= 1");
  }
  if (!(pb_init >= 0.0 && pb_init < 1.0)) {
    throw DomainError("pb_init must lie in [0, 1)");
  }
  if (!(rho_singularity_eps > 0.0)) {
    throw DomainError("rho_singularity_eps must be positive");
  }
}

TrafficPropagation PropagateTraffic(const NetworkSample& sample,
                                    std::span<const double> pb) {
  if (pb.size() != sample.links.size()) {
    throw DimensionError("expected " + std::to_string(sample.links.size()) +
                         " blocking probabilities, got " + std::to_string(pb.size()));
  }
  TrafficPropagation out;
  out.link_totals.assign(sample.links.size(), 0.0);
  out.per_hop.reserve(sample.paths.size());
  for (const PathFlow& p : sample.paths) {
    std::vector<double> hops(p.link_seq.size());
    double rate = p.traffic.pkts_gen;
    for (std::size_t j = 0; j < p.link_seq.size(); ++j) {
      const int l = p.link_seq[j];
      hops[j] = rate;
      out.link_totals[l] += rate;
      rate *= 1.0 - pb[l];
    }
    out.per_hop.push_back(std::move(hops));
  }
  return out;
}

double BlockingProbability(double rho, int buffer_pkts, double eps) {
  CheckRho(rho);
  if (buffer_pkts < 1) throw DomainError("buffer_pkts must be >= 1");
  return StateProbabilities(rho, buffer_pkts, eps).back();
}

double EmptyProbability(double rho, int buffer_pkts, double eps) {
  CheckRho(rho);
  if (buffer_pkts < 1) throw DomainError("buffer_pkts must be >= 1");
  return StateProbabilities(rho, buffer_pkts, eps).front();
}

double MeanOccupancy(double rho, int buffer_pkts, double eps) {
  CheckRho(rho);
  if (buffer_pkts < 1) throw DomainError("buffer_pkts must be >= 1");
  const std::vector<double> pi = StateProbabilities(rho, buffer_pkts, eps);
  double sum = 0.0;
  for (int j = 1; j <= buffer_pkts; ++j) sum += j * pi[j];
  return sum;
}

FixedPointResult RunFixedPoint(const NetworkSample& sample, const QTConfig& cfg) {
  cfg.Validate();
  const std::size_t n = sample.links.size();
  std::vector<double> pb(n, cfg.pb_init);
  std::vector<double> rho(n, 0.0);
  std::vector<double> totals(n, 0.0);

  FixedPointResult result;
  for (int it = 0; it < cfg.num_iterations; ++it) {
    totals = PropagateTraffic(sample, pb).link_totals;
    double residual = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      const Link& link = sample.links[l];
      rho[l] = totals[l] / link.ServiceRate();
      const double next =
          BlockingProbability(rho[l], link.buffer_pkts, cfg.rho_singularity_eps);
      residual = std::max(residual, std::abs(next - pb[l]));
      pb[l] = next;
    }
    result.residuals.push_back(residual);
  }

  result.links.resize(n);
  for (std::size_t l = 0; l < n; ++l) {
    const Link& link = sample.links[l];
    const int b = link.buffer_pkts;
    const std::vector<double> pi = StateProbabilities(rho[l], b, cfg.rho_singularity_eps);
    double mean = 0.0;
    for (int j = 1; j <= b; ++j) mean += j * pi[j];

    QTLinkState& s = result.links[l];
    s.total_traffic = totals[l];
    s.rho = rho[l];
    s.pb = pb[l];
    s.pi0 = pi.front();
    s.occupancy_frac = mean / b;
    const double x = cfg.x_mode == XMode::kPi0 ? s.pi0 : 1.0;
    s.utilization = (x + mean) / b;
    s.link_delay = s.utilization * link.queue_size_bits / link.capacity;
  }
  return result;
}

std::vector<double> GetPathDelay(std::span<const double> per_link,
                                 const NetworkSample& sample) {
  if (per_link.size() != sample.links.size()) {
    throw DimensionError("expected " + std::to_string(sample.links.size()) +
                         " per-link values, got " + std::to_string(per_link.size()));
  }
  std::vector<double> out;
  out.reserve(sample.paths.size());
  for (const PathFlow& p : sample.paths) {
    double sum = 0.0;
    for (int l : p.link_seq) sum += per_link[l];
    out.push_back(sum);
  }
  return out;
}

QTFeatureSet ExtractFeatures(const NetworkSample& sample, const QTConfig& cfg,
                             ModelVariant variant) {
  const FixedPointResult state = RunFixedPoint(sample, cfg);
  QTFeatureSet f;
  f.variant = variant;
  f.b_link_width = variant == ModelVariant::kM1 ? 1 : 3;
  f.b_link.reserve(state.links.size() * f.b_link_width);
  std::vector<double> delays;
  delays.reserve(state.links.size());
  for (const QTLinkState& s : state.links) {
    if (variant == ModelVariant::kM2) {
      f.b_link.push_back(s.pi0);
      f.b_link.push_back(s.rho);
    }
    f.b_link.push_back(s.utilization);
    delays.push_back(s.link_delay);
  }
  f.b_path = GetPathDelay(delays, sample);
  return f;
}

void WriteQTFeatureCsv(const std::string& dir, const std::string& file_stem,
                       const NetworkSample& sample, const FixedPointResult& state) {
  namespace fs = std::filesystem;
  using detail::FormatDouble;
  const fs::path base(dir);

  std::ofstream links(base / (file_stem + ".links.csv"));
  if (!links) throw IoError("cannot write link features under " + dir);
  links << "link_id,pi0,rho,L\n";
  std::vector<double> delays;
  for (std::size_t l = 0; l < state.links.size(); ++l) {
    const QTLinkState& s = state.links[l];
    links << l << ',' << FormatDouble(s.pi0) << ',' << FormatDouble(s.rho) << ','
          << FormatDouble(s.utilization) << '\n';
    delays.push_back(s.link_delay);
  }

  std::ofstream paths(base / (file_stem + ".paths.csv"));
  if (!paths) throw IoError("cannot write path features under " + dir);
  paths << "path_id,baseline_delay\n";
  const std::vector<double> b_path = GetPathDelay(delays, sample);
  for (std::size_t k = 0; k < b_path.size(); ++k) {
    paths << k << ',' << FormatDouble(b_path[k]) << '\n';
  }
  if (!links || !paths) throw IoError("failed writing QT features under " + dir);
}

}  // namespace qtroute
