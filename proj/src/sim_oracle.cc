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

#include "qtroute/sim_oracle.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>

#include <json.hpp>

#include "qtroute/errors.h"

namespace qtroute {
namespace {

struct Event {
  double time;
  std::uint64_t id;  // tie-breaker, increases with scheduling order
  int path;
  int hop;
  double bits;
  double birth;

  bool operator>(const Event& o) const {
    return time != o.time ? time > o.time : id > o.id;
  }
};

struct BatchAccumulator {
  std::vector<double> sum;
  std::vector<double> count;

  explicit BatchAccumulator(int n) : sum(n, 0.0), count(n, 0.0) {}

  // Standard error of the mean of per-batch ratios sum/count.
  double StdErr() const {
    std::vector<double> means;
    for (std::size_t b = 0; b < sum.size(); ++b) {
      if (count[b] > 0) means.push_back(sum[b] / count[b]);
    }
    if (means.size() < 2) return 0.0;
    double m = 0.0;
    for (double v : means) m += v;
    m /= static_cast<double>(means.size());
    double ss = 0.0;
    for (double v : means) ss += (v - m) * (v - m);
    const double n = static_cast<double>(means.size());
    return std::sqrt(ss / (n - 1.0) / n);
  }
};

}  // namespace

std::string ToString(PacketSizeDist d) {
  return d == PacketSizeDist::kExponential ? "exponential" : "deterministic";
}

PacketSizeDist ParsePacketSizeDist(const std::string& s) {
  if (s == "exponential") return PacketSizeDist::kExponential;
  if (s == "deterministic") return PacketSizeDist::kDeterministic;
  throw DomainError("unknown packet size distribution '" + s + "'");
}

void SimConfig::Validate() const {
  if (!(sim_time > 0) || !std::isfinite(sim_time)) {
    throw DomainError("sim_time must be positive");
  }
  if (!(warmup_frac >= 0 && warmup_frac < 1)) {
    throw DomainError("warmup_frac must lie in [0, 1)");
  }
  if (mean_packet_bits && !(*mean_packet_bits > 0)) {
    throw DomainError("mean_packet_bits must be positive");
  }
  if (num_batches < 2) throw DomainError("num_batches must be >= 2");
}

std::uint64_t ReplicationSeed(std::uint64_t base, std::uint64_t index) {
  // splitmix64 finalizer
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SimResult Simulate(const NetworkSample& sample, const SimConfig& cfg) {
  sample.Validate();
  cfg.Validate();

  const std::size_t n_paths = sample.paths.size();
  const std::size_t n_links = sample.links.size();
  const double w0 = cfg.warmup_frac * cfg.sim_time;
  const double w1 = cfg.sim_time;
  const int nb = cfg.num_batches;
  auto batch_of = [&](double t) {
    return std::clamp(static_cast<int>((t - w0) / (w1 - w0) * nb), 0, nb - 1);
  };

  std::mt19937_64 rng(cfg.seed);
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::uint64_t next_id = 0;

  std::vector<double> mean_bits(n_paths);
  for (std::size_t k = 0; k < n_paths; ++k) {
    mean_bits[k] = cfg.mean_packet_bits.value_or(
        sample.links[sample.paths[k].link_seq.front()].MeanPacketBits());
  }
  auto draw_bits = [&](std::size_t k) {
    if (cfg.packet_size_dist == PacketSizeDist::kDeterministic) return mean_bits[k];
    return std::exponential_distribution<double>(1.0 / mean_bits[k])(rng);
  };
  auto schedule_generation = [&](std::size_t k, double after) {
    const double rate = sample.paths[k].traffic.pkts_gen;
    if (!(rate > 0)) return;
    const double t = after + std::exponential_distribution<double>(rate)(rng);
    if (t >= cfg.sim_time) return;
    events.push(Event{t, next_id++, static_cast<int>(k), 0, draw_bits(k), t});
  };
  for (std::size_t k = 0; k < n_paths; ++k) schedule_generation(k, 0.0);

  SimResult result;
  result.sample_id = sample.sample_id;
  result.window_start = w0;
  result.window_end = w1;
  result.paths.resize(n_paths);
  result.links.resize(n_links);

  std::vector<std::deque<double>> in_system(n_links);  // departure times, FIFO
  std::vector<double> occupancy_area(n_links, 0.0);
  std::vector<double> sojourn_sum(n_links, 0.0);
  std::vector<double> delay_sum(n_paths, 0.0);
  std::vector<BatchAccumulator> delay_batches(n_paths, BatchAccumulator(nb));
  std::vector<BatchAccumulator> block_batches(n_links, BatchAccumulator(nb));

  while (!events.empty()) {
    const Event ev = events.top();
    events.pop();
    ++result.events;

    const PathFlow& path = sample.paths[ev.path];
    const bool measured_pkt = ev.birth >= w0;
    if (ev.hop == 0) {
      if (measured_pkt) ++result.paths[ev.path].generated;
      schedule_generation(ev.path, ev.time);
    }

    const int l = path.link_seq[ev.hop];
    const Link& link = sample.links[l];
    auto& queue = in_system[l];
    while (!queue.empty() && queue.front() <= ev.time) queue.pop_front();

    const bool measured_arrival = ev.time >= w0 && ev.time < w1;
    LinkSimStats& ls = result.links[l];
    if (measured_arrival) {
      ++ls.arrivals;
      block_batches[l].count[batch_of(ev.time)] += 1.0;
    }

    if (queue.size() >= static_cast<std::size_t>(link.buffer_pkts)) {
      if (measured_arrival) {
        ++ls.dropped;
        block_batches[l].sum[batch_of(ev.time)] += 1.0;
      }
      if (measured_pkt) ++result.paths[ev.path].dropped;
      continue;
    }

    const double start = queue.empty() ? ev.time : std::max(ev.time, queue.back());
    const double depart = start + ev.bits / link.capacity;
    queue.push_back(depart);
    occupancy_area[l] += std::max(0.0, std::min(depart, w1) - std::max(ev.time, w0));
    if (measured_arrival) {
      ++ls.accepted;
      sojourn_sum[l] += depart - ev.time;
    }

    if (static_cast<std::size_t>(ev.hop) + 1 < path.link_seq.size()) {
      events.push(Event{depart, next_id++, ev.path, ev.hop + 1, ev.bits, ev.birth});
    } else if (measured_pkt) {
      PathSimStats& ps = result.paths[ev.path];
      ++ps.delivered;
      const double delay = depart - ev.birth;
      delay_sum[ev.path] += delay;
      const int b = batch_of(ev.birth);
      delay_batches[ev.path].sum[b] += delay;
      delay_batches[ev.path].count[b] += 1.0;
    }
  }

  const double window = w1 - w0;
  for (std::size_t l = 0; l < n_links; ++l) {
    LinkSimStats& ls = result.links[l];
    ls.mean_occupancy = occupancy_area[l] / window;
    ls.throughput = static_cast<double>(ls.accepted) / window;
    if (ls.arrivals) {
      ls.blocking_fraction =
          static_cast<double>(ls.dropped) / static_cast<double>(ls.arrivals);
      ls.blocking_stderr = block_batches[l].StdErr();
    }
    if (ls.accepted) ls.mean_sojourn = sojourn_sum[l] / static_cast<double>(ls.accepted);
  }
  for (std::size_t k = 0; k < n_paths; ++k) {
    PathSimStats& ps = result.paths[k];
    if (ps.delivered) {
      ps.mean_delay = delay_sum[k] / static_cast<double>(ps.delivered);
      ps.delay_stderr = delay_batches[k].StdErr();
    }
  }
  return result;
}

NetworkSample LabelSample(const NetworkSample& sample, const SimResult& result) {
  if (result.paths.size() != sample.paths.size()) {
    throw DimensionError("simulation result does not match the sample's paths");
  }
  NetworkSample out = sample;
  for (std::size_t k = 0; k < out.paths.size(); ++k) {
    const auto& d = result.paths[k].mean_delay;
    out.paths[k].label_delay = (d && *d > 0) ? d : std::nullopt;
  }
  return out;
}

std::string SimResult::ToJson() const {
  using Json = nlohmann::ordered_json;
  Json paths_j = Json::array();
  for (std::size_t k = 0; k < paths.size(); ++k) {
    const PathSimStats& p = paths[k];
    paths_j.push_back(Json{{"path_id", k},
                           {"generated", p.generated},
                           {"delivered", p.delivered},
                           {"dropped", p.dropped},
                           {"mean_delay", p.mean_delay ? Json(*p.mean_delay) : Json()},
                           {"delay_stderr", p.delay_stderr}});
  }
  Json links_j = Json::array();
  for (std::size_t l = 0; l < links.size(); ++l) {
    const LinkSimStats& s = links[l];
    links_j.push_back(Json{{"link_id", l},
                           {"arrivals", s.arrivals},
                           {"accepted", s.accepted},
                           {"dropped", s.dropped},
                           {"blocking_fraction", s.blocking_fraction},
                           {"blocking_stderr", s.blocking_stderr},
                           {"mean_occupancy", s.mean_occupancy},
                           {"mean_sojourn", s.mean_sojourn},
                           {"throughput", s.throughput}});
  }
  return Json{{"sample_id", sample_id},
              {"events", events},
              {"window_start", window_start},
              {"window_end", window_end},
              {"paths", std::move(paths_j)},
              {"links", std::move(links_j)}}
      .dump();
}

}  // namespace qtroute
