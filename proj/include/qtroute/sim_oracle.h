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

#ifndef QTROUTE_SIM_ORACLE_H_
#define QTROUTE_SIM_ORACLE_H_

// Packet-level discrete-event simulation of a network of single-server FIFO
// links with finite buffers. Each path injects a Poisson packet stream at rate
// pkts_gen; a packet keeps its size along the route and takes size / capacity
// to be transmitted on every link. A link holds at most buffer_pkts packets
// (the one in transmission included); an arrival that finds it full is lost.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qtroute/net_model.h"

namespace qtroute {

enum class PacketSizeDist { kExponential, kDeterministic };

std::string ToString(PacketSizeDist d);
PacketSizeDist ParsePacketSizeDist(const std::string& s);

struct SimConfig {
  std::uint64_t seed = 1;
  double sim_time = 1e5;
  double warmup_frac = 0.1;
  PacketSizeDist packet_size_dist = PacketSizeDist::kExponential;
  // Mean packet size in bits. Unset: queue_size_bits / buffer_pkts of the
  // path's first link.
  std::optional<double> mean_packet_bits;
  // Batches used for batch-means standard errors.
  int num_batches = 20;

  void Validate() const;
};

struct PathSimStats {
  // Counts cover packets created inside the measurement window.
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::optional<double> mean_delay;
  double delay_stderr = 0.0;  // batch means; 0 when undetermined

  friend bool operator==(const PathSimStats&, const PathSimStats&) = default;
};

struct LinkSimStats {
  // Counts cover arrivals inside the measurement window.
  std::uint64_t arrivals = 0;
  std::uint64_t accepted = 0;
  std::uint64_t dropped = 0;
  double blocking_fraction = 0.0;
  double blocking_stderr = 0.0;
  double mean_occupancy = 0.0;  // time-average number of packets in [0, B]
  double mean_sojourn = 0.0;    // waiting + transmission of accepted packets
  double throughput = 0.0;      // accepted packets per time unit

  friend bool operator==(const LinkSimStats&, const LinkSimStats&) = default;
};

struct SimResult {
  std::string sample_id;
  std::uint64_t events = 0;  // packet arrival events processed
  double window_start = 0.0;
  double window_end = 0.0;
  std::vector<PathSimStats> paths;
  std::vector<LinkSimStats> links;

  std::string ToJson() const;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

// Single-threaded and deterministic for a given seed.
SimResult Simulate(const NetworkSample& sample, const SimConfig& cfg);

// Copy of `sample` whose label_delay fields hold the simulated mean delays.
// Paths that delivered nothing lose their label.
NetworkSample LabelSample(const NetworkSample& sample, const SimResult& result);

// Seed for replication `index` derived from a base seed.
std::uint64_t ReplicationSeed(std::uint64_t base, std::uint64_t index);

}  // namespace qtroute

#endif  // QTROUTE_SIM_ORACLE_H_
