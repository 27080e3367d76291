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

#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.h"
#include "mm1b_oracle.h"
#include "qtroute/errors.h"
#include "qtroute/sim_oracle.h"

namespace qtroute {
namespace {

SimConfig Short(std::uint64_t seed = 7, double sim_time = 2e4) {
  SimConfig c;
  c.seed = seed;
  c.sim_time = sim_time;
  return c;
}

TEST_CASE("zero offered load delivers nothing") {
  NetworkSample s = testing::SingleQueueSample(0.5);
  s.paths[0].traffic.pkts_gen = 0.0;
  const SimResult r = Simulate(s, Short());
  CHECK(r.events == 0);
  CHECK(r.paths[0].delivered == 0);
  CHECK_FALSE(r.paths[0].mean_delay.has_value());
  CHECK(r.links[0].mean_occupancy == 0.0);
  CHECK(r.links[0].blocking_fraction == 0.0);
}

TEST_CASE("same seed gives identical results, other seeds differ") {
  const NetworkSample s = testing::LineSample(5, 0.6);
  const SimResult a = Simulate(s, Short(3));
  const SimResult b = Simulate(s, Short(3));
  CHECK(a == b);
  CHECK(a.ToJson() == b.ToJson());
  CHECK_FALSE(a == Simulate(s, Short(4)));
}

TEST_CASE("replication seeds are distinct") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(ReplicationSeed(42, i));
  CHECK(seen.size() == 1000);
  CHECK(ReplicationSeed(42, 5) == ReplicationSeed(42, 5));
  CHECK(ReplicationSeed(42, 5) != ReplicationSeed(43, 5));
}

TEST_CASE("property: packets are conserved on every path") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 20; ++i) {
    const NetworkSample s = testing::RandomSample(rng, "c" + std::to_string(i), i % 2 == 1);
    const SimResult r = Simulate(s, Short(i + 1, 3000));
    for (const PathSimStats& p : r.paths) {
      REQUIRE(p.generated == p.delivered + p.dropped);
    }
    for (const LinkSimStats& l : r.links) {
      REQUIRE(l.arrivals == l.accepted + l.dropped);
      REQUIRE(l.mean_occupancy >= 0.0);
    }
  }
}

TEST_CASE("little's law holds per link") {
  const NetworkSample s = testing::LineSample(4, 0.7);
  const SimResult r = Simulate(s, Short(11, 1e5));
  for (const LinkSimStats& l : r.links) {
    REQUIRE(l.accepted > 1000);
    CHECK(l.mean_occupancy == doctest::Approx(l.throughput * l.mean_sojourn).epsilon(0.03));
  }
}

TEST_CASE("single queue sojourn tracks the finite-buffer closed form") {
  const NetworkSample s = testing::SingleQueueSample(0.5, 16);
  const SimResult r = Simulate(s, Short(5, 2e5));
  const testing::MM1BOracle o(0.5, 16);
  CHECK(r.links[0].mean_sojourn == doctest::Approx(static_cast<double>(o.sojourn(0.5))).epsilon(0.05));
  CHECK(r.links[0].mean_occupancy ==
        doctest::Approx(static_cast<double>(o.mean_in_system)).epsilon(0.05));
}

TEST_CASE("deterministic packet sizes") {
  const NetworkSample s = testing::SingleQueueSample(0.5);
  SimConfig c = Short(9, 5e4);
  c.packet_size_dist = PacketSizeDist::kDeterministic;
  const SimResult r = Simulate(s, c);
  // M/D/1: W = 1/mu + rho / (2 mu (1 - rho)) = 1.5 at rho = 0.5.
  CHECK(r.links[0].mean_sojourn == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("label_sample copies delays and drops silent paths") {
  NetworkSample s = testing::LineSample(3, 0.5);
  s.paths[1].traffic.pkts_gen = 0.0;
  const SimResult r = Simulate(s, Short());
  const NetworkSample labeled = LabelSample(s, r);
  CHECK(labeled.paths[0].label_delay == r.paths[0].mean_delay);
  CHECK_FALSE(labeled.paths[1].label_delay.has_value());
  CHECK_NOTHROW(labeled.Validate());

  SimResult bad = r;
  bad.paths.pop_back();
  CHECK_THROWS_AS(LabelSample(s, bad), DimensionError);
}

TEST_CASE("config validation") {
  const NetworkSample s = testing::MinimalSample();
  SimConfig c;
  c.sim_time = 0;
  CHECK_THROWS_AS(Simulate(s, c), DomainError);
  c = SimConfig{};
  c.warmup_frac = 1.0;
  CHECK_THROWS_AS(Simulate(s, c), DomainError);
  c = SimConfig{};
  c.num_batches = 1;
  CHECK_THROWS_AS(c.Validate(), DomainError);
  c = SimConfig{};
  c.mean_packet_bits = -1.0;
  CHECK_THROWS_AS(c.Validate(), DomainError);
  CHECK(ParsePacketSizeDist("deterministic") == PacketSizeDist::kDeterministic);
  CHECK_THROWS_AS(ParsePacketSizeDist("pareto"), DomainError);
}

}  // namespace
}  // namespace qtroute
