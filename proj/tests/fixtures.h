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

#ifndef QTROUTE_TESTS_FIXTURES_H_
#define QTROUTE_TESTS_FIXTURES_H_

// Hand-built and randomly generated samples shared by the test binaries.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "qtroute/net_model.h"

namespace qtroute::testing {

inline Link MakeLink(int id, int src, int dst, double capacity = 1000.0,
                     int buffer = 32, double queue_bits = 32000.0) {
  return Link{id, src, dst, capacity, buffer, queue_bits};
}

inline TrafficDescriptor MakeTraffic(double pkts_gen, double avg_pkts_lambda = 0.0) {
  TrafficDescriptor t;
  t.avg_pkts_lambda = avg_pkts_lambda > 0 ? avg_pkts_lambda : (pkts_gen > 0 ? pkts_gen : 1.0);
  t.eq_lambda = 1000.0 * t.avg_pkts_lambda;
  t.avg_bw = 1000.0 * pkts_gen;
  t.pkts_gen = pkts_gen;
  t.total_pkts_gen = 1000.0 * pkts_gen;
  return t;
}

// Two nodes, one 0->1 link, one path.
inline NetworkSample MinimalSample() {
  NetworkSample s;
  s.sample_id = "minimal";
  s.n_nodes = 2;
  s.links = {MakeLink(0, 0, 1)};
  s.paths = {PathFlow{0, {0}, MakeTraffic(0.5), std::nullopt}};
  return s;
}

// One link with capacity 1000 bits/u and 1000-bit mean packets, so the
// service rate is one packet per time unit and rho equals `rate`.
inline NetworkSample SingleQueueSample(double rate, int buffer = 32) {
  NetworkSample s;
  s.sample_id = "single-queue";
  s.n_nodes = 2;
  s.links = {MakeLink(0, 0, 1, 1000.0, buffer, 1000.0 * buffer)};
  s.paths = {PathFlow{0, {0}, MakeTraffic(rate), std::nullopt}};
  return s;
}

// Directed line 0->1->...->n-1 with one path per ordered pair i<j, every path
// at the same rate. Busiest-link utilization equals `max_rho`.
inline NetworkSample LineSample(int n_nodes, double max_rho, const std::string& id = "line") {
  NetworkSample s;
  s.sample_id = id;
  s.n_nodes = n_nodes;
  for (int i = 0; i + 1 < n_nodes; ++i) s.links.push_back(MakeLink(i, i, i + 1));
  int busiest = 0;
  for (int l = 0; l + 1 < n_nodes; ++l) busiest = std::max(busiest, (l + 1) * (n_nodes - 1 - l));
  const double rate = max_rho / busiest;  // service rate is 1 pkt/u per link
  int pid = 0;
  for (int a = 0; a < n_nodes; ++a) {
    for (int b = a + 1; b < n_nodes; ++b) {
      std::vector<int> seq;
      for (int l = a; l < b; ++l) seq.push_back(l);
      s.paths.push_back(PathFlow{pid++, seq, MakeTraffic(rate), std::nullopt});
    }
  }
  return s;
}

// Random connected sample: a ring plus chords, paths are random walks along
// outgoing links. Loads stay moderate unless `heavy` is set.
inline NetworkSample RandomSample(std::mt19937_64& rng, const std::string& id,
                                  bool heavy = false) {
  std::uniform_int_distribution<int> nodes_d(3, 9);
  const int n = nodes_d(rng);
  NetworkSample s;
  s.sample_id = id;
  s.n_nodes = n;
  std::uniform_real_distribution<double> cap_d(500.0, 5000.0);
  std::vector<std::vector<int>> out(n);
  auto add = [&](int a, int b) {
    const int id_l = static_cast<int>(s.links.size());
    s.links.push_back(MakeLink(id_l, a, b, cap_d(rng)));
    out[a].push_back(id_l);
  };
  for (int i = 0; i < n; ++i) add(i, (i + 1) % n);
  std::uniform_int_distribution<int> node_pick(0, n - 1);
  for (int c = 0; c < n; ++c) {
    const int a = node_pick(rng), b = node_pick(rng);
    if (a != b) add(a, b);
  }
  std::uniform_int_distribution<int> paths_d(1, 12), len_d(1, 5);
  std::uniform_real_distribution<double> rate_d(0.01, heavy ? 6.0 : 0.4);
  const int n_paths = paths_d(rng);
  for (int k = 0; k < n_paths; ++k) {
    int at = node_pick(rng);
    std::vector<int> seq;
    const int len = len_d(rng);
    for (int j = 0; j < len; ++j) {
      std::uniform_int_distribution<std::size_t> pick(0, out[at].size() - 1);
      const int l = out[at][pick(rng)];
      seq.push_back(l);
      at = s.links[l].dst;
    }
    s.paths.push_back(PathFlow{k, seq, MakeTraffic(rate_d(rng), 0.5 + rate_d(rng)), std::nullopt});
  }
  return s;
}

}  // namespace qtroute::testing

#endif  // QTROUTE_TESTS_FIXTURES_H_
