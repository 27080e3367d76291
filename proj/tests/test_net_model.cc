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

#include <functional>
#include <random>
#include <sstream>

#include "fixtures.h"
#include "qtroute/errors.h"
#include "qtroute/net_model.h"

namespace qtroute {
namespace {

using testing::MinimalSample;
using testing::RandomSample;

constexpr const char* kMinimalRecord =
    R"({"sample_id":"m","n_nodes":2,"links":[{"id":0,"src":0,"dst":1,"capacity":1000,)"
    R"("buffer_pkts":32,"queue_size_bits":32000}],"paths":[{"id":0,"link_seq":[0],)"
    R"("traffic":{"avg_pkts_lambda":1,"eq_lambda":1000,"avg_bw":1000,"pkts_gen":1,)"
    R"("total_pkts_gen":100}}]})";

std::string ExpectInvariant(const NetworkSample& s) {
  try {
    s.Validate();
  } catch (const ValidationError& e) {
    return e.invariant();
  }
  return "";
}

TEST_CASE("minimal record loads") {
  std::istringstream in(kMinimalRecord);
  const NetworkSample s = LoadSample(in);
  CHECK(s.n_nodes == 2);
  CHECK(s.links.size() == 1);
  CHECK(s.paths.size() == 1);
  CHECK_FALSE(s.paths[0].label_delay.has_value());
}

TEST_CASE("missing link reference is a validation error") {
  std::string rec = kMinimalRecord;
  rec.replace(rec.find("\"link_seq\":[0]"), 14, "\"link_seq\":[99]");
  try {
    ParseSample(rec, 3);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.invariant() == "path.link_exists");
  }
}

TEST_CASE("malformed records report line and field") {
  SUBCASE("broken json") {
    std::istringstream in("\n{\"sample_id\":");
    SampleReader reader(in);
    try {
      reader.Next();
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("wrong field type") {
    std::string rec = kMinimalRecord;
    rec.replace(rec.find("\"capacity\":1000"), 15, "\"capacity\":\"x\"");
    try {
      ParseSample(rec, 7);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 7);
      CHECK(e.field() == "links[0].capacity");
    }
  }
  SUBCASE("unknown field") {
    std::string rec = kMinimalRecord;
    rec.insert(1, "\"extra\":1,");
    CHECK_THROWS_AS(ParseSample(rec), ParseError);
  }
  SUBCASE("missing field") {
    std::string rec = kMinimalRecord;
    rec.replace(rec.find("\"n_nodes\":2,"), 12, "");
    CHECK_THROWS_AS(ParseSample(rec), ParseError);
  }
}

TEST_CASE("save then load is the identity on the minimal sample") {
  NetworkSample s = MinimalSample();
  s.paths[0].label_delay = 1.25;
  std::stringstream buf;
  SaveSample(s, buf);
  CHECK(LoadSample(buf) == s);
}

TEST_CASE("challenge-sized sample round-trips byte-identically") {
  std::mt19937_64 rng(25);
  NetworkSample s;
  s.sample_id = "challenge_like_25";
  s.n_nodes = 25;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    s.links.push_back(testing::MakeLink(i, i, (i + 1) % 25, 10000.0 + 90000.0 * u(rng)));
  }
  for (int k = 0; k < 60; ++k) {
    const int start = k % 25;
    const int len = 1 + k % 7;
    std::vector<int> seq;
    for (int j = 0; j < len; ++j) seq.push_back((start + j) % 25);
    TrafficDescriptor t = testing::MakeTraffic(0.1 + u(rng), 0.3 + u(rng));
    s.paths.push_back(PathFlow{k, seq, t, 0.001 + u(rng) / 3.0});
  }
  s.Validate();

  std::stringstream first;
  SaveSample(s, first);
  const std::string bytes1 = first.str();
  const NetworkSample back = LoadSample(first);
  std::stringstream second;
  SaveSample(back, second);
  CHECK(back == s);
  CHECK(second.str() == bytes1);
}

TEST_CASE("serialization is canonical") {
  // Same sample written with another key order and integer-valued numbers.
  const std::string shuffled =
      R"({"paths":[{"traffic":{"total_pkts_gen":100,"pkts_gen":1,"avg_bw":1000,)"
      R"("eq_lambda":1000,"avg_pkts_lambda":1},"link_seq":[0],"id":0}],"links":[{)"
      R"("queue_size_bits":32000.0,"buffer_pkts":32,"capacity":1000.0,"dst":1,"src":0,)"
      R"("id":0}],"n_nodes":2,"sample_id":"m"})";
  CHECK(SerializeSample(ParseSample(shuffled)) == SerializeSample(ParseSample(kMinimalRecord)));
}

TEST_CASE("a thousand samples stream one record at a time") {
  std::mt19937_64 rng(1000);
  std::stringstream buf;
  for (int i = 0; i < 1000; ++i) SaveSample(RandomSample(rng, "s" + std::to_string(i)), buf);
  SampleReader reader(buf);
  int count = 0;
  std::size_t max_links = 0;
  while (auto s = reader.Next()) {
    ++count;
    max_links = std::max(max_links, s->links.size());
  }
  CHECK(count == 1000);
  CHECK(reader.line() == 1000);
  CHECK(max_links > 0);
}

TEST_CASE("property: round trip over random topologies") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    NetworkSample s = RandomSample(rng, "r" + std::to_string(i), i % 2 == 0);
    if (i % 3 == 0) s.paths[0].label_delay = 0.5 + i;
    const NetworkSample back = ParseSample(SerializeSample(s));
    REQUIRE(back == s);
    REQUIRE(SerializeSample(back) == SerializeSample(s));
  }
}

TEST_CASE("mutation: each single invariant violation is rejected") {
  auto base = [] {
    NetworkSample s;
    s.sample_id = "mut";
    s.n_nodes = 3;
    s.links = {testing::MakeLink(0, 0, 1), testing::MakeLink(1, 1, 2)};
    s.paths = {PathFlow{0, {0, 1}, testing::MakeTraffic(0.3), 2.0}};
    return s;
  };
  REQUIRE(ExpectInvariant(base()).empty());

  const std::vector<std::pair<std::string, std::function<void(NetworkSample&)>>> cases = {
      {"sample.id_nonempty", [](NetworkSample& s) { s.sample_id.clear(); }},
      {"sample.n_nodes_positive", [](NetworkSample& s) { s.n_nodes = 0; }},
      {"link.id_dense", [](NetworkSample& s) { s.links[1].id = 5; }},
      {"link.node_range", [](NetworkSample& s) { s.links[1].dst = 3; }},
      {"link.no_self_loop",
       [](NetworkSample& s) {
         s.links[1].src = 2;
         s.paths[0].link_seq = {1};
       }},
      {"link.capacity_positive", [](NetworkSample& s) { s.links[0].capacity = 0.0; }},
      {"link.buffer_positive", [](NetworkSample& s) { s.links[0].buffer_pkts = 0; }},
      {"link.queue_size_positive", [](NetworkSample& s) { s.links[0].queue_size_bits = -1; }},
      {"path.id_dense", [](NetworkSample& s) { s.paths[0].id = 1; }},
      {"path.nonempty", [](NetworkSample& s) { s.paths[0].link_seq.clear(); }},
      {"path.link_exists", [](NetworkSample& s) { s.paths[0].link_seq = {0, 2}; }},
      {"path.contiguous", [](NetworkSample& s) { s.paths[0].link_seq = {1, 0}; }},
      {"traffic.nonnegative", [](NetworkSample& s) { s.paths[0].traffic.avg_bw = -1.0; }},
      {"path.label_positive", [](NetworkSample& s) { s.paths[0].label_delay = 0.0; }},
  };
  for (const auto& [invariant, mutate] : cases) {
    CAPTURE(invariant);
    NetworkSample s = base();
    mutate(s);
    CHECK(ExpectInvariant(s) == invariant);
    CHECK_THROWS_AS(ParseSample(SerializeSample(s)), ValidationError);
  }
}

TEST_CASE("write failure surfaces as IoError") {
  std::ostringstream out;
  out.setstate(std::ios::badbit);
  CHECK_THROWS_AS(SaveSample(MinimalSample(), out), IoError);
}

}  // namespace
}  // namespace qtroute
