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

#include "qtroute/net_model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include <json.hpp>

#include "qtroute/errors.h"

namespace qtroute {
namespace {

using Json = nlohmann::ordered_json;

void Require(bool ok, const char* invariant, const std::string& what) {
  if (!ok) throw ValidationError(invariant, what);
}

class RecordParser {
 public:
  explicit RecordParser(std::size_t line) : line_(line) {}

  [[noreturn]] void Fail(const std::string& field, const std::string& what) const {
    throw ParseError(line_, field, what);
  }

  const Json& Field(const Json& obj, const std::string& parent,
                    std::string_view key) const {
    auto it = obj.find(key);
    if (it == obj.end()) Fail(Join(parent, key), "missing");
    return *it;
  }

  void CheckKeys(const Json& obj, const std::string& path,
                 std::initializer_list<std::string_view> allowed) const {
    if (!obj.is_object()) Fail(path, "expected an object");
    for (const auto& [key, _] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        Fail(Join(path, key), "unknown field");
      }
    }
  }

  int Int(const Json& obj, const std::string& parent, std::string_view key) const {
    return AsInt(Field(obj, parent, key), Join(parent, key));
  }

  int AsInt(const Json& v, const std::string& path) const {
    if (!v.is_number_integer()) Fail(path, "expected an integer");
    const auto value = v.get<std::int64_t>();
    if (value < INT32_MIN || value > INT32_MAX) Fail(path, "integer out of range");
    return static_cast<int>(value);
  }

  double Number(const Json& obj, const std::string& parent,
                std::string_view key) const {
    const Json& v = Field(obj, parent, key);
    if (!v.is_number()) Fail(Join(parent, key), "expected a number");
    return v.get<double>();
  }

  static std::string Join(const std::string& parent, std::string_view key) {
    if (parent.empty()) return std::string(key);
    return parent + "." + std::string(key);
  }

 private:
  std::size_t line_;
};

Json ToJson(const NetworkSample& s) {
  Json links = Json::array();
  for (const Link& l : s.links) {
    links.push_back(Json{{"id", l.id},
                         {"src", l.src},
                         {"dst", l.dst},
                         {"capacity", l.capacity},
                         {"buffer_pkts", l.buffer_pkts},
                         {"queue_size_bits", l.queue_size_bits}});
  }
  Json paths = Json::array();
  for (const PathFlow& p : s.paths) {
    const TrafficDescriptor& t = p.traffic;
    Json path{{"id", p.id},
              {"link_seq", p.link_seq},
              {"traffic", Json{{"avg_pkts_lambda", t.avg_pkts_lambda},
                               {"eq_lambda", t.eq_lambda},
                               {"avg_bw", t.avg_bw},
                               {"pkts_gen", t.pkts_gen},
                               {"total_pkts_gen", t.total_pkts_gen}}}};
    if (p.label_delay) path["label_delay"] = *p.label_delay;
    paths.push_back(std::move(path));
  }
  return Json{{"sample_id", s.sample_id},
              {"n_nodes", s.n_nodes},
              {"links", std::move(links)},
              {"paths", std::move(paths)}};
}

NetworkSample FromJson(const Json& j, std::size_t line) {
  RecordParser p(line);
  p.CheckKeys(j, "", {"sample_id", "n_nodes", "links", "paths"});

  NetworkSample s;
  const Json& id = p.Field(j, "", "sample_id");
  if (!id.is_string()) p.Fail("sample_id", "expected a string");
  s.sample_id = id.get<std::string>();
  s.n_nodes = p.Int(j, "", "n_nodes");

  const Json& links = p.Field(j, "", "links");
  if (!links.is_array()) p.Fail("links", "expected an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string at = "links[" + std::to_string(i) + "]";
    const Json& lj = links[i];
    p.CheckKeys(lj, at,
                {"id", "src", "dst", "capacity", "buffer_pkts", "queue_size_bits"});
    Link l;
    l.id = p.Int(lj, at, "id");
    l.src = p.Int(lj, at, "src");
    l.dst = p.Int(lj, at, "dst");
    l.capacity = p.Number(lj, at, "capacity");
    l.buffer_pkts = p.Int(lj, at, "buffer_pkts");
    l.queue_size_bits = p.Number(lj, at, "queue_size_bits");
    s.links.push_back(l);
  }

  const Json& paths = p.Field(j, "", "paths");
  if (!paths.is_array()) p.Fail("paths", "expected an array");
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::string at = "paths[" + std::to_string(i) + "]";
    const Json& pj = paths[i];
    p.CheckKeys(pj, at, {"id", "link_seq", "traffic", "label_delay"});
    PathFlow f;
    f.id = p.Int(pj, at, "id");
    const Json& seq = p.Field(pj, at, "link_seq");
    if (!seq.is_array()) p.Fail(at + ".link_seq", "expected an array");
    for (std::size_t k = 0; k < seq.size(); ++k) {
      f.link_seq.push_back(
          p.AsInt(seq[k], at + ".link_seq[" + std::to_string(k) + "]"));
    }
    const std::string tat = at + ".traffic";
    const Json& tj = p.Field(pj, at, "traffic");
    p.CheckKeys(tj, tat,
                {"avg_pkts_lambda", "eq_lambda", "avg_bw", "pkts_gen",
                 "total_pkts_gen"});
    f.traffic.avg_pkts_lambda = p.Number(tj, tat, "avg_pkts_lambda");
    f.traffic.eq_lambda = p.Number(tj, tat, "eq_lambda");
    f.traffic.avg_bw = p.Number(tj, tat, "avg_bw");
    f.traffic.pkts_gen = p.Number(tj, tat, "pkts_gen");
    f.traffic.total_pkts_gen = p.Number(tj, tat, "total_pkts_gen");
    if (pj.contains("label_delay")) {
      f.label_delay = p.Number(pj, at, "label_delay");
    }
    s.paths.push_back(std::move(f));
  }
  return s;
}

}  // namespace

void NetworkSample::Validate() const {
  Require(!sample_id.empty(), "sample.id_nonempty", "sample_id is empty");
  Require(n_nodes > 0, "sample.n_nodes_positive",
          "n_nodes must be positive, got " + std::to_string(n_nodes));

  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    const std::string at = "link " + std::to_string(i);
    Require(l.id == static_cast<int>(i), "link.id_dense",
            at + " has id " + std::to_string(l.id));
    Require(l.src >= 0 && l.src < n_nodes && l.dst >= 0 && l.dst < n_nodes,
            "link.node_range", at + " has an endpoint outside [0, n_nodes)");
    Require(l.src != l.dst, "link.no_self_loop", at + " has src == dst");
    Require(std::isfinite(l.capacity) && l.capacity > 0, "link.capacity_positive",
            at + " capacity must be > 0");
    Require(l.buffer_pkts >= 1, "link.buffer_positive",
            at + " buffer_pkts must be >= 1");
    Require(std::isfinite(l.queue_size_bits) && l.queue_size_bits > 0,
            "link.queue_size_positive", at + " queue_size_bits must be > 0");
  }

  const int n_links = static_cast<int>(links.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const PathFlow& p = paths[i];
    const std::string at = "path " + std::to_string(i);
    Require(p.id == static_cast<int>(i), "path.id_dense",
            at + " has id " + std::to_string(p.id));
    Require(!p.link_seq.empty(), "path.nonempty", at + " has no links");
    for (int l : p.link_seq) {
      Require(l >= 0 && l < n_links, "path.link_exists",
              at + " references missing link " + std::to_string(l));
    }
    for (std::size_t k = 1; k < p.link_seq.size(); ++k) {
      Require(links[p.link_seq[k - 1]].dst == links[p.link_seq[k]].src,
              "path.contiguous",
              at + " links " + std::to_string(p.link_seq[k - 1]) + " and " +
                  std::to_string(p.link_seq[k]) + " do not share an endpoint");
    }
    const TrafficDescriptor& t = p.traffic;
    for (double v : {t.avg_pkts_lambda, t.eq_lambda, t.avg_bw, t.pkts_gen,
                     t.total_pkts_gen}) {
      Require(std::isfinite(v) && v >= 0, "traffic.nonnegative",
              at + " has a negative or non-finite traffic field");
    }
    if (p.label_delay) {
      Require(std::isfinite(*p.label_delay) && *p.label_delay > 0,
              "path.label_positive", at + " label_delay must be > 0");
    }
  }
}

std::size_t NetworkSample::MaxPathLength() const {
  std::size_t m = 0;
  for (const PathFlow& p : paths) m = std::max(m, p.link_seq.size());
  return m;
}

NetworkSample ParseSample(const std::string& line, std::size_t line_no) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw ParseError(line_no, "", e.what());
  }
  NetworkSample s = FromJson(j, line_no);
  s.Validate();
  return s;
}

std::string SerializeSample(const NetworkSample& sample) {
  return ToJson(sample).dump();
}

NetworkSample LoadSample(std::istream& in) {
  SampleReader reader(in);
  auto s = reader.Next();
  if (!s) throw ParseError(0, "", "no sample record in stream");
  return *std::move(s);
}

void SaveSample(const NetworkSample& sample, std::ostream& out) {
  out << SerializeSample(sample) << '\n';
  if (!out) throw IoError("failed writing sample '" + sample.sample_id + "'");
}

std::optional<NetworkSample> SampleReader::Next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return ParseSample(line, line_);
  }
  return std::nullopt;
}

std::vector<NetworkSample> ReadSamplesFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  SampleReader reader(in);
  std::vector<NetworkSample> out;
  while (auto s = reader.Next()) out.push_back(*std::move(s));
  return out;
}

void WriteSamplesFile(const std::string& path,
                      const std::vector<NetworkSample>& samples) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const NetworkSample& s : samples) SaveSample(s, out);
}

}  // namespace qtroute
