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

#ifndef QTROUTE_NET_MODEL_H_
#define QTROUTE_NET_MODEL_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qtroute {

// A directed link l_i. Buffers are counted in packets, queue_size_bits is the
// buffer expressed in bits (mean packet size = queue_size_bits / buffer_pkts).
struct Link {
  int id = 0;
  int src = 0;
  int dst = 0;
  double capacity = 0.0;  // bits per time unit
  int buffer_pkts = 0;
  double queue_size_bits = 0.0;

  double MeanPacketBits() const { return queue_size_bits / buffer_pkts; }
  // Service rate in packets per time unit.
  double ServiceRate() const { return capacity / MeanPacketBits(); }

  friend bool operator==(const Link&, const Link&) = default;
};

struct TrafficDescriptor {
  double avg_pkts_lambda = 0.0;  // packets of average size per time unit
  double eq_lambda = 0.0;        // bits per time unit
  double avg_bw = 0.0;           // bits per time unit
  double pkts_gen = 0.0;         // packets per time unit, the path demand A_k
  double total_pkts_gen = 0.0;   // packets over the whole simulation

  friend bool operator==(const TrafficDescriptor&,
                         const TrafficDescriptor&) = default;
};

struct PathFlow {
  int id = 0;
  std::vector<int> link_seq;
  TrafficDescriptor traffic;
  std::optional<double> label_delay;

  friend bool operator==(const PathFlow&, const PathFlow&) = default;
};

struct NetworkSample {
  std::string sample_id;
  int n_nodes = 0;
  std::vector<Link> links;
  std::vector<PathFlow> paths;

  // Throws ValidationError naming the first broken invariant.
  void Validate() const;

  std::size_t MaxPathLength() const;

  friend bool operator==(const NetworkSample&, const NetworkSample&) = default;
};

// Parses one JSON-Lines record. `line_no` is only used for diagnostics.
// Throws ParseError on malformed text and ValidationError on invariant
// violations.
NetworkSample ParseSample(const std::string& line, std::size_t line_no = 0);

// Canonical single-line serialization (no trailing newline).
std::string SerializeSample(const NetworkSample& sample);

// Reads the next non-blank line of `in` as a sample.
NetworkSample LoadSample(std::istream& in);

// Writes the canonical record followed by '\n'. Throws IoError if the stream
// goes bad.
void SaveSample(const NetworkSample& sample, std::ostream& out);

// Streams samples from a JSON-Lines source one record at a time.
class SampleReader {
 public:
  explicit SampleReader(std::istream& in) : in_(in) {}

  // Returns std::nullopt at end of stream. Blank lines are skipped.
  std::optional<NetworkSample> Next();

  // Line number of the most recently returned record.
  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

// Reads every sample of a JSON-Lines file.
std::vector<NetworkSample> ReadSamplesFile(const std::string& path);
void WriteSamplesFile(const std::string& path,
                      const std::vector<NetworkSample>& samples);

}  // namespace qtroute

#endif  // QTROUTE_NET_MODEL_H_
