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

#ifndef QTROUTE_HETERO_GRAPH_H_
#define QTROUTE_HETERO_GRAPH_H_

// Path/link/node heterogeneous graph. Rows are numbered globally: paths first,
// then links, then nodes. Each entity type owns a block of fixed columns and
// a block of hidden columns; a row is zero outside its own blocks.

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qtroute/net_model.h"
#include "qtroute/qt_engine.h"

namespace qtroute {

enum class EntityType { kPath = 0, kLink = 1, kNode = 2 };

// Directed edge families. PL is path->link, LP is link->path, and so on.
enum class EdgeType { kPL = 0, kLP, kPN, kNP, kLN, kNL };
inline constexpr std::size_t kNumEdgeTypes = 6;
std::string ToString(EdgeType t);

using Edge = std::pair<int, int>;  // (src_row, dst_row)

// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// Fixed feature rows per entity type, before they are placed into the graph.
struct EntityFeatures {
  Matrix path;  // one row per path
  Matrix link;  // one row per link
  Matrix node;  // one row per node
  std::vector<std::string> path_columns;
  std::vector<std::string> link_columns;
  std::vector<std::string> node_columns;
};

struct HiddenWidths {
  int path = 0;
  int link = 0;
  int node = 0;

  static HiddenWidths ForVariant(ModelVariant v);
};

struct HeteroGraph {
  std::size_t n_paths = 0;
  std::size_t n_links = 0;
  std::size_t n_nodes = 0;
  // Column layout of x_fixed: [X_P | X_L | X_N].
  std::array<std::size_t, 3> fixed_widths{};
  Matrix x_fixed;
  HiddenWidths hidden_widths;
  // Layout [X_Ph | X_Lh | X_Nh], zero on construction.
  Matrix x_hidden;
  std::array<std::vector<Edge>, kNumEdgeTypes> edges;
  // elp_steps[k] holds the link->path edges whose link is at position k of
  // its path (0-based).
  std::vector<std::vector<Edge>> elp_steps;

  std::size_t NumRows() const { return n_paths + n_links + n_nodes; }
  int PathRow(std::size_t k) const { return static_cast<int>(k); }
  int LinkRow(std::size_t l) const { return static_cast<int>(n_paths + l); }
  int NodeRow(std::size_t n) const { return static_cast<int>(n_paths + n_links + n); }
  EntityType RowType(int row) const;
  // Node rows take part in message passing only when they carry hidden state.
  bool UsesNodes() const { return hidden_widths.node > 0; }

  const std::vector<Edge>& Edges(EdgeType t) const {
    return edges[static_cast<std::size_t>(t)];
  }
};

// Throws DimensionError when feature rows do not match entity counts.
HeteroGraph BuildGraph(const NetworkSample& sample, const EntityFeatures& features,
                       const HiddenWidths& hidden_widths);

std::vector<std::vector<Edge>> SeparateEdgeTimeSteps(const NetworkSample& sample);

// Everything the learned stage needs for one sample.
struct GraphBundle {
  std::string sample_id;
  ModelVariant variant = ModelVariant::kM1;
  HeteroGraph graph;
  EntityFeatures features;  // standardized fixed columns, for column names
  QTFeatureSet qt;
  std::vector<double> link_capacity;
  std::vector<double> link_queue_size_bits;
  std::vector<double> labels;  // NaN where the path has no label
};

// Text bundle; see docs/formats.md. Output is a pure function of the bundle.
std::string SerializeBundle(const GraphBundle& bundle);
void WriteBundle(const std::string& path, const GraphBundle& bundle);

// Sections of a bundle as parsed back from text, keyed by section name.
struct BundleSection {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
std::vector<BundleSection> ParseBundleSections(const std::string& text);

}  // namespace qtroute

#endif  // QTROUTE_HETERO_GRAPH_H_
