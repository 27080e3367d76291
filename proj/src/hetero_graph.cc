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

#include "qtroute/hetero_graph.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qtroute/errors.h"
#include "text_util.h"

namespace qtroute {
namespace {

constexpr const char* kBundleMagic = "#qtroute-bundle 1";

void CheckRows(const Matrix& m, std::size_t expected, const char* what) {
  if (m.rows != expected) {
    throw DimensionError(std::string(what) + " features have " +
                         std::to_string(m.rows) + " rows, expected " +
                         std::to_string(expected));
  }
  if (m.data.size() != m.rows * m.cols) {
    throw DimensionError(std::string(what) + " feature matrix storage is inconsistent");
  }
}

void WriteRow(std::ostream& out, std::span<const double> values) {
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (c) out << ',';
    out << detail::FormatDouble(values[c]);
  }
}

void WriteEdges(std::ostream& out, const std::string& name,
                const std::vector<Edge>& edges) {
  out << '@' << name << "\nsrc_row,dst_row\n";
  for (const auto& [s, d] : edges) out << s << ',' << d << '\n';
}

}  // namespace

std::string ToString(EdgeType t) {
  static constexpr const char* kNames[] = {"PL", "LP", "PN", "NP", "LN", "NL"};
  return kNames[static_cast<std::size_t>(t)];
}

HiddenWidths HiddenWidths::ForVariant(ModelVariant v) {
  if (v == ModelVariant::kM1) return {64, 64, 64};
  return {8, 8, 0};
}

EntityType HeteroGraph::RowType(int row) const {
  if (row < 0 || static_cast<std::size_t>(row) >= NumRows()) {
    throw DimensionError("row " + std::to_string(row) + " out of range");
  }
  if (static_cast<std::size_t>(row) < n_paths) return EntityType::kPath;
  if (static_cast<std::size_t>(row) < n_paths + n_links) return EntityType::kLink;
  return EntityType::kNode;
}

std::vector<std::vector<Edge>> SeparateEdgeTimeSteps(const NetworkSample& sample) {
  const std::size_t n_paths = sample.paths.size();
  std::vector<std::vector<Edge>> steps(sample.MaxPathLength());
  for (std::size_t k = 0; k < n_paths; ++k) {
    const auto& seq = sample.paths[k].link_seq;
    for (std::size_t j = 0; j < seq.size(); ++j) {
      steps[j].emplace_back(static_cast<int>(n_paths + seq[j]), static_cast<int>(k));
    }
  }
  for (auto& s : steps) std::sort(s.begin(), s.end());
  return steps;
}

HeteroGraph BuildGraph(const NetworkSample& sample, const EntityFeatures& features,
                       const HiddenWidths& hidden_widths) {
  HeteroGraph g;
  g.n_paths = sample.paths.size();
  g.n_links = sample.links.size();
  g.n_nodes = static_cast<std::size_t>(sample.n_nodes);
  CheckRows(features.path, g.n_paths, "path");
  CheckRows(features.link, g.n_links, "link");
  CheckRows(features.node, g.n_nodes, "node");
  if (hidden_widths.path < 0 || hidden_widths.link < 0 || hidden_widths.node < 0) {
    throw DimensionError("hidden widths must be non-negative");
  }

  g.fixed_widths = {features.path.cols, features.link.cols, features.node.cols};
  const std::size_t fixed_cols =
      g.fixed_widths[0] + g.fixed_widths[1] + g.fixed_widths[2];
  g.x_fixed = Matrix(g.NumRows(), fixed_cols);
  auto place = [&](const Matrix& m, std::size_t row0, std::size_t col0) {
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t c = 0; c < m.cols; ++c) g.x_fixed(row0 + r, col0 + c) = m(r, c);
    }
  };
  place(features.path, 0, 0);
  place(features.link, g.n_paths, g.fixed_widths[0]);
  place(features.node, g.n_paths + g.n_links, g.fixed_widths[0] + g.fixed_widths[1]);

  g.hidden_widths = hidden_widths;
  g.x_hidden = Matrix(g.NumRows(), static_cast<std::size_t>(
                                       hidden_widths.path + hidden_widths.link +
                                       hidden_widths.node));

  auto& pl = g.edges[static_cast<std::size_t>(EdgeType::kPL)];
  auto& lp = g.edges[static_cast<std::size_t>(EdgeType::kLP)];
  auto& pn = g.edges[static_cast<std::size_t>(EdgeType::kPN)];
  auto& np = g.edges[static_cast<std::size_t>(EdgeType::kNP)];
  auto& ln = g.edges[static_cast<std::size_t>(EdgeType::kLN)];
  auto& nl = g.edges[static_cast<std::size_t>(EdgeType::kNL)];

  for (std::size_t k = 0; k < g.n_paths; ++k) {
    const auto& seq = sample.paths[k].link_seq;
    const int prow = g.PathRow(k);
    std::set<int> nodes;
    nodes.insert(sample.links[seq.front()].src);
    for (int l : seq) {
      pl.emplace_back(prow, g.LinkRow(l));
      lp.emplace_back(g.LinkRow(l), prow);
      nodes.insert(sample.links[l].dst);
    }
    for (int n : nodes) {
      pn.emplace_back(prow, g.NodeRow(n));
      np.emplace_back(g.NodeRow(n), prow);
    }
  }
  for (std::size_t l = 0; l < g.n_links; ++l) {
    const Link& link = sample.links[l];
    for (int n : {link.src, link.dst}) {
      ln.emplace_back(g.LinkRow(l), g.NodeRow(n));
      nl.emplace_back(g.NodeRow(n), g.LinkRow(l));
    }
  }
  for (auto& e : g.edges) std::sort(e.begin(), e.end());

  g.elp_steps = SeparateEdgeTimeSteps(sample);
  return g;
}

std::string SerializeBundle(const GraphBundle& b) {
  const HeteroGraph& g = b.graph;
  const QTFeatureSet& qt = b.qt;
  if (qt.b_path.size() != g.n_paths ||
      qt.b_link.size() != g.n_links * static_cast<std::size_t>(qt.b_link_width) ||
      b.link_capacity.size() != g.n_links || b.link_queue_size_bits.size() != g.n_links ||
      b.labels.size() != g.n_paths) {
    throw DimensionError("bundle parts disagree on entity counts");
  }

  std::ostringstream out;
  out << kBundleMagic << '\n';
  out << "@meta\nkey,value\n"
      << "sample_id," << b.sample_id << '\n'
      << "variant," << ToString(b.variant) << '\n'
      << "n_paths," << g.n_paths << '\n'
      << "n_links," << g.n_links << '\n'
      << "n_nodes," << g.n_nodes << '\n'
      << "fixed_path," << g.fixed_widths[0] << '\n'
      << "fixed_link," << g.fixed_widths[1] << '\n'
      << "fixed_node," << g.fixed_widths[2] << '\n'
      << "baseline_path," << 1 << '\n'
      << "baseline_link," << qt.b_link_width << '\n'
      << "hidden_path," << g.hidden_widths.path << '\n'
      << "hidden_link," << g.hidden_widths.link << '\n'
      << "hidden_node," << g.hidden_widths.node << '\n'
      << "num_elp_steps," << g.elp_steps.size() << '\n';

  auto hidden_header = [&](const char* prefix, int width) {
    for (int h = 0; h < width; ++h) out << ',' << prefix << h;
    out << '\n';
  };
  auto hidden_zeros = [&](int width) {
    for (int h = 0; h < width; ++h) out << ",0";
    out << '\n';
  };
  auto fixed_row = [&](std::size_t row, std::size_t col0, std::size_t width) {
    WriteRow(out, std::span<const double>(g.x_fixed.data.data() + row * g.x_fixed.cols + col0,
                                          width));
  };

  out << "@x_path\n";
  for (const auto& c : b.features.path_columns) out << c << ',';
  out << "baseline_delay";
  hidden_header("ph", g.hidden_widths.path);
  for (std::size_t k = 0; k < g.n_paths; ++k) {
    fixed_row(g.PathRow(k), 0, g.fixed_widths[0]);
    if (g.fixed_widths[0]) out << ',';
    out << detail::FormatDouble(qt.b_path[k]);
    hidden_zeros(g.hidden_widths.path);
  }

  out << "@x_link\n";
  for (const auto& c : b.features.link_columns) out << c << ',';
  out << (qt.b_link_width == 3 ? "pi0,rho,L" : "L");
  hidden_header("lh", g.hidden_widths.link);
  for (std::size_t l = 0; l < g.n_links; ++l) {
    fixed_row(g.LinkRow(l), g.fixed_widths[0], g.fixed_widths[1]);
    if (g.fixed_widths[1]) out << ',';
    WriteRow(out, qt.LinkRow(l));
    hidden_zeros(g.hidden_widths.link);
  }

  out << "@x_node\n";
  for (std::size_t c = 0; c < b.features.node_columns.size(); ++c) {
    if (c) out << ',';
    out << b.features.node_columns[c];
  }
  hidden_header("nh", g.hidden_widths.node);
  for (std::size_t n = 0; n < g.n_nodes; ++n) {
    fixed_row(g.NodeRow(n), g.fixed_widths[0] + g.fixed_widths[1], g.fixed_widths[2]);
    hidden_zeros(g.hidden_widths.node);
  }

  out << "@link_phys\nlink_id,capacity,queue_size_bits\n";
  for (std::size_t l = 0; l < g.n_links; ++l) {
    out << l << ',' << detail::FormatDouble(b.link_capacity[l]) << ','
        << detail::FormatDouble(b.link_queue_size_bits[l]) << '\n';
  }

  out << "@labels\npath_id,label_delay\n";
  for (std::size_t k = 0; k < g.n_paths; ++k) {
    out << k << ',';
    if (!std::isnan(b.labels[k])) out << detail::FormatDouble(b.labels[k]);
    out << '\n';
  }

  for (std::size_t t = 0; t < kNumEdgeTypes; ++t) {
    WriteEdges(out, "edges_" + ToString(static_cast<EdgeType>(t)), g.edges[t]);
  }

  out << "@elp_steps\nstep,offset,count\n";
  std::size_t offset = 0;
  for (std::size_t s = 0; s < g.elp_steps.size(); ++s) {
    out << s << ',' << offset << ',' << g.elp_steps[s].size() << '\n';
    offset += g.elp_steps[s].size();
  }
  out << "@elp_edges\nsrc_row,dst_row\n";
  for (const auto& step : g.elp_steps) {
    for (const auto& [s, d] : step) out << s << ',' << d << '\n';
  }
  return out.str();
}

void WriteBundle(const std::string& path, const GraphBundle& bundle) {
  const std::string text = SerializeBundle(bundle);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

std::vector<BundleSection> ParseBundleSections(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kBundleMagic) {
    throw ParseError(1, "", "not a qtroute bundle");
  }
  std::vector<BundleSection> out;
  std::size_t line_no = 1;
  bool want_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line[0] == '@') {
      out.push_back(BundleSection{line.substr(1), {}, {}});
      want_header = true;
      continue;
    }
    if (out.empty()) throw ParseError(line_no, "", "data before first section");
    std::vector<std::string> cells;
    if (out.back().name == "meta" && !want_header) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw ParseError(line_no, "meta", "expected key,value");
      cells = {line.substr(0, comma), line.substr(comma + 1)};
    } else {
      for (auto sv : detail::SplitCsv(line)) cells.emplace_back(sv);
    }
    if (want_header) {
      out.back().header = std::move(cells);
      want_header = false;
    } else {
      if (cells.size() != out.back().header.size()) {
        throw ParseError(line_no, out.back().name, "row width differs from header");
      }
      out.back().rows.push_back(std::move(cells));
    }
  }
  return out;
}

}  // namespace qtroute
