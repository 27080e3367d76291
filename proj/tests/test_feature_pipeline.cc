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
#include <random>

#include "fixtures.h"
#include "qtroute/errors.h"
#include "qtroute/feature_pipeline.h"
#include "temp_dir.h"

namespace qtroute {
namespace {

using testing::TempDir;

std::vector<NetworkSample> RandomDataset(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<NetworkSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(testing::RandomSample(rng, "s" + std::to_string(100 + i)));
  }
  return out;
}

ConvertOptions Options(const std::vector<std::string>& inputs, const std::string& out,
                       std::size_t workers) {
  ConvertOptions o;
  for (const auto& i : inputs) o.inputs.emplace_back(i);
  o.output_dir = out;
  o.workers = workers;
  return o;
}

TEST_CASE("transform_raw rescales by the path's own lambda") {
  NetworkSample s = testing::MinimalSample();
  s.paths[0].traffic = testing::MakeTraffic(4.0, 2.0);
  const EntityFeatures f = TransformRaw(s);
  CHECK(f.path_columns[3] == "pkts_gen");
  CHECK(f.path(0, 0) == 1.0);
  CHECK(f.path(0, 3) == 2.0);
  CHECK(f.path(0, 4) == 0.0);
  CHECK(f.link(0, 0) == doctest::Approx(1000.0 / 2.0));
  CHECK(f.node.rows == 2);

  s.paths[0].traffic.avg_pkts_lambda = 0.0;
  try {
    TransformRaw(s);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.invariant() == "traffic.avg_pkts_lambda_positive");
  }
}

TEST_CASE("link divisor averages crossing paths") {
  NetworkSample s = testing::LineSample(3, 0.5);
  // Paths: [0], [0,1], [1].
  s.paths[0].traffic.avg_pkts_lambda = 1.0;
  s.paths[1].traffic.avg_pkts_lambda = 3.0;
  s.paths[2].traffic.avg_pkts_lambda = 5.0;
  const EntityFeatures f = TransformRaw(s);
  CHECK(f.link(0, 0) == doctest::Approx(1000.0 / 2.0));
  CHECK(f.link(1, 0) == doctest::Approx(1000.0 / 4.0));
}

EntityFeatures OneColumn(double v) {
  EntityFeatures f;
  f.path_columns = {"x"};
  f.link_columns = {"c"};
  f.node_columns = {"zero"};
  f.path = Matrix(1, 1);
  f.path(0, 0) = v;
  f.link = Matrix(1, 1);
  f.link(0, 0) = 7.0;
  f.node = Matrix(1, 1);
  return f;
}

TEST_CASE("standardizer on two samples") {
  const std::vector<EntityFeatures> train = {OneColumn(0.0), OneColumn(2.0)};
  const Standardizer st = FitStandardizer(train);
  CHECK(st.Stats(EntityType::kPath)[0].mean == 1.0);
  CHECK(st.Stats(EntityType::kPath)[0].std == 1.0);
  CHECK_FALSE(st.Stats(EntityType::kPath)[0].passthrough);
  CHECK(st.Stats(EntityType::kLink)[0].passthrough);
  CHECK(st.Stats(EntityType::kNode)[0].passthrough);

  EntityFeatures f = OneColumn(2.0);
  st.Apply(f);
  CHECK(f.path(0, 0) == 1.0);
  CHECK(f.link(0, 0) == 7.0);  // constant column untouched
  CHECK(f.node(0, 0) == 0.0);

  CHECK_THROWS_AS(FitStandardizer(std::vector<EntityFeatures>{OneColumn(1.0)}), DomainError);
}

TEST_CASE("standardizer refit is bit-identical and JSON round trips") {
  std::vector<EntityFeatures> train;
  for (const NetworkSample& s : RandomDataset(50, 8)) train.push_back(TransformRaw(s));
  const Standardizer a = FitStandardizer(train);
  const Standardizer b = FitStandardizer(train);
  CHECK(a == b);
  CHECK(a.ToJson() == b.ToJson());
  const Standardizer c = Standardizer::FromJson(a.ToJson());
  CHECK(c == a);
  CHECK_THROWS_AS(Standardizer::FromJson("{\"version\": 2}"), ParseError);
  CHECK_THROWS_AS(Standardizer::FromJson("not json"), ParseError);

  EntityFeatures wrong = OneColumn(1.0);
  CHECK_THROWS_AS(a.Apply(wrong), DimensionError);
}

TEST_CASE("property: standardized training columns have mean 0 and std 1") {
  std::vector<EntityFeatures> train;
  for (const NetworkSample& s : RandomDataset(80, 31)) train.push_back(TransformRaw(s));
  const Standardizer st = FitStandardizer(train);
  for (EntityFeatures& f : train) st.Apply(f);

  auto check = [&](EntityType t, auto get) {
    const auto& stats = st.Stats(t);
    for (std::size_t c = 0; c < stats.size(); ++c) {
      if (stats[c].passthrough) continue;
      double n = 0, sum = 0, sq = 0;
      for (const EntityFeatures& f : train) {
        const Matrix& m = get(f);
        for (std::size_t r = 0; r < m.rows; ++r) {
          n += 1;
          sum += m(r, c);
          sq += m(r, c) * m(r, c);
        }
      }
      const double mean = sum / n;
      CHECK(std::abs(mean) < 1e-9);
      CHECK(std::abs(std::sqrt(sq / n - mean * mean) - 1.0) < 1e-9);
    }
  };
  check(EntityType::kPath, [](const EntityFeatures& f) -> const Matrix& { return f.path; });
  check(EntityType::kLink, [](const EntityFeatures& f) -> const Matrix& { return f.link; });
  // Total packets are zeroed, so that column never scales.
  CHECK(st.Stats(EntityType::kPath)[4].passthrough);
}

TEST_CASE("convert writes one bundle per sample") {
  TempDir dir;
  WriteSamplesFile(dir / "in.jsonl", RandomDataset(10, 2));
  const ConversionReport r = ConvertDataset(Options({dir / "in.jsonl"}, dir / "out", 4));
  CHECK(r.total == 10);
  CHECK(r.converted == 10);
  CHECK(r.failures.empty());
  std::size_t bundles = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path() / "out" / "samples")) {
    bundles += e.path().extension() == ".bundle";
  }
  CHECK(bundles == 10);
  CHECK(std::filesystem::exists(dir.path() / "out" / "manifest.json"));
  CHECK(std::filesystem::exists(dir.path() / "out" / "stats.json"));
  CHECK(std::filesystem::exists(dir.path() / "out" / "report.json"));
}

TEST_CASE("convert skips a corrupt record and reports it") {
  TempDir dir;
  const auto samples = RandomDataset(10, 3);
  std::string text;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    text += (i == 6 ? std::string("{\"sample_id\": \"broken\", \"n_nodes\": ") : SerializeSample(samples[i]));
    text += '\n';
  }
  testing::WriteFile(dir.path() / "in.jsonl", text);
  const ConversionReport r = ConvertDataset(Options({dir / "in.jsonl"}, dir / "out", 2));
  CHECK(r.total == 10);
  CHECK(r.converted == 9);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].line == 7);
  CHECK(testing::ReadFile(dir.path() / "out" / "report.json").find("\"failed\": 1") !=
        std::string::npos);
}

TEST_CASE("convert rejects duplicate sample ids after the first") {
  TempDir dir;
  auto samples = RandomDataset(3, 5);
  samples[2].sample_id = samples[0].sample_id;
  WriteSamplesFile(dir / "in.jsonl", samples);
  const ConversionReport r = ConvertDataset(Options({dir / "in.jsonl"}, dir / "out", 1));
  CHECK(r.converted == 2);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].line == 3);
}

TEST_CASE("convert output is independent of worker count and input order") {
  TempDir dir;
  const auto samples = RandomDataset(24, 11);
  WriteSamplesFile(dir / "a.jsonl", {samples.begin(), samples.begin() + 12});
  WriteSamplesFile(dir / "b.jsonl", {samples.begin() + 12, samples.end()});
  std::vector<NetworkSample> shuffled = samples;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(99));
  WriteSamplesFile(dir / "shuffled.jsonl", shuffled);

  ConvertDataset(Options({dir / "a.jsonl", dir / "b.jsonl"}, dir / "w1", 1));
  ConvertDataset(Options({dir / "b.jsonl", dir / "a.jsonl"}, dir / "w8", 8));
  ConvertDataset(Options({dir / "shuffled.jsonl"}, dir / "shuf", 3));
  const auto w1 = testing::Snapshot(dir.path() / "w1");
  CHECK(w1.size() == 24 + 2);
  CHECK(w1 == testing::Snapshot(dir.path() / "w8"));
  CHECK(w1 == testing::Snapshot(dir.path() / "shuf"));
}

TEST_CASE("reused statistics and physical baseline delays") {
  TempDir dir;
  const auto samples = RandomDataset(6, 13);
  WriteSamplesFile(dir / "train.jsonl", samples);
  ConvertDataset(Options({dir / "train.jsonl"}, dir / "train", 1));

  WriteSamplesFile(dir / "one.jsonl", {samples[0]});
  ConvertOptions o = Options({dir / "one.jsonl"}, dir / "test", 1);
  o.stats_path = dir.path() / "train" / "stats.json";
  const ConversionReport r = ConvertDataset(o);
  CHECK(r.converted == 1);
  const std::string stem = "samples/" + samples[0].sample_id + ".bundle";
  CHECK(testing::ReadFile(dir.path() / "train" / stem) ==
        testing::ReadFile(dir.path() / "test" / stem));

  const Standardizer st = Standardizer::Load(dir / "train/stats.json");
  const GraphBundle b = MakeBundle(samples[0], st, GraphBuildOptions{});
  const QTFeatureSet raw = ExtractFeatures(samples[0], QTConfig::ForVariant(ModelVariant::kM1),
                                           ModelVariant::kM1);
  CHECK(b.qt.b_path == raw.b_path);
  CHECK(b.qt.b_link == raw.b_link);

  // Fewer than two samples cannot be fitted without supplied statistics.
  CHECK_THROWS_AS(ConvertDataset(Options({dir / "one.jsonl"}, dir / "lonely", 1)), DomainError);
}

}  // namespace
}  // namespace qtroute
