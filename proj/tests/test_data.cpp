/*
 * Copyright 2026 The ecc-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "ecc/data.hpp"

using namespace ecc;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("ecc_test_" + name);
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("generate_blobs: counts, determinism, bounds, errors") {
  const auto d = generate_blobs(1, 2, 2, 5, 0.05);
  CHECK(d.size() == 10);
  CHECK(d.dim() == 2);
  CHECK(std::count(d.labels.begin(), d.labels.end(), 0) == 5);
  CHECK(std::count(d.labels.begin(), d.labels.end(), 1) == 5);

  const auto again = generate_blobs(1, 2, 2, 5, 0.05);
  CHECK(again.features == d.features);
  CHECK(again.labels == d.labels);
  CHECK(generate_blobs(2, 2, 2, 5, 0.05).features != d.features);

  const auto wide = generate_blobs(3, 4, 6, 50, 2.0);
  CHECK(wide.features.minCoeff() >= 0.0);
  CHECK(wide.features.maxCoeff() <= 1.0);

  CHECK_THROWS_AS(generate_blobs(1, 1, 2, 5, 0.1), ArgumentError);
  CHECK_THROWS_AS(generate_blobs(1, 2, 0, 5, 0.1), ArgumentError);
  CHECK_THROWS_AS(generate_blobs(1, 2, 2, 0, 0.1), ArgumentError);
  CHECK_THROWS_AS(generate_blobs(1, 2, 2, 5, 0.0), ArgumentError);
}

TEST_CASE("load_csv: direct parse") {
  const auto d = load_csv(temp_file("ok.csv", "0,0.1,0.2\n1,0.9,0.8\n"));
  CHECK(d.size() == 2);
  CHECK(d.dim() == 2);
  CHECK(d.num_classes == 2);
  CHECK(d.features(1, 0) == 0.9);
  CHECK(d.labels == std::vector<int>{0, 1});
}

TEST_CASE("load_csv: errors name the offending row") {
  try {
    load_csv(temp_file("ragged.csv", "0,0.1\n1,0.1,0.2\n"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(load_csv(temp_file("label.csv", "0,0.1\nx,0.2\n")), ParseError);
  CHECK_THROWS_AS(load_csv(temp_file("label2.csv", "1.5,0.1\n")), ParseError);
  CHECK_THROWS_AS(load_csv(temp_file("feat.csv", "0,abc\n")), ParseError);
  CHECK_THROWS_AS(load_csv(temp_file("empty.csv", "")), ArgumentError);
  CHECK_THROWS_AS(load_csv(std::filesystem::temp_directory_path() / "ecc_test_missing_file.csv"), ArgumentError);
}

TEST_CASE("CSV round trip preserves samples") {
  const auto d = generate_blobs(7, 3, 5, 20, 0.2);
  const auto path = std::filesystem::temp_directory_path() / "ecc_test_roundtrip.csv";
  save_csv(d, path);
  const auto back = load_csv(path);
  CHECK(back.labels == d.labels);
  CHECK(back.num_classes == d.num_classes);
  CHECK((back.features - d.features).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("make_task_stream: split rule examples") {
  const auto d8 = generate_blobs(1, 8, 3, 10, 0.1);
  const auto s = make_task_stream(d8, 4, 2, 0.2, 5);
  REQUIRE(s.size() == 3);
  CHECK(s.splits[0].class_ids.size() == 4);
  CHECK(s.splits[1].class_ids.size() == 2);
  CHECK(s.splits[2].class_ids.size() == 2);

  const auto s10 = make_task_stream(generate_blobs(1, 10, 3, 10, 0.1), 0, 2, 0.2, 5);
  CHECK(s10.size() == 5);
  for (const auto& t : s10.splits) CHECK(t.class_ids.size() == 2);

  CHECK_THROWS_AS(make_task_stream(d8, 3, 2, 0.2, 5), ArgumentError);
  CHECK_THROWS_AS(make_task_stream(d8, 7, 2, 0.2, 5), ArgumentError);
  CHECK_THROWS_AS(make_task_stream(d8, 4, 0, 0.2, 5), ArgumentError);
  CHECK_THROWS_AS(make_task_stream(d8, 4, 2, 1.0, 5), ArgumentError);
}

TEST_CASE("make_task_stream properties: disjoint, covering, stratified, deterministic") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int k = 6 + 2 * static_cast<int>(seed % 3);
    const auto d = generate_blobs(seed, k, 4, 7 + static_cast<int>(seed % 5), 0.1);
    const double frac = 0.1 + 0.03 * static_cast<double>(seed % 7);
    const auto s = make_task_stream(d, 2, 2, frac, seed);
    std::set<int> seen;
    for (const auto& t : s.splits) {
      for (int c : t.class_ids) CHECK(seen.insert(c).second);
      const std::set<int> own(t.class_ids.begin(), t.class_ids.end());
      for (int l : t.train.labels) CHECK(own.count(l) == 1);
      for (int l : t.test.labels) CHECK(own.count(l) == 1);
      for (int c : t.class_ids) {
        const auto total = std::count(d.labels.begin(), d.labels.end(), c);
        const auto test = std::count(t.test.labels.begin(), t.test.labels.end(), c);
        CHECK(std::abs(static_cast<double>(test) - frac * static_cast<double>(total)) <= 1.0);
        CHECK(test + std::count(t.train.labels.begin(), t.train.labels.end(), c) == total);
      }
    }
    CHECK(static_cast<int>(seen.size()) == k);

    const auto again = make_task_stream(d, 2, 2, frac, seed);
    CHECK(again.class_order == s.class_order);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(again.splits[i].train.features == s.splits[i].train.features);
  }
}

TEST_CASE("Dataset helpers") {
  const auto d = generate_blobs(4, 4, 2, 3, 0.1);
  const std::array<int, 2> keep{1, 3};
  const auto f = d.filter_classes(keep);
  CHECK(f.size() == 6);
  for (int l : f.labels) CHECK((l == 1 || l == 3));

  const std::array<Dataset, 2> parts{d, f};
  const auto c = Dataset::concat(parts);
  CHECK(c.size() == 18);
  CHECK(c.features.bottomRows(6) == f.features);

  const auto sample = d.sample(4);
  CHECK(sample.label == d.labels[4]);
  CHECK(sample.features == d.features.row(4).transpose());
}
