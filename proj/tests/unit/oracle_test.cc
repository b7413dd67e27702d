// Copyright 2026 The layerga Authors.
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

#include "layerga/oracle.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "layerga/error.hpp"
#include "layerga/external_evaluator.hpp"
#include "support/test_util.hpp"

namespace layerga {
namespace {

using testing::CountingEvaluator;

TEST(SpaceSizeTest, Counts) {
  EXPECT_EQ(space_size(0), 1u);
  EXPECT_EQ(space_size(1), 3u);
  EXPECT_EQ(space_size(30), 496u);
  EXPECT_EQ(space_size(156), 12403u);
  EXPECT_EQ(all_windows(30).size(), 496u);
}

TEST(SpaceSizeTest, LexicographicOrder) {
  const auto w = all_windows(2);
  const std::vector<Window> expected{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
  EXPECT_EQ(w, expected);
}

TEST(OracleTest, DefaultLandscapeBest) {
  SyntheticEvaluator ev(SyntheticLandscape::default_unimodal());
  const auto r = enumerate_best(ev, OracleOptions{});
  EXPECT_EQ(r.best.window, (Window{130, 150}));
  EXPECT_NEAR(r.best.accuracy, 0.965323421862109, 1e-12);
  EXPECT_NEAR(r.best.fitness, 0.865323421862109, 1e-12);
  EXPECT_EQ(r.enumerated, 12403u);
  EXPECT_TRUE(r.table.empty());
}

TEST(OracleTest, FlatLandscapePrefersNarrowestSmallest) {
  SyntheticEvaluator ev(SyntheticLandscape::flat());
  const auto r = enumerate_best(ev, OracleOptions{});
  EXPECT_EQ(r.best.window, (Window{0, 0}));
  EXPECT_NEAR(r.best.fitness, 0.5, 1e-12);
}

TEST(OracleTest, TableFixture) {
  TableEvaluator ev(load_accuracy_table(testing::fixture("fixture3.csv")));
  const auto r = enumerate_best(ev, OracleOptions{});
  EXPECT_EQ(r.best.window, (Window{147, 151}));
  EXPECT_NEAR(r.best.fitness, 0.93, 1e-12);
  EXPECT_EQ(r.enumerated, 3u);
}

TEST(OracleTest, EvaluatesEveryWindowOnce) {
  auto inner = std::make_shared<CountingEvaluator>(SyntheticLandscape::default_unimodal());
  OracleOptions opt;
  opt.l_max = 30;
  opt.keep_table = true;
  const auto r = enumerate_best(*inner, opt);
  EXPECT_EQ(inner->calls(), 496u);
  EXPECT_EQ(r.table.size(), 496u);
  for (const auto& row : r.table) EXPECT_LE(row.fitness, r.best.fitness);
}

TEST(OracleTest, ParallelMatchesSerial) {
  SyntheticEvaluator ev(SyntheticLandscape::default_bimodal());
  OracleOptions opt;
  opt.keep_table = true;
  const auto serial = enumerate_best(ev, opt);
  opt.jobs = 4;
  const auto parallel = enumerate_best(ev, opt);
  EXPECT_EQ(serial.best.window, parallel.best.window);
  ASSERT_EQ(serial.table.size(), parallel.table.size());
  for (std::size_t i = 0; i < serial.table.size(); ++i) {
    EXPECT_EQ(serial.table[i].fitness, parallel.table[i].fitness);
  }
}

TEST(OracleTest, RefusesNonDeterministic) {
  CountingEvaluator ev(SyntheticLandscape::default_unimodal(), false);
  EXPECT_THROW(enumerate_best(ev, OracleOptions{}), ConfigError);
}

class ThrowingEvaluator final : public Evaluator {
 public:
  double accuracy(const Window& w) override {
    if (w == Window{3, 7}) throw Error("boom");
    return 0.5;
  }
  bool deterministic() const override { return true; }
  std::string describe() const override { return "throwing"; }
};

TEST(OracleTest, ThrownErrorAborts) {
  ThrowingEvaluator ev;
  OracleOptions opt;
  opt.l_max = 10;
  EXPECT_THROW(enumerate_best(ev, opt), EvaluatorFailure);
}

TEST(OracleTest, ErrorResponseNamesWindow) {
  // (3,7) is request 34 in lexicographic order at l_max 10.
  ExternalEvaluator ev(std::string(LAYERGA_FAKE_WORKER) + " --error-id 34");
  OracleOptions opt;
  opt.l_max = 10;
  try {
    enumerate_best(ev, opt);
    FAIL() << "expected EvaluatorFailure";
  } catch (const EvaluatorFailure& e) {
    EXPECT_NE(std::string(e.what()).find("(3,7)"), std::string::npos) << e.what();
  }
}

TEST(OracleTest, TableCsv) {
  std::ostringstream out;
  write_oracle_table(out, {{{1, 2}, 0.5, 0.495}});
  EXPECT_EQ(out.str(), "l_start,l_end,accuracy,fitness\n1,2,0.5,0.495\n");
}

}  // namespace
}  // namespace layerga
