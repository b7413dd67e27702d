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

#include "layerga/analysis.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "layerga/error.hpp"
#include "support/test_util.hpp"

namespace layerga {
namespace {

std::vector<GradientRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_gradients(in);
}

std::set<int> layer_set(const std::vector<LayerMagnitude>& v) {
  std::set<int> out;
  for (const auto& m : v) out.insert(m.layer);
  return out;
}

TEST(GradientParseTest, Fixture) {
  const auto recs = load_gradients(testing::fixture("gradients_small.csv"));
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[1].layer, 1);
  EXPECT_EQ(recs[1].category, "dog");
  EXPECT_EQ(recs[1].value, 5.0);
}

TEST(GradientParseTest, ErrorsNameTheLine) {
  try {
    parse("layer,category,value\n1,dog,1\n2,cat,abc\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse("layer,category,value\n1,dog\n"), ParseError);
  EXPECT_THROW(parse("wrong,header\n1,dog,1\n"), ParseError);
  EXPECT_THROW(load_gradients("/nonexistent/grads.csv"), Error);
}

TEST(SummarizeTest, SmallExample) {
  const auto recs = load_gradients(testing::fixture("gradients_small.csv"));
  const auto s = summarize(recs);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].value(Statistic::kMax), 5.0);
  EXPECT_NEAR(s[0].value(Statistic::kMean), 8.0 / 3.0, 1e-12);
  EXPECT_EQ(s[0].value(Statistic::kSum), 8.0);
  EXPECT_EQ(s[0].count, 3u);
}

TEST(SummarizeTest, EmptyInput) {
  EXPECT_THROW(summarize(std::vector<GradientRecord>{}), EmptyInputError);
}

TEST(SummarizeTest, SortedByLayerThenCategory) {
  const auto s = summarize(parse("layer,category,value\n3,dog,1\n1,dog,1\n1,cat,2\n"));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].layer, 1);
  EXPECT_EQ(s[0].category, "cat");
  EXPECT_EQ(s[1].category, "dog");
  EXPECT_EQ(s[2].layer, 3);
}

TEST(SummarizeTest, PermutationInvariant) {
  auto recs = load_gradients(testing::fixture("gradients_layers.csv"));
  const auto ref = summarize(recs);
  std::mt19937 gen(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(recs.begin(), recs.end(), gen);
    const auto s = summarize(recs);
    ASSERT_EQ(s.size(), ref.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(s[i].sum_value, ref[i].sum_value);
      EXPECT_EQ(s[i].mean_value, ref[i].mean_value);
      EXPECT_EQ(s[i].max_value, ref[i].max_value);
    }
  }
}

TEST(SummarizeTest, SumOfPartsEqualsWhole) {
  const auto recs = load_gradients(testing::fixture("gradients_layers.csv"));
  const auto whole = summarize(recs);
  const std::size_t half = recs.size() / 2;
  const auto a = summarize(std::span(recs).first(half));
  const auto b = summarize(std::span(recs).subspan(half));
  for (const auto& w : whole) {
    double parts = 0.0;
    for (const auto* side : {&a, &b}) {
      for (const auto& s : *side) {
        if (s.layer == w.layer && s.category == w.category) parts += s.sum_value;
      }
    }
    EXPECT_NEAR(parts, w.sum_value, 1e-9) << w.layer << ' ' << w.category;
  }
}

TEST(SummaryCsvTest, Format) {
  const auto s = summarize(load_gradients(testing::fixture("gradients_small.csv")));
  std::ostringstream out;
  write_summary_csv(out, s);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "layer,category,max,mean,sum,count");
}

TEST(OppositionTest, FixtureFlagsExactlyThree) {
  const auto s = summarize(load_gradients(testing::fixture("gradients_layers.csv")));
  const auto r = sign_opposition(s, "dog", "cat");
  std::set<int> flagged;
  for (const auto& f : r.findings) {
    if (f.flagged) flagged.insert(f.layer);
  }
  EXPECT_EQ(flagged, (std::set<int>{114, 132, 150}));
  EXPECT_TRUE(r.skipped_layers.empty());
  EXPECT_EQ(r.findings.size(), 56u);
}

TEST(OppositionTest, ThresholdAndZero) {
  const auto s = summarize(parse(
      "layer,category,value\n1,a,2\n1,b,-2\n2,a,0.1\n2,b,-0.1\n3,a,0\n3,b,-5\n4,a,1\n"));
  auto r = sign_opposition(s, "a", "b");
  ASSERT_EQ(r.findings.size(), 3u);
  EXPECT_TRUE(r.findings[0].flagged);
  EXPECT_TRUE(r.findings[1].flagged);
  EXPECT_FALSE(r.findings[2].flagged);  // zero has no sign
  EXPECT_EQ(r.skipped_layers, std::vector<int>{4});
  r = sign_opposition(s, "a", "b", 1.0);
  EXPECT_TRUE(r.findings[0].flagged);
  EXPECT_FALSE(r.findings[1].flagged);
}

TEST(OppositionTest, UnknownCategoryListsLabels) {
  const auto s = summarize(load_gradients(testing::fixture("gradients_layers.csv")));
  try {
    sign_opposition(s, "dog", "horse");
    FAIL() << "expected Error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("horse"), std::string::npos);
    EXPECT_NE(msg.find("cat"), std::string::npos);
    EXPECT_NE(msg.find("dog"), std::string::npos);
  }
}

TEST(OppositionTest, JsonlFormat) {
  std::ostringstream out;
  write_findings_jsonl(out, std::vector<OppositionFinding>{{114, 3.5, -4.0, true}});
  EXPECT_EQ(out.str(), R"({"layer":114,"sum_a":3.5,"sum_b":-4.0,"flagged":true})" "\n");
}

TEST(TopMagnitudeTest, FixtureSixLayers) {
  const auto s = summarize(load_gradients(testing::fixture("gradients_layers.csv")));
  const auto top = top_magnitude_layers(s, Statistic::kSum, 6);
  ASSERT_EQ(top.size(), 6u);
  EXPECT_EQ(layer_set(top), (std::set<int>{105, 114, 124, 132, 141, 150}));
  for (std::size_t i = 1; i < top.size(); ++i) {
    EXPECT_GE(top[i - 1].magnitude, top[i].magnitude);
  }
}

TEST(TopMagnitudeTest, KBeyondCount) {
  const auto s = summarize(parse("layer,category,value\n1,a,1\n2,a,-3\n"));
  const auto top = top_magnitude_layers(s, Statistic::kSum, 10);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].layer, 2);
  EXPECT_EQ(top[0].magnitude, 3.0);
}

TEST(TopMagnitudeTest, TiesGoToSmallerLayer) {
  const auto s = summarize(parse("layer,category,value\n5,a,0\n2,a,0\n9,a,0\n"));
  const auto top = top_magnitude_layers(s, Statistic::kSum, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].layer, 2);
  EXPECT_EQ(top[1].layer, 5);
}

TEST(TopMagnitudeTest, WithinWindow) {
  const std::vector<LayerMagnitude> top{{150, 1}, {105, 1}, {132, 1}};
  EXPECT_EQ(layers_within(top, Window{129, 151}), (std::vector<int>{132, 150}));
}

TEST(StatisticTest, Names) {
  for (auto s : {Statistic::kMax, Statistic::kMean, Statistic::kSum}) {
    EXPECT_EQ(statistic_from_string(to_string(s)), s);
  }
  EXPECT_FALSE(statistic_from_string("median"));
}

TEST(CategoriesTest, Sorted) {
  const auto s = summarize(load_gradients(testing::fixture("gradients_layers.csv")));
  EXPECT_EQ(categories(s), (std::vector<std::string>{"cat", "dog"}));
}

}  // namespace
}  // namespace layerga
