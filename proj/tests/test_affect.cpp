// Copyright 2026 The affectrec Authors. All Rights Reserved.
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

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "affectrec/affect.hpp"

using namespace affectrec;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an affectrec::Error";
  return ErrorKind::io;
}

VALexicon joy_fear() {
  VALexicon lex;
  lex.insert("joy", VAVector(0.8, 0.5));
  lex.insert("fear", VAVector(-0.6, 0.7));
  return lex;
}

}  // namespace

TEST(VAVector, AcceptsClosedRangeRejectsOutside) {
  EXPECT_NO_THROW(VAVector(-1.0, 1.0));
  EXPECT_EQ(kind_of([] { VAVector(1.0001, 0.0); }), ErrorKind::invalid_parameter);
  EXPECT_EQ(kind_of([] { VAVector(0.0, -1.5); }), ErrorKind::invalid_parameter);
  EXPECT_EQ(kind_of([] { VAVector(std::nan(""), 0.0); }), ErrorKind::invalid_parameter);
  const auto c = VAVector::clamped(1.7, -3.0);
  EXPECT_EQ(c.valence(), 1.0);
  EXPECT_EQ(c.arousal(), -1.0);
}

TEST(VaDistance, Examples) {
  EXPECT_EQ(va_distance({0, 0}, {0, 0}), 0.0);
  EXPECT_NEAR(va_distance({0.3, 0.4}, {0, 0}), 0.5, 1e-15);
  EXPECT_NEAR(va_distance({1, 1}, {-1, -1}), 2.0 * std::sqrt(2.0), 1e-12);
}

TEST(VaDistance, MetricAxiomsOnRandomSamples) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const VAVector a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    EXPECT_GE(va_distance(a, b), 0.0);
    EXPECT_EQ(va_distance(a, b), va_distance(b, a));
    EXPECT_EQ(va_distance(a, a), 0.0);
    EXPECT_LE(va_distance(a, c), va_distance(a, b) + va_distance(b, c) + 1e-12);
  }
}

TEST(GaussianSimilarity, Examples) {
  EXPECT_EQ(gaussian_similarity(0.0, 0.5), 1.0);
  EXPECT_NEAR(gaussian_similarity(0.5, 0.5), 0.606531, 1e-6);
  EXPECT_NEAR(gaussian_similarity(1.0, 0.5), 0.135335, 1e-6);
}

TEST(GaussianSimilarity, RejectsBadArguments) {
  EXPECT_EQ(kind_of([] { gaussian_similarity(0.1, 0.0); }), ErrorKind::invalid_parameter);
  EXPECT_EQ(kind_of([] { gaussian_similarity(0.1, -1.0); }), ErrorKind::invalid_parameter);
  EXPECT_EQ(kind_of([] { gaussian_similarity(-0.1, 0.5); }), ErrorKind::invalid_parameter);
}

TEST(GaussianSimilarity, RangeAndMonotonicity) {
  std::mt19937_64 rng(5);
  // Sigma floor keeps exp(-d^2 / 2 sigma^2) above double underflow.
  std::uniform_real_distribution<double> d(0.0, 3.0), s(0.25, 2.0);
  for (int t = 0; t < 1000; ++t) {
    double d1 = d(rng), d2 = d(rng);
    const double sigma = s(rng);
    if (d1 > d2) std::swap(d1, d2);
    const double s1 = gaussian_similarity(d1, sigma), s2 = gaussian_similarity(d2, sigma);
    EXPECT_GT(s1, 0.0);
    EXPECT_LE(s1, 1.0);
    EXPECT_GE(s1, s2);
    if (d1 > 0.0) {
      EXPECT_LE(gaussian_similarity(d1, sigma), gaussian_similarity(d1, sigma * 1.5));
    }
  }
}

TEST(EmotionsToVa, Examples) {
  const auto lex = joy_fear();
  const auto single = emotions_to_va({{"joy", 1.0}}, lex);
  EXPECT_NEAR(single.valence(), 0.8, 1e-12);
  EXPECT_NEAR(single.arousal(), 0.5, 1e-12);
  const auto mid = emotions_to_va({{"joy", 1.0}, {"fear", 1.0}}, lex);
  EXPECT_NEAR(mid.valence(), 0.1, 1e-12);
  EXPECT_NEAR(mid.arousal(), 0.6, 1e-12);
  const auto weighted = emotions_to_va({{"joy", 3.0}, {"fear", 1.0}}, lex);
  EXPECT_NEAR(weighted.valence(), 0.75 * 0.8 + 0.25 * -0.6, 1e-12);
  EXPECT_NEAR(weighted.arousal(), 0.75 * 0.5 + 0.25 * 0.7, 1e-12);
}

TEST(EmotionsToVa, Errors) {
  const auto lex = joy_fear();
  EXPECT_EQ(kind_of([&] { emotions_to_va({{"awe", 1.0}}, lex); }), ErrorKind::missing_lexicon_entry);
  EXPECT_EQ(kind_of([&] { emotions_to_va({{"joy", 0.0}, {"fear", 0.0}}, lex); }), ErrorKind::degenerate_label);
  EXPECT_EQ(kind_of([&] { emotions_to_va({}, lex); }), ErrorKind::degenerate_label);
  EXPECT_EQ(kind_of([&] { emotions_to_va({{"joy", -1.0}}, lex); }), ErrorKind::degenerate_label);
}

TEST(EmotionsToVa, InvariantToUniformRescaling) {
  const auto lex = joy_fear();
  const auto a = emotions_to_va({{"joy", 0.3}, {"fear", 0.9}}, lex);
  const auto b = emotions_to_va({{"joy", 3.0}, {"fear", 9.0}}, lex);
  EXPECT_NEAR(a.valence(), b.valence(), 1e-12);
  EXPECT_NEAR(a.arousal(), b.arousal(), 1e-12);
}

TEST(VALexicon, ParsesUnitScaleWithHeader) {
  std::istringstream in("Word\tValence\tArousal\tDominance\njoy\t0.9\t0.75\t0.6\ncalm\t0.5\t0.0\t0.4\n");
  const auto lex = VALexicon::parse(in);
  EXPECT_EQ(lex.size(), 2u);
  ASSERT_NE(lex.find("joy"), nullptr);
  EXPECT_NEAR(lex.find("joy")->valence(), 0.8, 1e-12);
  EXPECT_NEAR(lex.find("joy")->arousal(), 0.5, 1e-12);
  EXPECT_NEAR(lex.find("calm")->valence(), 0.0, 1e-12);
  EXPECT_NEAR(lex.find("calm")->arousal(), -1.0, 1e-12);
  EXPECT_EQ(lex.find("rage"), nullptr);
}

TEST(VALexicon, RejectsOutOfScaleAndMalformedLines) {
  std::istringstream bad_scale("joy\t1.2\t0.5\n");
  EXPECT_EQ(kind_of([&] { VALexicon::parse(bad_scale); }), ErrorKind::parse);
  std::istringstream bad_line("joy\t0.5\n");
  EXPECT_EQ(kind_of([&] { VALexicon::parse(bad_line); }), ErrorKind::parse);
  std::istringstream bad_number("joy\t0.5\t0.5\nfear\tx\t0.1\n");
  EXPECT_EQ(kind_of([&] { VALexicon::parse(bad_number); }), ErrorKind::parse);
}

TEST(DeamStabilityFilter, RuleTable) {
  EXPECT_TRUE(deam_stability_filter({1.75, 1.0}));
  EXPECT_FALSE(deam_stability_filter({1.8, 0.5}));
  EXPECT_FALSE(deam_stability_filter({0.5, 1.2}));
  EXPECT_TRUE(deam_stability_filter({0.0, 0.0}));
  EXPECT_FALSE(deam_stability_filter({std::nextafter(1.75, 2.0), 0.0}));
  EXPECT_FALSE(deam_stability_filter({0.0, std::nextafter(1.0, 2.0)}));
}

TEST(TherapeuticCurationFilter, RuleTable) {
  EXPECT_TRUE(therapeutic_curation_filter({0.5, 0.3}));
  EXPECT_FALSE(therapeutic_curation_filter({0.5, 0.0}));
  EXPECT_FALSE(therapeutic_curation_filter({0.05, 0.5}));
  EXPECT_FALSE(therapeutic_curation_filter({0.1, 0.5}));
  EXPECT_TRUE(therapeutic_curation_filter({0.5, 0.1}));
  EXPECT_TRUE(therapeutic_curation_filter({0.5, -0.1}));
  EXPECT_FALSE(therapeutic_curation_filter({0.5, 0.09}));
  EXPECT_FALSE(therapeutic_curation_filter({0.5, -0.09}));
  EXPECT_FALSE(therapeutic_curation_filter({-0.5, 0.9}));
}

TEST(DeamScale, MapsOneToNineOntoUnitRange) {
  EXPECT_EQ(deam_to_unit_range(1.0), -1.0);
  EXPECT_EQ(deam_to_unit_range(5.0), 0.0);
  EXPECT_EQ(deam_to_unit_range(9.0), 1.0);
}
