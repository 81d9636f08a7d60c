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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace affectrec;
using testing_support::kind_of;
using testing_support::message_of;

namespace {

std::vector<PreferenceRating> rated(std::initializer_list<std::pair<const char*, int>> items) {
  std::vector<PreferenceRating> out;
  for (const auto& [id, r] : items) out.push_back({id, r, false});
  return out;
}

// Brute-force dissimilarity for `engine` over the raw bundle matrices.
std::function<double(const std::string&, const std::string&)> oracle_dist(const PreprocessedBundle& b,
                                                                          Engine engine) {
  auto index_of = [](const std::vector<std::string>& ids, const std::string& id) {
    return static_cast<Eigen::Index>(std::find(ids.begin(), ids.end(), id) - ids.begin());
  };
  return [&b, engine, index_of](const std::string& row, const std::string& col) {
    const auto j = index_of(b.painting_ids, col);
    switch (engine) {
      case Engine::haydn: {
        const auto i = index_of(b.music_ids, row);
        return testing_support::oracle_va_distance(b.va_music(i, 0), b.va_music(i, 1), b.va_paintings(j, 0),
                                                   b.va_paintings(j, 1));
      }
      case Engine::mozart:
        return testing_support::oracle_euclidean(b.mozart_music, index_of(b.music_ids, row), b.mozart_paintings, j);
      case Engine::salieri:
        return 1.0 - testing_support::oracle_cosine(b.salieri_music, index_of(b.music_ids, row),
                                                    b.salieri_paintings, j);
      case Engine::visual:
        return 1.0 - testing_support::oracle_cosine(b.visual_paintings, index_of(b.painting_ids, row),
                                                    b.visual_paintings, j);
    }
    return 0.0;
  };
}

void expect_matches_oracle(const RecommendationList& got,
                           const std::vector<std::pair<std::string, double>>& oracle, std::size_t n) {
  ASSERT_EQ(got.entries.size(), std::min(n, oracle.size()));
  for (std::size_t k = 0; k < got.entries.size(); ++k) {
    EXPECT_EQ(got.entries[k].painting_id, oracle[k].first) << "rank " << k;
    EXPECT_NEAR(got.entries[k].aggregate_distance, oracle[k].second, 1e-12) << "rank " << k;
  }
}

}  // namespace

TEST(NormalizeRatings, Examples) {
  EXPECT_EQ(normalize_ratings(rated({{"a", 5}})), (std::vector<double>{1.0}));
  EXPECT_EQ(normalize_ratings(rated({{"a", 2}, {"b", 2}})), (std::vector<double>{0.5, 0.5}));
  const auto w = normalize_ratings(rated({{"a", 1}, {"b", 4}}));
  EXPECT_NEAR(w[0], 0.2, 1e-15);
  EXPECT_NEAR(w[1], 0.8, 1e-15);
}

TEST(NormalizeRatings, AttentionChecksExcluded) {
  std::vector<PreferenceRating> r{{"a", 3, false}, {"att", 1, true}, {"b", 1, false}};
  const auto w = normalize_ratings(r);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_NEAR(w[0], 0.75, 1e-15);
  EXPECT_EQ(kind_of([] { normalize_ratings({{"att", 1, true}}); }), ErrorKind::no_preferences);
  EXPECT_EQ(kind_of([] { normalize_ratings({}); }), ErrorKind::no_preferences);
  EXPECT_EQ(kind_of([] { normalize_ratings(rated({{"a", 6}})); }), ErrorKind::validation);
  EXPECT_EQ(kind_of([] { normalize_ratings(rated({{"a", 0}})); }), ErrorKind::validation);
}

TEST(NormalizeRatings, WeightsSumToOne) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> score(1, 5), count(1, 12);
  for (int t = 0; t < 200; ++t) {
    std::vector<PreferenceRating> r;
    const int k = count(rng);
    for (int i = 0; i < k; ++i) r.push_back({"x" + std::to_string(i), score(rng), false});
    double sum = 0.0;
    for (double w : normalize_ratings(r)) {
      EXPECT_GE(w, 0.0);
      EXPECT_LE(w, 1.0);
      sum += w;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(HaydnIndex, ThreeFourFive) {
  Matrix vm(1, 2), vp(2, 2);
  vm << 0, 0;
  vp << 0.3, 0.4, 0, 0;
  const auto idx = build_haydn_index({"m"}, vm, {"p", "q"}, vp);
  EXPECT_EQ(idx.semantics(), Semantics::distance);
  EXPECT_NEAR(idx.values()(0, 0), 0.5, 1e-15);
  EXPECT_EQ(idx.values()(0, 1), 0.0);
}

TEST(HaydnIndex, TwoByThreeMatchesBruteForce) {
  const auto c = testing_support::random_catalog(12, 2, 3);
  const auto idx = build_haydn_index(c);
  ASSERT_EQ(idx.values().rows(), 2);
  ASSERT_EQ(idx.values().cols(), 3);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      const auto& m = c.music()[static_cast<std::size_t>(i)].va;
      const auto& p = c.paintings()[static_cast<std::size_t>(j)].va;
      EXPECT_EQ(idx.values()(i, j),
                testing_support::oracle_va_distance(m.valence(), m.arousal(), p.valence(), p.arousal()));
    }
  }
  EXPECT_EQ(idx.row_ids(), c.ids(Modality::music));
  EXPECT_EQ(idx.col_ids(), c.ids(Modality::painting));
}

TEST(HaydnIndex, EmptyModalityIsInvalidCatalog) {
  const auto c = testing_support::random_catalog(1, 2, 3);
  const Catalog no_paintings(c.music(), {});
  EXPECT_EQ(kind_of([&] { build_haydn_index(no_paintings); }), ErrorKind::invalid_catalog);
}

TEST(HaydnIndex, ExactVaMatchRanksFirst) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto c = testing_support::random_catalog(seed, 3, 30);
    auto paintings = c.paintings();
    FeatureRecord twin = paintings.front();
    twin.id = "twin";
    twin.va = c.music()[1].va;
    paintings.push_back(twin);
    const Catalog with_twin(c.music(), paintings);
    const auto list = recommend(build_haydn_index(with_twin), rated({{"m0001", 4}}), 1);
    EXPECT_EQ(list.entries[0].aggregate_distance, 0.0);
  }
}

TEST(MozartIndex, ToyMatchesBruteForceAndIdentity) {
  const auto b = testing_support::toy_bundle(4, 3, 3);
  const auto idx = build_mozart_index(b);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      EXPECT_NEAR(idx.values()(i, j), testing_support::oracle_euclidean(b.mozart_music, i, b.mozart_paintings, j),
                  1e-12);
    }
  }
  auto same = b;
  same.mozart_paintings = same.mozart_music;
  const auto diag = build_mozart_index(same);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_EQ(diag.values()(i, i), 0.0);

  auto bad = b;
  bad.mozart_paintings = Matrix::Ones(3, 5);
  EXPECT_EQ(kind_of([&] { build_mozart_index(bad); }), ErrorKind::shape);
}

TEST(SalieriIndex, HandEvaluatedTwoByTwo) {
  auto b = testing_support::toy_bundle(5, 2, 2, 3, 2);
  b.salieri_music << 1, 0, 1, 1;
  b.salieri_paintings << 0, 2, 3, 3;
  const auto idx = build_salieri_index(b);
  EXPECT_EQ(idx.semantics(), Semantics::similarity);
  EXPECT_EQ(idx.values()(0, 0), 0.0);                      // orthogonal
  EXPECT_NEAR(idx.values()(0, 1), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(idx.values()(1, 0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(idx.values()(1, 1), 1.0, 1e-15);             // parallel

  const auto euclid = build_salieri_index(b, SalieriMetric::euclidean);
  EXPECT_EQ(euclid.semantics(), Semantics::distance);
  EXPECT_NEAR(euclid.values()(0, 1), std::sqrt(4.0 + 9.0), 1e-15);
}

TEST(SalieriIndex, ZeroNormNamesTheItem) {
  auto b = testing_support::toy_bundle(6, 2, 3);
  b.salieri_paintings.row(2).setZero();
  EXPECT_EQ(kind_of([&] { build_salieri_index(b); }), ErrorKind::degenerate_embedding);
  EXPECT_NE(message_of([&] { build_salieri_index(b); }).find(b.painting_ids[2]), std::string::npos);
}

TEST(VisualIndex, DiagonalScaleInvarianceAndBruteForce) {
  auto b = testing_support::toy_bundle(7, 2, 3);
  b.visual_paintings.row(2) = 3.5 * b.visual_paintings.row(0);
  const auto idx = build_visual_index(b);
  EXPECT_EQ(idx.row_ids(), b.painting_ids);
  EXPECT_EQ(idx.col_ids(), b.painting_ids);
  for (Eigen::Index i = 0; i < 3; ++i) {
    EXPECT_NEAR(idx.values()(i, i), 1.0, 1e-15);
    for (Eigen::Index j = 0; j < 3; ++j) {
      EXPECT_NEAR(idx.values()(i, j), testing_support::oracle_cosine(b.visual_paintings, i, b.visual_paintings, j),
                  1e-12);
    }
  }
  EXPECT_NEAR(idx.values()(0, 2), 1.0, 1e-15);

  auto zero = b;
  zero.visual_paintings.row(1).setZero();
  EXPECT_EQ(kind_of([&] { build_visual_index(zero); }), ErrorKind::degenerate_embedding);
  EXPECT_EQ(kind_of([&] { build_visual_index({"p"}, Matrix::Ones(1, 3)); }), ErrorKind::invalid_catalog);
}

TEST(Recommend, SingleRatingFollowsRowOrder) {
  const auto c = testing_support::random_catalog(8, 4, 25);
  const auto idx = build_haydn_index(c);
  const auto list = recommend(idx, rated({{"m0002", 3}}), 25);
  ASSERT_EQ(list.entries.size(), 25u);
  for (std::size_t k = 0; k < list.entries.size(); ++k) {
    const auto j = static_cast<Eigen::Index>(std::find(idx.col_ids().begin(), idx.col_ids().end(),
                                                       list.entries[k].painting_id) -
                                             idx.col_ids().begin());
    EXPECT_EQ(list.entries[k].aggregate_distance, idx.values()(2, j));
    if (k > 0) {
      EXPECT_LE(list.entries[k - 1].aggregate_distance, list.entries[k].aggregate_distance);
    }
  }
  EXPECT_FALSE(list.truncated);
  EXPECT_EQ(list.weights, (std::vector<std::pair<std::string, double>>{{"m0002", 1.0}}));
}

TEST(Recommend, UniformRatingsEqualUnweightedMean) {
  const auto c = testing_support::random_catalog(9, 5, 40);
  const auto idx = build_haydn_index(c);
  const auto list = recommend(idx, rated({{"m0000", 2}, {"m0003", 2}, {"m0004", 2}}), 40);
  std::vector<std::pair<std::string, double>> mean;
  for (Eigen::Index j = 0; j < idx.values().cols(); ++j) {
    mean.emplace_back(idx.col_ids()[static_cast<std::size_t>(j)],
                      (idx.values()(0, j) + idx.values()(3, j) + idx.values()(4, j)) / 3.0);
  }
  std::sort(mean.begin(), mean.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  for (std::size_t k = 0; k < mean.size(); ++k) {
    EXPECT_NEAR(list.entries[k].aggregate_distance, mean[k].second, 1e-12);
  }
  for (std::size_t k = 0; k + 1 < mean.size(); ++k) {
    // Sorted means that differ beyond rounding pin the id at that rank.
    if (mean[k + 1].second - mean[k].second > 1e-12 && (k == 0 || mean[k].second - mean[k - 1].second > 1e-12)) {
      EXPECT_EQ(list.entries[k].painting_id, mean[k].first);
    }
  }
}

TEST(Recommend, TwoByFourToyMatchesOracle) {
  Matrix values(2, 4);
  values << 0.1, 0.9, 0.5, 0.3,
            0.8, 0.2, 0.4, 0.6;
  const SimilarityIndex idx(Engine::mozart, Semantics::distance, {"a", "b"}, {"p1", "p2", "p3", "p4"}, values);
  const auto list = recommend(idx, rated({{"a", 1}, {"b", 4}}), 4);
  // 0.2 * row a + 0.8 * row b by hand: p1 0.66, p2 0.34, p3 0.42, p4 0.54.
  const std::vector<std::string> expected{"p2", "p3", "p4", "p1"};
  EXPECT_EQ(list.ids(), expected);
  EXPECT_NEAR(list.entries[0].aggregate_distance, 0.34, 1e-12);
  EXPECT_NEAR(list.entries[3].aggregate_distance, 0.66, 1e-12);
}

TEST(Recommend, TiesBrokenByPaintingId) {
  Matrix values(1, 3);
  values << 0.5, 0.5, 0.5;
  const SimilarityIndex idx(Engine::haydn, Semantics::distance, {"m"}, {"pc", "pa", "pb"}, values);
  EXPECT_EQ(recommend(idx, rated({{"m", 5}}), 3).ids(), (std::vector<std::string>{"pa", "pb", "pc"}));
}

TEST(Recommend, AllEnginesMatchBruteForceOnToyBundles) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> nm(1, 50), np(2, 200);
    const int n_m = nm(rng), n_p = np(rng);
    const auto b = testing_support::toy_bundle(seed + 100, n_m, n_p);
    std::uniform_int_distribution<std::size_t> k(1, 10);
    for (Engine e : kAllEngines) {
      const auto idx = build_index(e, b);
      const auto& pool = e == Engine::visual ? b.painting_ids : b.music_ids;
      const auto ratings = testing_support::random_ratings(rng, pool, std::min(k(rng), pool.size()));
      std::vector<std::string> candidates;
      for (const auto& p : b.painting_ids) {
        const bool rated_here = std::any_of(ratings.begin(), ratings.end(),
                                            [&](const PreferenceRating& r) { return r.item_id == p; });
        if (!(e == Engine::visual && rated_here)) candidates.push_back(p);
      }
      const auto oracle = testing_support::oracle_ranking(ratings, candidates, oracle_dist(b, e));
      SCOPED_TRACE(std::string(to_string(e)) + " seed " + std::to_string(seed));
      expect_matches_oracle(recommend(idx, ratings, 10), oracle, 10);
    }
  }
}

TEST(Recommend, PositiveRescalingLeavesRankingUnchanged) {
  const auto b = testing_support::toy_bundle(31, 12, 60);
  for (Engine e : kAllEngines) {
    const auto idx = build_index(e, b);
    const auto& pool = e == Engine::visual ? b.painting_ids : b.music_ids;
    std::vector<PreferenceRating> base{{pool[0], 1, false}, {pool[3], 2, false}, {pool[5], 1, false}};
    auto doubled = base;
    for (auto& r : doubled) r.rating *= 2;
    EXPECT_EQ(full_ranking(idx, base), full_ranking(idx, doubled)) << to_string(e);
  }
}

TEST(Recommend, VisualExcludesRatedPaintingsOnly) {
  const auto b = testing_support::toy_bundle(32, 4, 10);
  const auto ratings = rated({{"p100", 5}, {"p103", 2}});
  const auto visual = full_ranking(build_visual_index(b), ratings);
  EXPECT_EQ(visual.size(), 8u);
  EXPECT_EQ(std::count(visual.begin(), visual.end(), "p100"), 0);
  EXPECT_EQ(std::count(visual.begin(), visual.end(), "p103"), 0);
  EXPECT_EQ(full_ranking(build_haydn_index(b), rated({{"m100", 5}})).size(), 10u);
}

TEST(Recommend, TruncatedAllowlistAndErrors) {
  const auto b = testing_support::toy_bundle(33, 3, 5);
  const auto idx = build_haydn_index(b);
  const auto all = recommend(idx, rated({{"m101", 3}}), 9);
  EXPECT_TRUE(all.truncated);
  EXPECT_EQ(all.entries.size(), 5u);

  RecommendOptions opts;
  opts.allowed = std::unordered_set<std::string>{"p101", "p104"};
  const auto allowed = recommend(idx, rated({{"m101", 3}}), 3, opts);
  EXPECT_EQ(allowed.entries.size(), 2u);
  EXPECT_TRUE(allowed.truncated);
  for (const auto& e : allowed.entries) EXPECT_TRUE(opts.allowed->contains(e.painting_id));

  EXPECT_EQ(kind_of([&] { recommend(idx, rated({{"nope", 3}}), 3); }), ErrorKind::unknown_item);
  EXPECT_EQ(kind_of([&] { recommend(idx, rated({{"m101", 3}}), 0); }), ErrorKind::invalid_parameter);
  EXPECT_EQ(kind_of([&] { recommend(idx, {{"m101", 3, true}}, 3); }), ErrorKind::no_preferences);
}

TEST(Recommend, ListJsonRoundTrip) {
  const auto b = testing_support::toy_bundle(34, 3, 6);
  const auto list = recommend(build_salieri_index(b), rated({{"m100", 4}, {"m102", 1}}), 3);
  EXPECT_EQ(recommendation_list_from_json(to_json(list)), list);
}

TEST(HaydnOracle, RandomCatalogsTopNExact) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed * 7 + 1);
    std::uniform_int_distribution<int> nm(1, 50), np(1, 200);
    const auto c = testing_support::random_catalog(seed, nm(rng), np(rng));
    const auto idx = build_haydn_index(c);
    const auto ids = c.ids(Modality::music);
    std::uniform_int_distribution<std::size_t> k(1, std::min<std::size_t>(10, ids.size()));
    const auto ratings = testing_support::random_ratings(rng, ids, k(rng));
    std::map<std::string, VAVector> va;
    for (const auto& r : c.music()) va.emplace(r.id, r.va);
    for (const auto& r : c.paintings()) va.emplace(r.id, r.va);
    const auto oracle = testing_support::oracle_ranking(
        ratings, c.ids(Modality::painting), [&](const std::string& m, const std::string& p) {
          return testing_support::oracle_va_distance(va.at(m).valence(), va.at(m).arousal(), va.at(p).valence(),
                                                     va.at(p).arousal());
        });
    const auto list = recommend(idx, ratings, 10);
    ASSERT_EQ(list.entries.size(), std::min<std::size_t>(10, oracle.size()));
    for (std::size_t r = 0; r < list.entries.size(); ++r) {
      EXPECT_EQ(list.entries[r].painting_id, oracle[r].first) << "seed " << seed;
      EXPECT_EQ(list.entries[r].aggregate_distance, oracle[r].second) << "seed " << seed;
    }
  }
}

TEST(IndexFile, RoundTripIsByteExact) {
  const auto b = testing_support::toy_bundle(40, 4, 6);
  for (Engine e : kAllEngines) {
    const auto idx = build_index(e, b);
    const std::string bytes = encode_index(idx);
    EXPECT_EQ(bytes.substr(0, 4), "AFIX");
    const auto back = decode_index(bytes);
    EXPECT_EQ(back.engine(), e);
    EXPECT_EQ(back.semantics(), idx.semantics());
    EXPECT_EQ(back.row_ids(), idx.row_ids());
    EXPECT_EQ(back.build_info(), idx.build_info());
    EXPECT_EQ(encode_index(back), bytes) << to_string(e);
    EXPECT_EQ(decode_index(encode_index(back)), back);
  }
}

TEST(IndexFile, CorruptionIsDetected) {
  const auto bytes = encode_index(build_haydn_index(testing_support::toy_bundle(41, 3, 4)));
  for (std::size_t pos : {std::size_t{5}, std::size_t{20}, bytes.size() - 12, bytes.size() - 1}) {
    std::string bad = bytes;
    bad[pos] = static_cast<char>(bad[pos] ^ 0x10);
    EXPECT_EQ(kind_of([&] { decode_index(bad); }), ErrorKind::integrity) << "byte " << pos;
  }
  EXPECT_EQ(kind_of([&] { decode_index(bytes.substr(0, bytes.size() - 3)); }), ErrorKind::integrity);
  std::string magic = bytes;
  magic[1] = 'Z';
  EXPECT_EQ(kind_of([&] { decode_index(magic); }), ErrorKind::integrity);
}

TEST(IndexFile, CsvMirror) {
  Matrix values(1, 2);
  values << 0.25, 1.5;
  const SimilarityIndex idx(Engine::haydn, Semantics::distance, {"m"}, {"p", "q"}, values);
  EXPECT_EQ(index_to_csv(idx), "id,p,q\nm,0.25,1.5\n");
}

TEST(IndexInvariants, RejectedOnConstruction) {
  EXPECT_EQ(kind_of([] { SimilarityIndex(Engine::haydn, Semantics::distance, {"m"}, {"p"}, Matrix::Constant(1, 1, -0.1)); }),
            ErrorKind::integrity);
  EXPECT_EQ(kind_of([] { SimilarityIndex(Engine::haydn, Semantics::distance, {"m"}, {"p", "q"}, Matrix::Ones(1, 1)); }),
            ErrorKind::shape);
  EXPECT_EQ(kind_of([] {
              SimilarityIndex(Engine::haydn, Semantics::distance, {"m", "m"}, {"p"}, Matrix::Ones(2, 1));
            }),
            ErrorKind::duplicate_id);
  EXPECT_EQ(kind_of([] { parse_engine("bach"); }), ErrorKind::invalid_parameter);
}
