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

#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "affectrec/engine/index.hpp"
#include "affectrec/error.hpp"

namespace affectrec {

struct PreferenceRating {
  std::string item_id;
  int rating = 0;  // 1..5
  bool is_attention_check = false;

  friend bool operator==(const PreferenceRating&, const PreferenceRating&) = default;
};

inline void validate_rating(const PreferenceRating& r) {
  require(r.rating >= 1 && r.rating <= 5, ErrorKind::validation,
          "rating for '" + r.item_id + "' must be in 1..5, got " + std::to_string(r.rating));
}

/// Drops attention checks and divides each remaining rating by their sum.
inline std::vector<double> normalize_ratings(const std::vector<PreferenceRating>& ratings) {
  double total = 0.0;
  for (const auto& r : ratings) {
    validate_rating(r);
    if (!r.is_attention_check) total += r.rating;
  }
  require(total > 0.0, ErrorKind::no_preferences, "no ratings left after removing attention checks");
  std::vector<double> weights;
  for (const auto& r : ratings) {
    if (!r.is_attention_check) weights.push_back(r.rating / total);
  }
  return weights;
}

struct RecommendationEntry {
  std::string painting_id;
  double aggregate_distance = 0.0;

  friend bool operator==(const RecommendationEntry&, const RecommendationEntry&) = default;
};

struct RecommendationList {
  Engine engine = Engine::haydn;
  std::vector<RecommendationEntry> entries;
  std::vector<std::pair<std::string, double>> weights;  // rated item id -> weight
  bool truncated = false;  // fewer candidates than requested

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& e : entries) out.push_back(e.painting_id);
    return out;
  }

  friend bool operator==(const RecommendationList&, const RecommendationList&) = default;
};

inline nlohmann::json to_json(const RecommendationList& list) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : list.entries) {
    entries.push_back({{"painting_id", e.painting_id}, {"aggregate_distance", e.aggregate_distance}});
  }
  nlohmann::json weights = nlohmann::json::array();
  for (const auto& [id, w] : list.weights) weights.push_back({{"item_id", id}, {"weight", w}});
  return {{"engine", std::string(to_string(list.engine))},
          {"entries", entries},
          {"weights", weights},
          {"truncated", list.truncated}};
}

inline RecommendationList recommendation_list_from_json(const nlohmann::json& j) {
  RecommendationList list;
  list.engine = parse_engine(j.at("engine").get<std::string>());
  for (const auto& e : j.at("entries")) {
    list.entries.push_back({e.at("painting_id").get<std::string>(), e.at("aggregate_distance").get<double>()});
  }
  for (const auto& w : j.at("weights")) {
    list.weights.emplace_back(w.at("item_id").get<std::string>(), w.at("weight").get<double>());
  }
  list.truncated = j.at("truncated").get<bool>();
  return list;
}

struct RecommendOptions {
  std::unordered_set<std::string> exclude;
  // When set, only these paintings are candidates.
  std::optional<std::unordered_set<std::string>> allowed;
};

/// Ranks paintings by the rating-weighted sum of per-item dissimilarities,
/// ascending, ties broken by painting id. The visual engine never returns a
/// painting the user rated.
inline RecommendationList recommend(const SimilarityIndex& index,
                                    const std::vector<PreferenceRating>& ratings, std::size_t n,
                                    const RecommendOptions& options = {}) {
  require(n >= 1, ErrorKind::invalid_parameter, "n must be at least 1");
  const std::vector<double> weights = normalize_ratings(ratings);

  RecommendationList list;
  list.engine = index.engine();
  std::vector<Eigen::Index> rows;
  std::size_t w = 0;
  for (const auto& r : ratings) {
    if (r.is_attention_check) continue;
    const auto row = index.row_of(r.item_id);
    if (!row) fail(ErrorKind::unknown_item, "unknown item '" + r.item_id + "'");
    rows.push_back(*row);
    list.weights.emplace_back(r.item_id, weights[w++]);
  }

  std::unordered_set<std::string> excluded = options.exclude;
  if (index.engine() == Engine::visual) {
    for (const auto& r : ratings) excluded.insert(r.item_id);
  }

  const auto cols = index.values().cols();
  std::vector<double> aggregate(static_cast<std::size_t>(cols), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      aggregate[static_cast<std::size_t>(j)] += weights[i] * index.dissimilarity(rows[i], j);
    }
  }

  std::vector<Eigen::Index> candidates;
  for (Eigen::Index j = 0; j < cols; ++j) {
    const auto& id = index.col_ids()[static_cast<std::size_t>(j)];
    if (excluded.contains(id)) continue;
    if (options.allowed && !options.allowed->contains(id)) continue;
    candidates.push_back(j);
  }
  auto before = [&](Eigen::Index a, Eigen::Index b) {
    const double da = aggregate[static_cast<std::size_t>(a)], db = aggregate[static_cast<std::size_t>(b)];
    if (da != db) return da < db;
    return index.col_ids()[static_cast<std::size_t>(a)] < index.col_ids()[static_cast<std::size_t>(b)];
  };
  const std::size_t keep = std::min(n, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                    candidates.end(), before);
  list.truncated = candidates.size() < n;
  for (std::size_t k = 0; k < keep; ++k) {
    const auto j = candidates[k];
    list.entries.push_back({index.col_ids()[static_cast<std::size_t>(j)], aggregate[static_cast<std::size_t>(j)]});
  }
  return list;
}

/// Every candidate painting in ranked order.
inline std::vector<std::string> full_ranking(const SimilarityIndex& index,
                                             const std::vector<PreferenceRating>& ratings,
                                             const RecommendOptions& options = {}) {
  return recommend(index, ratings, static_cast<std::size_t>(std::max<Eigen::Index>(1, index.values().cols())),
                   options)
      .ids();
}

}  // namespace affectrec
