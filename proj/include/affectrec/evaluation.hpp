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

// Offline comparison of engine configurations: top-k overlap between two
// rankings and cluster-retrieval probes against synthetic ground truth.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "affectrec/engine/index.hpp"
#include "affectrec/error.hpp"

namespace affectrec {

struct RankingOverlapReport {
  std::size_t k = 0;
  double overlap_at_k = 0.0;
  double rank_correlation = 0.0;  // Kendall tau-b over the full lists
  std::string label_a = "a";
  std::string label_b = "b";
};

/// Kendall tau-b between two score assignments over the same items.
inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorKind::shape, "kendall_tau_b: length mismatch");
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++ties_x;
      } else if (dy == 0.0) {
        ++ties_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double denom = std::sqrt(static_cast<double>(concordant + discordant + ties_x) *
                                 static_cast<double>(concordant + discordant + ties_y));
  return denom > 0.0 ? static_cast<double>(concordant - discordant) / denom : 1.0;
}

inline RankingOverlapReport ranking_overlap(const std::vector<std::string>& rank_a,
                                            const std::vector<std::string>& rank_b, std::size_t k) {
  require(rank_a.size() == rank_b.size(), ErrorKind::universe, "rankings differ in length");
  std::unordered_map<std::string, std::size_t> pos_b;
  for (std::size_t i = 0; i < rank_b.size(); ++i) {
    require(pos_b.emplace(rank_b[i], i).second, ErrorKind::universe, "duplicate id '" + rank_b[i] + "'");
  }
  std::vector<double> ra, rb;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < rank_a.size(); ++i) {
    require(seen.insert(rank_a[i]).second, ErrorKind::universe, "duplicate id '" + rank_a[i] + "'");
    auto it = pos_b.find(rank_a[i]);
    require(it != pos_b.end(), ErrorKind::universe, "id '" + rank_a[i] + "' missing from second ranking");
    ra.push_back(static_cast<double>(i));
    rb.push_back(static_cast<double>(it->second));
  }
  require(k >= 1 && k <= rank_a.size(), ErrorKind::invalid_parameter, "k must lie in [1, universe size]");

  std::unordered_set<std::string> top_a(rank_a.begin(), rank_a.begin() + static_cast<std::ptrdiff_t>(k));
  std::size_t shared = 0;
  for (std::size_t i = 0; i < k; ++i) shared += top_a.contains(rank_b[i]) ? 1 : 0;

  RankingOverlapReport report;
  report.k = k;
  report.overlap_at_k = static_cast<double>(shared) / static_cast<double>(k);
  report.rank_correlation = kendall_tau_b(ra, rb);
  return report;
}

struct RetrievalReport {
  std::size_t queries = 0;
  std::size_t clusters = 0;
  double top1_accuracy = 0.0;
  double top5_accuracy = 0.0;
  // Expected top-1 accuracy of a random ranking.
  double chance = 0.0;
};

/// For each row item, checks whether its best column (and any of its best
/// five) shares the row's cluster label.
inline RetrievalReport retrieval_probe(const SimilarityIndex& index,
                                       const std::unordered_map<std::string, std::string>& clusters) {
  auto label = [&](const std::string& id) -> const std::string& {
    auto it = clusters.find(id);
    if (it == clusters.end()) fail(ErrorKind::label, "no cluster label for '" + id + "'");
    return it->second;
  };
  const auto& cols = index.col_ids();
  require(!cols.empty() && !index.row_ids().empty(), ErrorKind::invalid_catalog, "empty index");
  std::vector<std::string> col_labels;
  std::map<std::string, std::size_t> col_counts;
  for (const auto& c : cols) {
    col_labels.push_back(label(c));
    ++col_counts[col_labels.back()];
  }

  RetrievalReport report;
  std::unordered_set<std::string> all_labels(col_labels.begin(), col_labels.end());
  const bool square = index.engine() == Engine::visual;
  std::vector<Eigen::Index> order(cols.size());
  for (std::size_t i = 0; i < index.row_ids().size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const std::string& want = label(index.row_ids()[i]);
    all_labels.insert(want);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    if (square) order.erase(std::remove(order.begin(), order.end(), row), order.end());
    const std::size_t top = std::min<std::size_t>(5, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                        const double da = index.dissimilarity(row, a), db = index.dissimilarity(row, b);
                        if (da != db) return da < db;
                        return cols[static_cast<std::size_t>(a)] < cols[static_cast<std::size_t>(b)];
                      });
    if (top > 0 && col_labels[static_cast<std::size_t>(order[0])] == want) report.top1_accuracy += 1.0;
    for (std::size_t t = 0; t < top; ++t) {
      if (col_labels[static_cast<std::size_t>(order[t])] == want) {
        report.top5_accuracy += 1.0;
        break;
      }
    }
    std::size_t same = col_counts[want];
    std::size_t pool = cols.size();
    if (square) {
      --same;
      --pool;
    }
    report.chance += pool > 0 ? static_cast<double>(same) / static_cast<double>(pool) : 0.0;
    ++report.queries;
  }
  const double q = static_cast<double>(report.queries);
  report.top1_accuracy /= q;
  report.top5_accuracy /= q;
  report.chance /= q;
  report.clusters = all_labels.size();
  return report;
}

inline nlohmann::json to_json(const RankingOverlapReport& r) {
  return {{"k", r.k},
          {"overlap_at_k", r.overlap_at_k},
          {"rank_correlation", r.rank_correlation},
          {"a", r.label_a},
          {"b", r.label_b}};
}

inline nlohmann::json to_json(const RetrievalReport& r) {
  return {{"queries", r.queries},
          {"clusters", r.clusters},
          {"top1_accuracy", r.top1_accuracy},
          {"top5_accuracy", r.top5_accuracy},
          {"chance", r.chance}};
}

inline std::string to_text(const RankingOverlapReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-18s %s vs %s\n%-18s %zu\n%-18s %.6f\n%-18s %.6f\n", "ranking overlap",
                r.label_a.c_str(), r.label_b.c_str(), "k", r.k, "overlap@k", r.overlap_at_k,
                "rank correlation", r.rank_correlation);
  return buf;
}

inline std::string to_text(const RetrievalReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-18s %zu\n%-18s %zu\n%-18s %.6f\n%-18s %.6f\n%-18s %.6f\n", "queries",
                r.queries, "clusters", r.clusters, "top1 accuracy", r.top1_accuracy, "top5 accuracy",
                r.top5_accuracy, "chance", r.chance);
  return buf;
}

}  // namespace affectrec
