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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "affectrec/affect.hpp"
#include "affectrec/error.hpp"
#include "affectrec/neural/mlp.hpp"

namespace affectrec {

enum class Modality { music, painting };

constexpr std::string_view to_string(Modality m) {
  return m == Modality::music ? "music" : "painting";
}

inline Modality parse_modality(std::string_view text) {
  if (text == "music") return Modality::music;
  if (text == "painting") return Modality::painting;
  fail(ErrorKind::parse, "unknown modality '" + std::string(text) + "'");
}

struct FeatureRecord {
  std::string id;
  Modality modality = Modality::music;
  std::vector<double> features;
  // Optional second stream (text-description embedding) used by Salieri.
  std::vector<double> text_features;
  VAVector va;
  std::optional<StabilityStats> stability;
  std::map<std::string, std::string> metadata;

  friend bool operator==(const FeatureRecord&, const FeatureRecord&) = default;
};

/// Metadata key holding a synthetic item's ground-truth cluster.
inline constexpr const char* kClusterKey = "cluster";

struct CatalogProvenance {
  std::string source;
  std::size_t music_read = 0;
  std::size_t paintings_read = 0;
  std::size_t dropped_unstable = 0;
  std::string music_checksum;
  std::string paintings_checksum;

  friend bool operator==(const CatalogProvenance&, const CatalogProvenance&) = default;
};

class Catalog {
 public:
  Catalog() = default;
  Catalog(std::vector<FeatureRecord> music, std::vector<FeatureRecord> paintings,
          CatalogProvenance provenance = {})
      : music_(std::move(music)), paintings_(std::move(paintings)), provenance_(std::move(provenance)) {
    validate();
  }

  const std::vector<FeatureRecord>& music() const noexcept { return music_; }
  const std::vector<FeatureRecord>& paintings() const noexcept { return paintings_; }
  const std::vector<FeatureRecord>& items(Modality m) const {
    return m == Modality::music ? music_ : paintings_;
  }
  const CatalogProvenance& provenance() const noexcept { return provenance_; }

  const FeatureRecord* find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return nullptr;
    return it->second.first == Modality::music ? &music_[it->second.second]
                                               : &paintings_[it->second.second];
  }

  std::vector<std::string> ids(Modality m) const {
    std::vector<std::string> out;
    for (const auto& r : items(m)) out.push_back(r.id);
    return out;
  }

  Matrix features(Modality m) const { return stack(m, false); }

  /// Primary features followed by the text-description stream.
  Matrix composed_features(Modality m) const { return stack(m, true); }

  Matrix va_table(Modality m) const {
    const auto& rs = items(m);
    Matrix out(static_cast<Eigen::Index>(rs.size()), 2);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      out(static_cast<Eigen::Index>(i), 0) = rs[i].va.valence();
      out(static_cast<Eigen::Index>(i), 1) = rs[i].va.arousal();
    }
    return out;
  }

  /// Cluster label per id, from metadata; items without one are omitted.
  std::unordered_map<std::string, std::string> cluster_labels() const {
    std::unordered_map<std::string, std::string> out;
    for (const auto* rs : {&music_, &paintings_}) {
      for (const auto& r : *rs) {
        if (auto it = r.metadata.find(kClusterKey); it != r.metadata.end()) out[r.id] = it->second;
      }
    }
    return out;
  }

  friend bool operator==(const Catalog& a, const Catalog& b) {
    return a.music_ == b.music_ && a.paintings_ == b.paintings_ && a.provenance_ == b.provenance_;
  }

 private:
  void validate() {
    index_.clear();
    for (const auto m : {Modality::music, Modality::painting}) {
      const auto& rs = items(m);
      for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto& r = rs[i];
        require(r.modality == m, ErrorKind::parse, "record '" + r.id + "' has the wrong modality");
        require(!r.id.empty(), ErrorKind::parse, "record with empty id");
        if (!index_.emplace(r.id, std::pair{m, i}).second) {
          fail(ErrorKind::duplicate_id, "duplicate id '" + r.id + "'");
        }
        for (double x : r.features) {
          require(std::isfinite(x), ErrorKind::parse, "non-finite feature in '" + r.id + "'");
        }
        for (double x : r.text_features) {
          require(std::isfinite(x), ErrorKind::parse, "non-finite text feature in '" + r.id + "'");
        }
        if (i > 0) {
          require(r.features.size() == rs.front().features.size(), ErrorKind::parse,
                  "feature dimension of '" + r.id + "' (" + std::to_string(r.features.size()) +
                      ") differs from '" + rs.front().id + "' (" +
                      std::to_string(rs.front().features.size()) + ")");
          require(r.text_features.size() == rs.front().text_features.size(), ErrorKind::parse,
                  "text feature dimension of '" + r.id + "' differs from '" + rs.front().id + "'");
        }
      }
    }
  }

  Matrix stack(Modality m, bool with_text) const {
    const auto& rs = items(m);
    if (rs.empty()) return Matrix(0, 0);
    const auto d1 = static_cast<Eigen::Index>(rs.front().features.size());
    const auto d2 = with_text ? static_cast<Eigen::Index>(rs.front().text_features.size()) : 0;
    Matrix out(static_cast<Eigen::Index>(rs.size()), d1 + d2);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      for (Eigen::Index k = 0; k < d1; ++k) out(row, k) = rs[i].features[static_cast<std::size_t>(k)];
      for (Eigen::Index k = 0; k < d2; ++k) out(row, d1 + k) = rs[i].text_features[static_cast<std::size_t>(k)];
    }
    return out;
  }

  std::vector<FeatureRecord> music_;
  std::vector<FeatureRecord> paintings_;
  CatalogProvenance provenance_;
  std::unordered_map<std::string, std::pair<Modality, std::size_t>> index_;
};

}  // namespace affectrec
