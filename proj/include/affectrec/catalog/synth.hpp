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

// Synthetic paired corpus with known affective clusters, for tests and demos.

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "affectrec/affect.hpp"
#include "affectrec/catalog/record.hpp"

namespace affectrec {

struct SynthConfig {
  std::uint64_t seed = 1;
  int n_music = 40;
  int n_paintings = 40;
  int n_clusters = 4;
  int feature_dim_m = 32;
  int feature_dim_p = 48;
  int text_dim = 16;
  double va_noise = 0.1;
  double feature_noise = 0.1;
};

/// Centers on a circle of radius sqrt(0.5) starting at 45 degrees, so four
/// clusters land on the quadrant midpoints (+-0.5, +-0.5).
inline std::vector<VAVector> synth_cluster_centers(int n_clusters) {
  require(n_clusters >= 1, ErrorKind::invalid_parameter, "n_clusters must be positive");
  std::vector<VAVector> centers;
  const double radius = std::sqrt(0.5);
  for (int c = 0; c < n_clusters; ++c) {
    const double angle = std::numbers::pi / 4.0 + 2.0 * std::numbers::pi * c / n_clusters;
    // Rounded so the quadrant case is exact.
    const double v = std::round(radius * std::cos(angle) * 1e12) / 1e12;
    const double a = std::round(radius * std::sin(angle) * 1e12) / 1e12;
    centers.emplace_back(v, a);
  }
  return centers;
}

/// Items are assigned to clusters round-robin. V-A draws come from one RNG
/// stream and features from another, so changing a feature dimension never
/// perturbs the affective labels.
inline Catalog synth_catalog(const SynthConfig& cfg) {
  require(cfg.n_music > 0 && cfg.n_paintings > 0, ErrorKind::invalid_parameter,
          "synthetic catalog needs positive item counts");
  require(cfg.feature_dim_m > 0 && cfg.feature_dim_p > 0 && cfg.text_dim >= 0,
          ErrorKind::invalid_parameter, "synthetic feature dimensions must be positive");
  const auto centers = synth_cluster_centers(cfg.n_clusters);

  std::seed_seq va_seed{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), 1u};
  std::seed_seq feature_seed{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), 2u};
  std::mt19937_64 va_stream(va_seed);
  std::mt19937_64 feature_stream(feature_seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  // Per modality and cluster: feature = A_c * va + b_c + noise.
  struct Embedding {
    Matrix a;
    Vector b;
  };
  auto make_embeddings = [&](int dim) {
    std::vector<Embedding> out;
    for (int c = 0; c < cfg.n_clusters; ++c) {
      Embedding e{Matrix(dim, 2), Vector(dim)};
      for (Eigen::Index i = 0; i < e.a.size(); ++i) e.a.data()[i] = unit(feature_stream);
      for (Eigen::Index i = 0; i < e.b.size(); ++i) e.b[i] = unit(feature_stream);
      out.push_back(std::move(e));
    }
    return out;
  };

  auto draw_va = [&](int cluster) {
    const auto& c = centers[static_cast<std::size_t>(cluster)];
    const double v = c.valence() + cfg.va_noise * unit(va_stream);
    const double a = c.arousal() + cfg.va_noise * unit(va_stream);
    return VAVector::clamped(v, a);
  };

  auto embed = [&](const Embedding& e, const VAVector& va) {
    std::vector<double> out(static_cast<std::size_t>(e.b.size()));
    for (Eigen::Index k = 0; k < e.b.size(); ++k) {
      out[static_cast<std::size_t>(k)] = e.a(k, 0) * va.valence() + e.a(k, 1) * va.arousal() +
                                         e.b[k] + cfg.feature_noise * unit(feature_stream);
    }
    return out;
  };

  std::vector<FeatureRecord> music, paintings;
  std::vector<VAVector> music_va, painting_va;
  for (int i = 0; i < cfg.n_music; ++i) music_va.push_back(draw_va(i % cfg.n_clusters));
  for (int i = 0; i < cfg.n_paintings; ++i) painting_va.push_back(draw_va(i % cfg.n_clusters));

  const auto music_emb = make_embeddings(cfg.feature_dim_m);
  const auto painting_emb = make_embeddings(cfg.feature_dim_p);
  const auto music_text = make_embeddings(cfg.text_dim);
  const auto painting_text = make_embeddings(cfg.text_dim);

  auto build = [&](Modality m, int n, const std::vector<VAVector>& vas, const std::vector<Embedding>& emb,
                   const std::vector<Embedding>& text, std::vector<FeatureRecord>& out) {
    const char* prefix = m == Modality::music ? "m" : "p";
    for (int i = 0; i < n; ++i) {
      const int cluster = i % cfg.n_clusters;
      FeatureRecord r;
      char id[32];
      std::snprintf(id, sizeof id, "%s%05d", prefix, i);
      r.id = id;
      r.modality = m;
      r.va = vas[static_cast<std::size_t>(i)];
      r.features = embed(emb[static_cast<std::size_t>(cluster)], r.va);
      if (cfg.text_dim > 0) r.text_features = embed(text[static_cast<std::size_t>(cluster)], r.va);
      r.metadata[kClusterKey] = std::to_string(cluster);
      r.metadata["title"] = std::string(m == Modality::music ? "Synthetic track " : "Synthetic painting ") +
                            std::to_string(i);
      r.metadata["asset"] = std::string(m == Modality::music ? "audio/" : "images/") + r.id +
                            (m == Modality::music ? ".mp3" : ".jpg");
      out.push_back(std::move(r));
    }
  };
  build(Modality::music, cfg.n_music, music_va, music_emb, music_text, music);
  build(Modality::painting, cfg.n_paintings, painting_va, painting_emb, painting_text, paintings);

  CatalogProvenance prov;
  prov.source = "synth:seed=" + std::to_string(cfg.seed);
  prov.music_read = music.size();
  prov.paintings_read = paintings.size();
  return Catalog(std::move(music), std::move(paintings), std::move(prov));
}

}  // namespace affectrec
