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

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "affectrec/affect.hpp"
#include "affectrec/catalog/preprocess.hpp"
#include "affectrec/catalog/record.hpp"
#include "affectrec/engine/index.hpp"

namespace affectrec {

namespace detail {

inline Matrix euclidean_matrix(const Matrix& rows, const Matrix& cols) {
  require(rows.cols() == cols.cols(), ErrorKind::shape, "embedding dimensions disagree");
  Matrix out(rows.rows(), cols.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < cols.rows(); ++j) out(i, j) = (rows.row(i) - cols.row(j)).norm();
  }
  return out;
}

inline Matrix cosine_matrix(const Matrix& rows, const std::vector<std::string>& row_ids,
                            const Matrix& cols, const std::vector<std::string>& col_ids) {
  require(rows.cols() == cols.cols(), ErrorKind::shape, "embedding dimensions disagree");
  auto norms = [](const Matrix& m, const std::vector<std::string>& ids) {
    Vector n = m.rowwise().norm();
    for (Eigen::Index i = 0; i < n.size(); ++i) {
      if (!(n[i] > 0.0)) {
        fail(ErrorKind::degenerate_embedding,
             "zero-norm embedding for '" + ids[static_cast<std::size_t>(i)] + "'");
      }
    }
    return n;
  };
  const Vector rn = norms(rows, row_ids);
  const Vector cn = norms(cols, col_ids);
  Matrix out = rows * cols.transpose();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) /= rn[i] * cn[j];
  }
  return out;
}

inline std::string matrix_checksum(const Matrix& m) {
  return hex64(io::checksum64(std::string_view(reinterpret_cast<const char*>(m.data()),
                                               static_cast<std::size_t>(m.size()) * sizeof(double))));
}

}  // namespace detail

/// Affective distance between every music track and painting.
inline SimilarityIndex build_haydn_index(const std::vector<std::string>& music_ids, const Matrix& va_music,
                                         const std::vector<std::string>& painting_ids,
                                         const Matrix& va_paintings) {
  require(!music_ids.empty() && !painting_ids.empty(), ErrorKind::invalid_catalog,
          "haydn index needs music and paintings");
  require(va_music.rows() == static_cast<Eigen::Index>(music_ids.size()) && va_music.cols() == 2 &&
              va_paintings.rows() == static_cast<Eigen::Index>(painting_ids.size()) && va_paintings.cols() == 2,
          ErrorKind::shape, "V-A tables must be (N x 2) and match the id lists");
  Matrix values(va_music.rows(), va_paintings.rows());
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    const VAVector m(va_music(i, 0), va_music(i, 1));
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      values(i, j) = va_distance(m, VAVector(va_paintings(j, 0), va_paintings(j, 1)));
    }
  }
  nlohmann::json info{{"metric", "va_euclidean"},
                      {"music_va", detail::matrix_checksum(va_music)},
                      {"painting_va", detail::matrix_checksum(va_paintings)}};
  return {Engine::haydn, Semantics::distance, music_ids, painting_ids, std::move(values), std::move(info)};
}

inline SimilarityIndex build_haydn_index(const Catalog& catalog) {
  require(!catalog.music().empty() && !catalog.paintings().empty(), ErrorKind::invalid_catalog,
          "haydn index needs music and paintings");
  return build_haydn_index(catalog.ids(Modality::music), catalog.va_table(Modality::music),
                           catalog.ids(Modality::painting), catalog.va_table(Modality::painting));
}

inline SimilarityIndex build_haydn_index(const PreprocessedBundle& bundle) {
  return build_haydn_index(bundle.music_ids, bundle.va_music, bundle.painting_ids, bundle.va_paintings);
}

/// Euclidean distance between joint-space embeddings.
inline SimilarityIndex build_mozart_index(const PreprocessedBundle& bundle) {
  require(bundle.mozart_music.cols() == bundle.mozart_paintings.cols(), ErrorKind::shape,
          "mozart joint embeddings differ in dimension");
  nlohmann::json info{{"metric", "joint_euclidean"},
                      {"joint_dim", bundle.mozart_music.cols()},
                      {"music", detail::matrix_checksum(bundle.mozart_music)},
                      {"paintings", detail::matrix_checksum(bundle.mozart_paintings)}};
  if (bundle.provenance.contains("config")) info["config"] = bundle.provenance["config"];
  return {Engine::mozart, Semantics::distance, bundle.music_ids, bundle.painting_ids,
          detail::euclidean_matrix(bundle.mozart_music, bundle.mozart_paintings), std::move(info)};
}

enum class SalieriMetric { cosine, euclidean };

/// Cosine similarity of the composed-stream embeddings by default; the
/// euclidean variant stores distances instead.
inline SimilarityIndex build_salieri_index(const PreprocessedBundle& bundle,
                                           SalieriMetric metric = SalieriMetric::cosine) {
  nlohmann::json info{{"metric", metric == SalieriMetric::cosine ? "cosine" : "euclidean"},
                      {"embed_dim", bundle.salieri_music.cols()},
                      {"music", detail::matrix_checksum(bundle.salieri_music)},
                      {"paintings", detail::matrix_checksum(bundle.salieri_paintings)}};
  if (metric == SalieriMetric::euclidean) {
    return {Engine::salieri, Semantics::distance, bundle.music_ids, bundle.painting_ids,
            detail::euclidean_matrix(bundle.salieri_music, bundle.salieri_paintings), std::move(info)};
  }
  return {Engine::salieri, Semantics::similarity, bundle.music_ids, bundle.painting_ids,
          detail::cosine_matrix(bundle.salieri_music, bundle.music_ids, bundle.salieri_paintings,
                                bundle.painting_ids),
          std::move(info)};
}

/// Painting x painting cosine similarity over raw visual features.
inline SimilarityIndex build_visual_index(const std::vector<std::string>& painting_ids,
                                          const Matrix& features) {
  require(painting_ids.size() >= 2, ErrorKind::invalid_catalog, "visual index needs at least two paintings");
  require(features.rows() == static_cast<Eigen::Index>(painting_ids.size()), ErrorKind::shape,
          "visual features do not match the id list");
  nlohmann::json info{{"metric", "cosine"}, {"features", detail::matrix_checksum(features)}};
  return {Engine::visual, Semantics::similarity, painting_ids, painting_ids,
          detail::cosine_matrix(features, painting_ids, features, painting_ids), std::move(info)};
}

inline SimilarityIndex build_visual_index(const PreprocessedBundle& bundle) {
  return build_visual_index(bundle.painting_ids, bundle.visual_paintings);
}

inline SimilarityIndex build_index(Engine engine, const PreprocessedBundle& bundle,
                                   SalieriMetric salieri_metric = SalieriMetric::cosine) {
  switch (engine) {
    case Engine::mozart: return build_mozart_index(bundle);
    case Engine::haydn: return build_haydn_index(bundle);
    case Engine::salieri: return build_salieri_index(bundle, salieri_metric);
    case Engine::visual: return build_visual_index(bundle);
  }
  fail(ErrorKind::invalid_parameter, "unknown engine");
}

}  // namespace affectrec
