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
#include <cmath>
#include <span>
#include <vector>

#include "affectrec/error.hpp"
#include "affectrec/neural/mlp.hpp"

namespace affectrec::nn {

inline double mse_loss(std::span<const double> prediction, std::span<const double> target) {
  require(prediction.size() == target.size(), ErrorKind::shape, "mse_loss: length mismatch");
  require(!prediction.empty(), ErrorKind::shape, "mse_loss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double d = prediction[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(prediction.size());
}

struct LossAndGradient {
  double loss = 0.0;
  Matrix gradient;
};

/// Mean over every element of the batch, with its gradient.
inline LossAndGradient mse_loss(const Matrix& prediction, const Matrix& target) {
  require(prediction.rows() == target.rows() && prediction.cols() == target.cols(),
          ErrorKind::shape, "mse_loss: shape mismatch");
  const double count = static_cast<double>(prediction.size());
  Matrix diff = prediction - target;
  return {diff.squaredNorm() / count, (2.0 / count) * diff};
}

/// S d^2 + (1 - S) max(0, m - d)^2 where d is the Euclidean distance of the pair.
inline double contrastive_pair_loss(std::span<const double> z_i, std::span<const double> z_j,
                                    double similarity, double margin) {
  require(z_i.size() == z_j.size(), ErrorKind::shape, "contrastive_pair_loss: dimension mismatch");
  require(margin > 0.0, ErrorKind::invalid_parameter, "contrastive_pair_loss: margin must be positive");
  double sq = 0.0;
  for (std::size_t k = 0; k < z_i.size(); ++k) {
    const double d = z_i[k] - z_j[k];
    sq += d * d;
  }
  const double hinge = std::max(0.0, margin - std::sqrt(sq));
  return similarity * sq + (1.0 - similarity) * hinge * hinge;
}

inline double weighted_pair_loss(double loss, double lambda_i, double lambda_j) {
  return lambda_i * lambda_j * loss;
}

struct ModalityWeights {
  double music = 0.0;
  double painting = 0.0;
};

/// Each modality is weighted by the other modality's share of the corpus.
inline ModalityWeights modality_weights(long long n_music, long long n_paintings) {
  require(n_music > 0 && n_paintings > 0, ErrorKind::invalid_catalog,
          "modality_weights: both modalities need at least one item");
  const double total = static_cast<double>(n_music) + static_cast<double>(n_paintings);
  const double music = static_cast<double>(n_paintings) / total;
  return {music, 1.0 - music};
}

/// Weighted soft-label contrastive loss over every unordered pair of rows of
/// `embeddings`, averaged over the number of pairs.
///
/// `targets(i, j)` holds the pair's soft similarity S_ij and `item_weights[i]`
/// the per-item modality weight; each pair contributes weight_i * weight_j * L_ij.
inline LossAndGradient contrastive_batch_loss(const Matrix& embeddings, const Matrix& targets,
                                              std::span<const double> item_weights, double margin) {
  const Eigen::Index n = embeddings.rows();
  require(n >= 2, ErrorKind::insufficient_data, "contrastive batch needs at least two rows");
  require(targets.rows() == n && targets.cols() == n, ErrorKind::shape,
          "contrastive targets must be n x n");
  require(static_cast<Eigen::Index>(item_weights.size()) == n, ErrorKind::shape,
          "one weight per row required");
  require(margin > 0.0, ErrorKind::invalid_parameter, "margin must be positive");

  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  LossAndGradient out{0.0, Matrix::Zero(n, embeddings.cols())};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double s = targets(i, j);
      const double w = item_weights[static_cast<std::size_t>(i)] *
                       item_weights[static_cast<std::size_t>(j)] / pairs;
      auto diff = (embeddings.row(i) - embeddings.row(j)).eval();
      const double sq = diff.squaredNorm();
      const double d = std::sqrt(sq);
      const double hinge = std::max(0.0, margin - d);
      out.loss += w * (s * sq + (1.0 - s) * hinge * hinge);

      // d/dz_i [S d^2] = 2 S (z_i - z_j); d/dz_i [(1-S)(m-d)^2] = -2 (1-S)(m-d) (z_i - z_j) / d.
      double coeff = 2.0 * s;
      if (hinge > 0.0 && d > 1e-12) coeff -= 2.0 * (1.0 - s) * hinge / d;
      out.gradient.row(i) += (w * coeff) * diff;
      out.gradient.row(j) -= (w * coeff) * diff;
    }
  }
  return out;
}

}  // namespace affectrec::nn
