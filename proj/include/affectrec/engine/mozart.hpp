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

// Projection head for the affect-aware contrastive engine: maps enriched
// (embedding + V-A) vectors of both modalities into one joint space where
// Euclidean distance tracks affective closeness.

#include <algorithm>
#include <random>
#include <vector>

#include "affectrec/affect.hpp"
#include "affectrec/error.hpp"
#include "affectrec/neural/loss.hpp"
#include "affectrec/neural/mlp.hpp"
#include "affectrec/neural/optimizer.hpp"
#include "affectrec/neural/trainer.hpp"

namespace affectrec {

struct ProjectionConfig {
  double sigma = 0.5;
  double margin = 0.5;
  int hidden_dim = 256;
  int joint_dim = 128;
  nn::TrainConfig train;
  nn::AdamConfig adam;

  void validate() const {
    require(sigma > 0.0, ErrorKind::invalid_parameter, "sigma must be positive");
    require(margin > 0.0, ErrorKind::invalid_parameter, "margin must be positive");
    require(hidden_dim > 0 && joint_dim > 0, ErrorKind::invalid_parameter,
            "projection dimensions must be positive");
    require(train.batch_size >= 2, ErrorKind::invalid_parameter,
            "contrastive batches need at least two items");
    train.validate();
    adam.validate();
  }
};

struct ProjectionResult {
  nn::Mlp head;
  nn::TrainHistory history;
};

/// Soft pair targets S_ij = gaussian_similarity(va_distance(i, j), sigma) for
/// the rows of a (n x 2) V-A table.
inline Matrix soft_similarity_targets(const Matrix& va, double sigma) {
  const Eigen::Index n = va.rows();
  Matrix s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = va_distance(VAVector(va(i, 0), va(i, 1)), VAVector(va(j, 0), va(j, 1)));
      s(i, j) = s(j, i) = gaussian_similarity(d, sigma);
    }
  }
  return s;
}

namespace detail {

struct PairedCorpus {
  Matrix inputs;  // music rows first, then paintings
  Matrix va;
  std::vector<double> weights;
};

inline nn::LossAndGradient projection_loss(const nn::Mlp& head, const PairedCorpus& corpus,
                                           std::span<const Eigen::Index> rows, double sigma,
                                           double margin, nn::ForwardTrace* trace) {
  const Matrix x = nn::gather_rows(corpus.inputs, rows);
  const Matrix va = nn::gather_rows(corpus.va, rows);
  std::vector<double> w;
  w.reserve(rows.size());
  for (auto r : rows) w.push_back(corpus.weights[static_cast<std::size_t>(r)]);
  Matrix z;
  if (trace != nullptr) {
    *trace = head.forward_trace(x);
    z = trace->output;
  } else {
    z = head.forward(x);
  }
  return nn::contrastive_batch_loss(z, soft_similarity_targets(va, sigma), w, margin);
}

}  // namespace detail

/// Trains the two-layer head [input, hidden, joint] on the weighted
/// soft-label contrastive loss. Each mini-batch is stratified: half music,
/// half paintings, every within-batch pair contributing with weight
/// lambda_i * lambda_j.
inline ProjectionResult train_mozart_projection(const Matrix& enriched_music,
                                                const Matrix& enriched_paintings,
                                                const Matrix& va_music, const Matrix& va_paintings,
                                                nn::ModalityWeights weights,
                                                const ProjectionConfig& config) {
  config.validate();
  require(enriched_music.cols() == enriched_paintings.cols(), ErrorKind::shape,
          "music and painting enriched embeddings differ in dimension");
  require(va_music.rows() == enriched_music.rows() && va_paintings.rows() == enriched_paintings.rows() &&
              va_music.cols() == 2 && va_paintings.cols() == 2,
          ErrorKind::shape, "V-A tables must be (rows x 2) and match the embeddings");
  require(enriched_music.rows() >= 2 && enriched_paintings.rows() >= 2, ErrorKind::insufficient_data,
          "projection training needs at least two items per modality");

  const Eigen::Index n_music = enriched_music.rows();
  const Eigen::Index n_total = n_music + enriched_paintings.rows();
  detail::PairedCorpus corpus{Matrix(n_total, enriched_music.cols()), Matrix(n_total, 2), {}};
  corpus.inputs << enriched_music, enriched_paintings;
  corpus.va << va_music, va_paintings;
  corpus.weights.assign(static_cast<std::size_t>(n_music), weights.music);
  corpus.weights.resize(static_cast<std::size_t>(n_total), weights.painting);

  std::mt19937_64 rng(config.train.rng_seed);
  ProjectionResult result;
  result.head = nn::Mlp({static_cast<int>(enriched_music.cols()), config.hidden_dim, config.joint_dim},
                        nn::Activation::relu, rng);
  nn::AdamState state(result.head, config.adam);

  nn::Split music_split = nn::split_rows(n_music, config.train.validation_fraction, rng);
  nn::Split painting_split = nn::split_rows(enriched_paintings.rows(), config.train.validation_fraction, rng);
  for (auto& r : painting_split.train) r += n_music;
  for (auto& r : painting_split.validation) r += n_music;
  std::vector<Eigen::Index> validation = music_split.validation;
  validation.insert(validation.end(), painting_split.validation.begin(), painting_split.validation.end());

  auto& music_train = music_split.train;
  auto& painting_train = painting_split.train;
  const std::size_t batch = static_cast<std::size_t>(config.train.batch_size);
  const std::size_t music_quota = std::min(music_train.size(), std::max<std::size_t>(1, batch / 2));
  const std::size_t painting_quota = std::min(painting_train.size(), batch - batch / 2);
  const std::size_t batches = (music_train.size() + painting_train.size() + batch - 1) / batch;

  nn::EarlyStopping watch(config.train.patience, config.train.min_delta);
  std::size_t music_pos = 0, painting_pos = 0;
  auto take = [&rng](std::vector<Eigen::Index>& pool, std::size_t& pos, std::size_t count,
                     std::vector<Eigen::Index>& out) {
    for (std::size_t k = 0; k < count; ++k) {
      if (pos == pool.size()) {
        std::shuffle(pool.begin(), pool.end(), rng);
        pos = 0;
      }
      out.push_back(pool[pos++]);
    }
  };
  std::shuffle(music_train.begin(), music_train.end(), rng);
  std::shuffle(painting_train.begin(), painting_train.end(), rng);

  for (int epoch = 1; epoch <= config.train.max_epochs; ++epoch) {
    double weighted = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      std::vector<Eigen::Index> rows;
      take(music_train, music_pos, music_quota, rows);
      take(painting_train, painting_pos, painting_quota, rows);
      nn::ForwardTrace trace;
      const auto loss = detail::projection_loss(result.head, corpus, rows, config.sigma, config.margin, &trace);
      nn::check_finite_loss(loss.loss, "projection head");
      const nn::Gradients grads = result.head.backward(trace, loss.gradient);
      nn::optimizer_step(result.head, grads, state);
      weighted += loss.loss;
    }
    const double val =
        detail::projection_loss(result.head, corpus, validation, config.sigma, config.margin, nullptr).loss;
    nn::check_finite_loss(val, "projection head validation");
    result.history.epochs.push_back({epoch, weighted / static_cast<double>(batches), val});
    if (watch.observe(epoch, val, result.head)) {
      result.history.stopped_early = epoch < config.train.max_epochs;
      break;
    }
  }
  result.history.best_epoch = watch.best_epoch();
  if (watch.best_epoch() > 0) result.head = watch.best();
  return result;
}

}  // namespace affectrec
