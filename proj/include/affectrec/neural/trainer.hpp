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
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "affectrec/error.hpp"
#include "affectrec/neural/loss.hpp"
#include "affectrec/neural/mlp.hpp"
#include "affectrec/neural/optimizer.hpp"

namespace affectrec::nn {

struct TrainConfig {
  int max_epochs = 50;
  int patience = 5;
  int batch_size = 64;
  std::uint64_t rng_seed = 0;
  double validation_fraction = 0.1;
  // Validation loss must fall by more than this to count as an improvement.
  double min_delta = 0.0;

  void validate() const {
    require(max_epochs > 0, ErrorKind::invalid_parameter, "max_epochs must be positive");
    require(patience > 0 && patience <= max_epochs, ErrorKind::invalid_parameter,
            "patience must lie in [1, max_epochs]");
    require(batch_size > 0, ErrorKind::invalid_parameter, "batch_size must be positive");
    require(validation_fraction > 0.0 && validation_fraction < 1.0, ErrorKind::invalid_parameter,
            "validation_fraction must lie in (0, 1)");
    require(min_delta >= 0.0, ErrorKind::invalid_parameter, "min_delta must be nonnegative");
  }
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  bool stopped_early = false;

  int stop_epoch() const { return epochs.empty() ? 0 : epochs.back().epoch; }
};

/// Tracks the best validation loss and keeps a snapshot of the best parameters.
class EarlyStopping {
 public:
  EarlyStopping(int patience, double min_delta) : patience_(patience), min_delta_(min_delta) {}

  /// Returns true when training should stop.
  bool observe(int epoch, double validation_loss, const Mlp& params) {
    if (validation_loss < best_loss_ - min_delta_) {
      best_loss_ = validation_loss;
      best_epoch_ = epoch;
      best_ = params;
      stale_ = 0;
      return false;
    }
    return ++stale_ >= patience_;
  }

  int best_epoch() const noexcept { return best_epoch_; }
  const Mlp& best() const noexcept { return best_; }

 private:
  int patience_;
  double min_delta_;
  double best_loss_ = std::numeric_limits<double>::infinity();
  int best_epoch_ = 0;
  int stale_ = 0;
  Mlp best_;
};

/// Deterministic train/validation split of `n` row indices.
struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> validation;
};

inline Split split_rows(Eigen::Index n, double validation_fraction, std::mt19937_64& rng) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  auto n_val = static_cast<Eigen::Index>(std::llround(validation_fraction * static_cast<double>(n)));
  n_val = std::clamp<Eigen::Index>(n_val, 1, n - 1);
  Split split;
  split.validation.assign(order.begin(), order.begin() + n_val);
  split.train.assign(order.begin() + n_val, order.end());
  std::sort(split.validation.begin(), split.validation.end());
  return split;
}

inline Matrix gather_rows(const Matrix& data, std::span<const Eigen::Index> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), data.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = data.row(rows[i]);
  return out;
}

inline void check_finite_loss(double loss, const char* what) {
  if (!std::isfinite(loss)) fail(ErrorKind::divergence, std::string(what) + ": loss became non-finite");
}

struct Autoencoder {
  Mlp encoder;
  Mlp decoder;
  TrainHistory history;

  Matrix encode(const Matrix& data) const { return encoder.forward(data); }
  Matrix reconstruct(const Matrix& data) const { return decoder.forward(encoder.forward(data)); }
};

/// Trains an encoder with sizes `layers` and a mirrored decoder on MSE
/// reconstruction. The returned networks are the ones with the best
/// validation loss seen.
inline Autoencoder train_autoencoder(const Matrix& data, const std::vector<int>& layers,
                                     const TrainConfig& config, const AdamConfig& adam = {}) {
  config.validate();
  require(layers.size() >= 2, ErrorKind::shape, "autoencoder needs at least two layer sizes");
  require(layers.front() == data.cols(), ErrorKind::shape,
          "autoencoder input size " + std::to_string(layers.front()) + " != data dimension " +
              std::to_string(data.cols()));
  require(data.rows() >= 2LL * config.batch_size, ErrorKind::insufficient_data,
          "autoencoder training needs at least 2 * batch_size rows, got " +
              std::to_string(data.rows()));
  require(data.allFinite(), ErrorKind::invalid_parameter, "training data must be finite");

  std::mt19937_64 rng(config.rng_seed);
  const std::vector<int> mirrored(layers.rbegin(), layers.rend());
  Mlp encoder(layers, Activation::relu, rng);
  Mlp decoder(mirrored, Activation::relu, rng);
  AdamState enc_state(encoder, adam), dec_state(decoder, adam);

  const Split split = split_rows(data.rows(), config.validation_fraction, rng);
  const Matrix validation = gather_rows(data, split.validation);
  std::vector<Eigen::Index> order = split.train;

  auto validation_loss = [&](const Mlp& enc, const Mlp& dec) {
    return mse_loss(dec.forward(enc.forward(validation)), validation).loss;
  };

  Autoencoder result;
  EarlyStopping enc_watch(config.patience, config.min_delta);
  Mlp best_decoder = decoder;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double weighted = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      const Matrix batch = gather_rows(data, std::span(order).subspan(start, end - start));
      const ForwardTrace enc_trace = encoder.forward_trace(batch);
      const ForwardTrace dec_trace = decoder.forward_trace(enc_trace.output);
      const LossAndGradient loss = mse_loss(dec_trace.output, batch);
      check_finite_loss(loss.loss, "autoencoder");
      Matrix d_code;
      const Gradients dec_grads = decoder.backward(dec_trace, loss.gradient, &d_code);
      const Gradients enc_grads = encoder.backward(enc_trace, d_code);
      optimizer_step(decoder, dec_grads, dec_state);
      optimizer_step(encoder, enc_grads, enc_state);
      weighted += loss.loss * static_cast<double>(end - start);
    }
    const double val = validation_loss(encoder, decoder);
    check_finite_loss(val, "autoencoder validation");
    result.history.epochs.push_back({epoch, weighted / static_cast<double>(order.size()), val});
    const int before = enc_watch.best_epoch();
    const bool stop = enc_watch.observe(epoch, val, encoder);
    if (enc_watch.best_epoch() != before) best_decoder = decoder;
    if (stop) {
      result.history.stopped_early = epoch < config.max_epochs;
      break;
    }
  }
  result.history.best_epoch = enc_watch.best_epoch();
  result.encoder = enc_watch.best_epoch() > 0 ? enc_watch.best() : encoder;
  result.decoder = enc_watch.best_epoch() > 0 ? best_decoder : decoder;
  return result;
}

}  // namespace affectrec::nn
