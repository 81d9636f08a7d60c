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

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "affectrec/error.hpp"

namespace affectrec {

/// Row-per-item dense matrix used throughout the pipeline.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace affectrec

namespace affectrec::nn {

enum class Activation : std::uint8_t { relu = 0, identity = 1 };

/// One affine layer: y = W x + b with W of shape (out, in).
struct Dense {
  Matrix weights;
  Vector bias;

  Eigen::Index in_dim() const { return weights.cols(); }
  Eigen::Index out_dim() const { return weights.rows(); }
};

using Gradients = std::vector<Dense>;

/// Intermediate values kept by a forward pass for backpropagation.
struct ForwardTrace {
  std::vector<Matrix> inputs;       // input to each layer
  std::vector<Matrix> pre_activations;
  Matrix output;
};

/// Feed-forward network. Hidden layers use `hidden`; the last layer is identity.
class Mlp {
 public:
  Mlp() = default;

  /// Weights and biases drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  Mlp(const std::vector<int>& layer_sizes, Activation hidden, std::mt19937_64& rng)
      : Mlp(zeros(layer_sizes, hidden)) {
    for (auto& layer : layers_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in_dim()));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = dist(rng);
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = dist(rng);
    }
  }

  static Mlp zeros(const std::vector<int>& layer_sizes, Activation hidden) {
    require(layer_sizes.size() >= 2, ErrorKind::shape, "an MLP needs at least two layer sizes");
    for (int s : layer_sizes) require(s > 0, ErrorKind::shape, "layer sizes must be positive");
    Mlp net;
    net.hidden_ = hidden;
    for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
      net.layers_.push_back(Dense{Matrix::Zero(layer_sizes[i + 1], layer_sizes[i]),
                                  Vector::Zero(layer_sizes[i + 1])});
    }
    return net;
  }

  static Mlp from_layers(std::vector<Dense> layers, Activation hidden) {
    require(!layers.empty(), ErrorKind::shape, "an MLP needs at least one layer");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      require(layers[i].bias.size() == layers[i].out_dim(), ErrorKind::shape,
              "bias length does not match layer output");
      if (i > 0) {
        require(layers[i].in_dim() == layers[i - 1].out_dim(), ErrorKind::shape,
                "consecutive layer dimensions disagree");
      }
    }
    Mlp net;
    net.layers_ = std::move(layers);
    net.hidden_ = hidden;
    return net;
  }

  std::vector<int> layer_sizes() const {
    std::vector<int> sizes;
    if (layers_.empty()) return sizes;
    sizes.push_back(static_cast<int>(layers_.front().in_dim()));
    for (const auto& l : layers_) sizes.push_back(static_cast<int>(l.out_dim()));
    return sizes;
  }

  Eigen::Index input_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim(); }
  Eigen::Index output_dim() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }
  Activation hidden_activation() const noexcept { return hidden_; }
  const std::vector<Dense>& layers() const noexcept { return layers_; }
  std::vector<Dense>& layers() noexcept { return layers_; }

  /// Batched forward pass; one input per row.
  Matrix forward(const Matrix& batch) const {
    check_input(batch.cols());
    Matrix x = batch;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Matrix z = affine(layers_[i], x);
      if (i + 1 < layers_.size()) activate(z);
      x = std::move(z);
    }
    return x;
  }

  Vector forward(const Vector& input) const {
    Matrix row = input.transpose();
    return forward(row).row(0).transpose();
  }

  ForwardTrace forward_trace(const Matrix& batch) const {
    check_input(batch.cols());
    ForwardTrace trace;
    Matrix x = batch;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      Matrix z = affine(layers_[i], x);
      trace.inputs.push_back(std::move(x));
      trace.pre_activations.push_back(z);
      if (i + 1 < layers_.size()) activate(z);
      x = std::move(z);
    }
    trace.output = std::move(x);
    return trace;
  }

  /// Backpropagates dLoss/dOutput. Optionally returns dLoss/dInput.
  Gradients backward(const ForwardTrace& trace, const Matrix& d_output,
                     Matrix* d_input = nullptr) const {
    require(d_output.rows() == trace.output.rows() && d_output.cols() == trace.output.cols(),
            ErrorKind::shape, "output gradient shape mismatch");
    Gradients grads(layers_.size());
    Matrix delta = d_output;
    for (std::size_t k = layers_.size(); k-- > 0;) {
      if (k + 1 < layers_.size() && hidden_ == Activation::relu) {
        delta.array() *= (trace.pre_activations[k].array() > 0.0).cast<double>();
      }
      grads[k].weights.noalias() = delta.transpose() * trace.inputs[k];
      grads[k].bias = delta.colwise().sum().transpose();
      if (k > 0 || d_input != nullptr) {
        Matrix next = delta * layers_[k].weights;
        delta = std::move(next);
      }
    }
    if (d_input != nullptr) *d_input = std::move(delta);
    return grads;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
  }

  /// Parameters in layer order, weights (row-major) then bias.
  std::vector<double> flatten() const { return flatten(layers_); }

  static std::vector<double> flatten(const std::vector<Dense>& layers) {
    std::vector<double> out;
    for (const auto& l : layers) {
      out.insert(out.end(), l.weights.data(), l.weights.data() + l.weights.size());
      out.insert(out.end(), l.bias.data(), l.bias.data() + l.bias.size());
    }
    return out;
  }

  void assign(std::span<const double> params) {
    require(params.size() == parameter_count(), ErrorKind::shape, "parameter vector length mismatch");
    std::size_t at = 0;
    for (auto& l : layers_) {
      std::copy_n(params.begin() + at, l.weights.size(), l.weights.data());
      at += static_cast<std::size_t>(l.weights.size());
      std::copy_n(params.begin() + at, l.bias.size(), l.bias.data());
      at += static_cast<std::size_t>(l.bias.size());
    }
  }

  bool all_finite() const {
    for (const auto& l : layers_) {
      if (!l.weights.allFinite() || !l.bias.allFinite()) return false;
    }
    return true;
  }

 private:
  void check_input(Eigen::Index cols) const {
    require(!layers_.empty(), ErrorKind::shape, "empty network");
    if (cols != input_dim()) {
      fail(ErrorKind::shape, "input has " + std::to_string(cols) + " columns, network expects " +
                                 std::to_string(input_dim()));
    }
  }

  static Matrix affine(const Dense& layer, const Matrix& x) {
    Matrix z(x.rows(), layer.out_dim());
    z.noalias() = x * layer.weights.transpose();
    z.rowwise() += layer.bias.transpose();
    return z;
  }

  void activate(Matrix& z) const {
    if (hidden_ == Activation::relu) z = z.cwiseMax(0.0);
  }

  std::vector<Dense> layers_;
  Activation hidden_ = Activation::relu;
};

inline Vector mlp_forward(const Mlp& params, const Vector& input) { return params.forward(input); }

}  // namespace affectrec::nn
