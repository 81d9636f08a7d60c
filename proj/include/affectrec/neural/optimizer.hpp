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
#include <cstdint>

#include "affectrec/error.hpp"
#include "affectrec/neural/mlp.hpp"

namespace affectrec::nn {

struct AdamConfig {
  double step_size = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    require(step_size >= 0.0 && std::isfinite(step_size), ErrorKind::invalid_parameter,
            "Adam step size must be finite and nonnegative");
    require(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0,
            ErrorKind::invalid_parameter, "Adam betas must lie in (0, 1)");
    require(epsilon > 0.0, ErrorKind::invalid_parameter, "Adam epsilon must be positive");
  }
};

/// First and second moment accumulators for one network.
struct AdamState {
  AdamConfig config;
  std::vector<Dense> first_moment;
  std::vector<Dense> second_moment;
  std::uint64_t step = 0;

  AdamState() = default;
  AdamState(const Mlp& params, AdamConfig cfg) : config(cfg) {
    config.validate();
    for (const auto& l : params.layers()) {
      first_moment.push_back({Matrix::Zero(l.out_dim(), l.in_dim()), Vector::Zero(l.out_dim())});
      second_moment.push_back(first_moment.back());
    }
  }
};

/// Bias-corrected adaptive-moment update, in place.
inline void optimizer_step(Mlp& params, const Gradients& grads, AdamState& state) {
  auto& layers = params.layers();
  require(grads.size() == layers.size() && state.first_moment.size() == layers.size(),
          ErrorKind::shape, "optimizer_step: layer count mismatch");
  const auto& cfg = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    require(grad.rows() == param.rows() && grad.cols() == param.cols(), ErrorKind::shape,
            "optimizer_step: gradient shape mismatch");
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    param.array() -= cfg.step_size * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + cfg.epsilon);
  };

  for (std::size_t k = 0; k < layers.size(); ++k) {
    update(layers[k].weights, grads[k].weights, state.first_moment[k].weights,
           state.second_moment[k].weights);
    update(layers[k].bias, grads[k].bias, state.first_moment[k].bias, state.second_moment[k].bias);
  }
}

}  // namespace affectrec::nn
