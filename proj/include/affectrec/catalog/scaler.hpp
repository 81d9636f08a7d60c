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

#include <utility>

#include "json.hpp"

#include "affectrec/error.hpp"
#include "affectrec/neural/mlp.hpp"

namespace affectrec {

/// Per-dimension min-max scaling onto [-1, 1], fit once and reused.
struct ScalerParams {
  Vector min;
  Vector max;

  static ScalerParams fit(const Matrix& data) {
    require(data.rows() >= 1 && data.cols() >= 1, ErrorKind::insufficient_data,
            "min-max scaling needs at least one row");
    return {data.colwise().minCoeff().transpose(), data.colwise().maxCoeff().transpose()};
  }

  /// Constant dimensions map to 0. Out-of-range inputs are clamped when `clamp` is set.
  Matrix transform(const Matrix& data, bool clamp = true) const {
    require(data.cols() == min.size(), ErrorKind::shape, "scaler dimension mismatch");
    Matrix out(data.rows(), data.cols());
    for (Eigen::Index k = 0; k < data.cols(); ++k) {
      const double span = max[k] - min[k];
      for (Eigen::Index i = 0; i < data.rows(); ++i) {
        double y = span > 0.0 ? 2.0 * (data(i, k) - min[k]) / span - 1.0 : 0.0;
        if (clamp) y = std::clamp(y, -1.0, 1.0);
        out(i, k) = y;
      }
    }
    return out;
  }

  Matrix inverse(const Matrix& scaled) const {
    require(scaled.cols() == min.size(), ErrorKind::shape, "scaler dimension mismatch");
    Matrix out(scaled.rows(), scaled.cols());
    for (Eigen::Index k = 0; k < scaled.cols(); ++k) {
      const double span = max[k] - min[k];
      for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
        out(i, k) = span > 0.0 ? min[k] + (scaled(i, k) + 1.0) * span / 2.0 : min[k];
      }
    }
    return out;
  }

  nlohmann::json to_json() const {
    return {{"min", std::vector<double>(min.data(), min.data() + min.size())},
            {"max", std::vector<double>(max.data(), max.data() + max.size())}};
  }

  static ScalerParams from_json(const nlohmann::json& j) {
    const auto lo = j.at("min").get<std::vector<double>>();
    const auto hi = j.at("max").get<std::vector<double>>();
    require(lo.size() == hi.size(), ErrorKind::integrity, "scaler min/max length mismatch");
    ScalerParams p{Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                   Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()))};
    for (Eigen::Index k = 0; k < p.min.size(); ++k) {
      require(p.max[k] >= p.min[k], ErrorKind::integrity, "scaler max below min");
    }
    return p;
  }
};

inline std::pair<Matrix, ScalerParams> minmax_scale(const Matrix& data) {
  ScalerParams params = ScalerParams::fit(data);
  Matrix scaled = params.transform(data, false);
  return {std::move(scaled), std::move(params)};
}

}  // namespace affectrec
