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
#include <functional>
#include <span>
#include <vector>

#include "affectrec/error.hpp"

namespace affectrec::nn {

struct GradientCheckReport {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  double tolerance = 0.0;
  bool passed = true;
};

using ScalarLoss = std::function<double(std::span<const double>)>;

/// Compares `analytic` against central finite differences of `loss` at
/// `params`. Relative error per coordinate is |a - n| / max(|a|, |n|, floor),
/// so coordinates with vanishing gradient are judged on absolute error.
inline GradientCheckReport gradient_check(const ScalarLoss& loss, std::span<const double> params,
                                          std::span<const double> analytic, double tolerance,
                                          double step = 1e-5, double floor = 1e-6) {
  require(params.size() == analytic.size(), ErrorKind::shape,
          "gradient_check: analytic gradient length mismatch");
  GradientCheckReport report;
  report.tolerance = tolerance;
  std::vector<double> probe(params.begin(), params.end());
  for (std::size_t k = 0; k < probe.size(); ++k) {
    const double saved = probe[k];
    probe[k] = saved + step;
    const double up = loss(probe);
    probe[k] = saved - step;
    const double down = loss(probe);
    probe[k] = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double abs_err = std::abs(analytic[k] - numeric);
    const double rel_err = abs_err / std::max({std::abs(analytic[k]), std::abs(numeric), floor});
    report.max_absolute_error = std::max(report.max_absolute_error, abs_err);
    if (rel_err > report.max_relative_error || !std::isfinite(rel_err)) {
      report.max_relative_error = rel_err;
      report.worst_index = k;
    }
    ++report.checked;
  }
  report.passed = std::isfinite(report.max_relative_error) && report.max_relative_error < tolerance;
  return report;
}

}  // namespace affectrec::nn
