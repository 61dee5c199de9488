//
// Copyright 2026 The ObjPert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "objpert/risk.h"

#include <cmath>
#include <stdexcept>

namespace objpert {

double ExcessRiskBound(const RiskInputs& r, RiskBoundVariant variant) {
  if (!(r.lambda > 0)) throw std::domain_error("ExcessRiskBound: lambda > 0");
  const double n = static_cast<double>(r.n);
  const double d = static_cast<double>(r.d);
  const double optimization_term =
      n * r.lipschitz * (r.tau / r.lambda + r.sigma_out * std::sqrt(d));
  const double noise_term =
      variant == RiskBoundVariant::kErrata
          ? (n * r.beta * r.domain_norm * r.domain_norm + r.lambda) * d *
                r.sigma * r.sigma / (2.0 * r.lambda * r.lambda)
          : d * r.sigma * r.sigma / (2.0 * r.lambda);
  const double regularization_term =
      0.5 * r.lambda * r.theta_star_norm * r.theta_star_norm;
  return optimization_term + noise_term + regularization_term;
}

double EmpiricalExcessRisk(const std::vector<Example>& dataset,
                           const GlmLoss& loss,
                           const Eigen::VectorXd& theta_released,
                           const Eigen::VectorXd& theta_star) {
  double released = 0;
  double optimal = 0;
  for (const auto& ex : dataset) {
    released += LossValue(loss, ex.x.dot(theta_released), ex.y);
    optimal += LossValue(loss, ex.x.dot(theta_star), ex.y);
  }
  return released - optimal;
}

double GdIterationBound(long n, double beta, double lambda, double gamma,
                        double r0) {
  if (!(gamma > 0) || !(r0 > 0) || !(lambda > 0)) {
    throw std::domain_error("GdIterationBound: gamma, r0, lambda must be > 0");
  }
  const double smooth = static_cast<double>(n) * beta + lambda;
  const double ratio = smooth * r0 / gamma;
  if (ratio <= 1.0) return 0.0;  // already converged by the smoothness bound
  if (smooth <= lambda) return 1.0;  // pure quadratic: one 1/L step lands at 0
  return 2.0 * std::log(ratio) / std::log1p(lambda / (smooth - lambda));
}

OptimalRateParams CalibrateOptimalRate(double epsilon, double delta, double L,
                                       int d, double theta_star_norm_bound) {
  if (!(epsilon > 0) || !(delta > 0 && delta < 1) || !(L > 0) || d < 1 ||
      !(theta_star_norm_bound > 0)) {
    throw std::domain_error("CalibrateOptimalRate: invalid inputs");
  }
  const double log_term = std::log(1.0 / delta);
  OptimalRateParams out;
  out.sigma = L * std::sqrt(d * log_term) / epsilon;
  out.lambda = d * L * std::sqrt(log_term) / (epsilon * theta_star_norm_bound);
  return out;
}

}  // namespace objpert
