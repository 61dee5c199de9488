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

#ifndef OBJPERT_RISK_H_
#define OBJPERT_RISK_H_

#include <Eigen/Core>
#include <vector>

#include "objpert/glm_loss.h"

namespace objpert {

// Inputs of the excess-empirical-risk bound. lipschitz is the per-example
// bound of the trained loss, i.e. min(clip, L); domain_norm is the feature
// domain diameter (<= 1 in this library).
struct RiskInputs {
  long n = 0;
  int d = 0;
  double lipschitz = 0;
  double beta = 0;
  double lambda = 0;
  double sigma = 0;
  double sigma_out = 0;
  double tau = 0;
  double theta_star_norm = 0;
  double domain_norm = 1;
};

enum class RiskBoundVariant {
  // Revised bound: nL(tau/lambda + sigma_out sqrt(d))
  //   + (n beta ||X||^2 + lambda) d sigma^2 / (2 lambda^2)
  //   + (lambda/2) ||theta*||^2.
  kErrata,
  // Earlier variant with d sigma^2 / (2 lambda) as the middle term.
  kAppendix,
};

double ExcessRiskBound(const RiskInputs& r,
                       RiskBoundVariant variant = RiskBoundVariant::kErrata);

// sum_z f(x^T theta_released; y) - sum_z f(x^T theta_star; y) under the
// ORIGINAL (unclipped) loss; theta_star must minimize the unregularized,
// unperturbed objective.
double EmpiricalExcessRisk(const std::vector<Example>& dataset,
                           const GlmLoss& loss,
                           const Eigen::VectorXd& theta_released,
                           const Eigen::VectorXd& theta_star);

// Iterations of 1/L-step gradient descent sufficient for ||grad|| <= gamma:
//   T = log(Lsm^2 r0^2 / gamma^2) / log(1 + lambda/(Lsm - lambda)),
// Lsm = n beta + lambda. Returns 0 when already converged by the smoothness
// bound, 1 when the objective is a pure quadratic (n beta = 0).
double GdIterationBound(long n, double beta, double lambda, double gamma,
                        double r0);

struct OptimalRateParams {
  double sigma = 0;
  double lambda = 0;
};

// Minimax-rate parameter suggestion with proportionality constants set to 1:
//   sigma = L sqrt(d log(1/delta)) / eps,
//   lambda = d L sqrt(log(1/delta)) / (eps ||theta*||).
// Advisory only: privacy of the resulting mechanism must still be certified
// by the accountant at the returned (sigma, lambda).
OptimalRateParams CalibrateOptimalRate(double epsilon, double delta, double L,
                                       int d, double theta_star_norm_bound);

}  // namespace objpert

#endif  // OBJPERT_RISK_H_
