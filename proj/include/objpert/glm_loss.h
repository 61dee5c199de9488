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

#ifndef OBJPERT_GLM_LOSS_H_
#define OBJPERT_GLM_LOSS_H_

#include <Eigen/Core>
#include <optional>

namespace objpert {

enum class LossKind { kLogistic, kSquared };

// Scalar GLM loss f(u; y) of the margin u = x^T theta.
//   logistic: f = -y*u + log(1 + e^u), beta = 1/4, gradient norm <= 1
//             (under ||x|| <= 1, y in {0,1})
//   squared:  f = (y - u)^2 / 2, beta = 1, gradient unbounded
struct GlmLoss {
  LossKind kind = LossKind::kLogistic;
  double beta = 0.25;
  std::optional<double> lipschitz = 1.0;

  static GlmLoss Logistic() { return {LossKind::kLogistic, 0.25, 1.0}; }
  static GlmLoss Squared() { return {LossKind::kSquared, 1.0, std::nullopt}; }
};

double LossValue(const GlmLoss& loss, double u, double y);
double LossDeriv(const GlmLoss& loss, double u, double y);
double LossSecondDeriv(const GlmLoss& loss, double u, double y);

// Margin interval outside of which the gradient-clipped loss is linear with
// slope +-clip/||x||. An infinite endpoint means no clipping on that side.
struct ClipBoundaries {
  double u_low = 0;
  double u_high = 0;
  double slope = 0;  // clip / ||x||
};

// For squared loss: y -+ clip/x_norm. For logistic: logit(y -+ clip/x_norm)
// whenever that probability lies in (0, 1), otherwise unbounded on that side
// (the sublevel sets U_L / U_H are empty there). x_norm == 0 yields
// (-inf, +inf): such an example contributes a constant loss.
ClipBoundaries ComputeClipBoundaries(const GlmLoss& loss, double clip, double y,
                                     double x_norm);

// Gradient-clipped counterpart of a GLM loss at threshold clip > 0. Convex,
// beta-smooth with the same beta, and with per-example gradient norm <= clip.
// clip = +inf reproduces the base loss exactly.
struct ClippedGlmLoss {
  GlmLoss base;
  double clip = 1.0;
};

// f_C(u; y): equal to f inside (u_low, u_high), linear extension anchored at
// the boundary value outside. Boundaries are recomputed per call from
// (y, x_norm).
double ClippedValue(const ClippedGlmLoss& loss, double u, double y,
                    double x_norm);

// f_C'(u; y): f' inside, clamped to -+clip/x_norm outside. At exactly
// u_low/u_high returns the clamped slope.
double ClippedDeriv(const ClippedGlmLoss& loss, double u, double y,
                    double x_norm);

struct Example {
  Eigen::VectorXd x;
  double y = 0;
};

// min(1, clip/||grad||) * grad with grad = f'(x^T theta; y) * x; the returned
// norm never exceeds clip. Equals the gradient of ClippedValue composed with
// u = x^T theta.
Eigen::VectorXd PerExampleGrad(const ClippedGlmLoss& loss,
                               const Eigen::VectorXd& theta, const Example& ex);

}  // namespace objpert

#endif  // OBJPERT_GLM_LOSS_H_
