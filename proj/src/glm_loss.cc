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

#include "objpert/glm_loss.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace objpert {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double Sigmoid(double u) {
  if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

// log(1 + e^u) without overflow for large |u|.
double Log1pExp(double u) {
  if (u > 0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

double Logit(double p) { return std::log(p) - std::log1p(-p); }

void CheckLabel(const GlmLoss& loss, double y) {
  if (loss.kind == LossKind::kLogistic) {
    if (y != 0.0 && y != 1.0) {
      throw std::domain_error("logistic loss: label must be 0 or 1");
    }
  } else {
    if (!(std::abs(y) <= 1.0 + 1e-12)) {
      throw std::domain_error("squared loss: label must satisfy |y| <= 1");
    }
  }
}

}  // namespace

double LossValue(const GlmLoss& loss, double u, double y) {
  CheckLabel(loss, y);
  if (loss.kind == LossKind::kLogistic) return -y * u + Log1pExp(u);
  const double r = y - u;
  return 0.5 * r * r;
}

double LossDeriv(const GlmLoss& loss, double u, double y) {
  CheckLabel(loss, y);
  if (loss.kind == LossKind::kLogistic) return Sigmoid(u) - y;
  return u - y;
}

double LossSecondDeriv(const GlmLoss& loss, double u, double y) {
  CheckLabel(loss, y);
  if (loss.kind == LossKind::kLogistic) return Sigmoid(u) * Sigmoid(-u);
  return 1.0;
}

ClipBoundaries ComputeClipBoundaries(const GlmLoss& loss, double clip, double y,
                                     double x_norm) {
  CheckLabel(loss, y);
  if (!(clip > 0)) throw std::domain_error("clip threshold must be > 0");
  if (x_norm < 0) throw std::domain_error("x_norm must be >= 0");
  if (x_norm == 0) return {-kInf, kInf, kInf};
  const double slope = clip / x_norm;
  if (loss.kind == LossKind::kSquared) {
    return {y - slope, y + slope, slope};
  }
  // Logistic: |f'(u)| = |sigmoid(u) - y| reaches the slope at
  // sigmoid(u) = y -+ slope; a side whose target probability leaves (0, 1)
  // is never clipped (U_L / U_H empty).
  const double p_low = y - slope;
  const double p_high = y + slope;
  ClipBoundaries b{-kInf, kInf, slope};
  if (p_low > 0 && p_low < 1) b.u_low = Logit(p_low);
  if (p_high > 0 && p_high < 1) b.u_high = Logit(p_high);
  return b;
}

double ClippedValue(const ClippedGlmLoss& loss, double u, double y,
                    double x_norm) {
  if (x_norm == 0) return LossValue(loss.base, 0.0, y);
  const ClipBoundaries b =
      ComputeClipBoundaries(loss.base, loss.clip, y, x_norm);
  if (u < b.u_low) {
    return LossValue(loss.base, b.u_low, y) - b.slope * (u - b.u_low);
  }
  if (u > b.u_high) {
    return LossValue(loss.base, b.u_high, y) + b.slope * (u - b.u_high);
  }
  return LossValue(loss.base, u, y);
}

double ClippedDeriv(const ClippedGlmLoss& loss, double u, double y,
                    double x_norm) {
  if (x_norm == 0) return 0.0;
  const ClipBoundaries b =
      ComputeClipBoundaries(loss.base, loss.clip, y, x_norm);
  if (u <= b.u_low) return -b.slope;
  if (u >= b.u_high) return b.slope;
  const double g = LossDeriv(loss.base, u, y);
  // Guard against floating-point wobble right at the kinks.
  return std::clamp(g, -b.slope, b.slope);
}

Eigen::VectorXd PerExampleGrad(const ClippedGlmLoss& loss,
                               const Eigen::VectorXd& theta,
                               const Example& ex) {
  if (theta.size() != ex.x.size()) {
    throw std::invalid_argument("PerExampleGrad: dimension mismatch");
  }
  const double u = ex.x.dot(theta);
  const double g = LossDeriv(loss.base, u, ex.y);
  Eigen::VectorXd grad = g * ex.x;
  const double norm = grad.norm();
  if (norm > loss.clip) grad *= loss.clip / norm;
  return grad;
}

}  // namespace objpert
