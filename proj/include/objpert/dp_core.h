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

#ifndef OBJPERT_DP_CORE_H_
#define OBJPERT_DP_CORE_H_

#include <string>
#include <vector>

namespace objpert {

// Default alpha grid used whenever an RDP curve has to be sampled: 200
// geometrically spaced orders in [1 + 1e-4, 512]. Conversions that minimize
// over this grid are slightly loose but always sound upper bounds.
inline constexpr double kAlphaGridLow = 1.0 + 1e-4;
inline constexpr double kAlphaGridHigh = 512.0;
inline constexpr int kAlphaGridSize = 200;

std::vector<double> DefaultAlphaGrid();

struct RdpPoint {
  double alpha = 0;
  double epsilon = 0;
};

struct DpPoint {
  double epsilon = 0;
  double delta = 0;
};

// Sampled (alpha, epsilon) curve. Alphas are strictly increasing and, for
// every curve this library produces, epsilon is nondecreasing in alpha.
struct RdpCurve {
  std::vector<RdpPoint> points;
  std::string label;
};

// Sampled (epsilon, delta) privacy profile; delta nonincreasing in epsilon.
struct DpCurve {
  std::vector<DpPoint> points;
  std::string label;
};

// Standard normal CDF, accurate to ~1e-15 absolute via erfc.
double StdNormalCdf(double x);

// log(StdNormalCdf(x)), stable for arbitrarily negative x (asymptotic
// expansion below the erfc underflow threshold).
double LogStdNormalCdf(double x);

// RDP of the Gaussian mechanism: delta_f^2 * alpha / (2 sigma^2).
double GaussianRdp(double delta_f, double sigma, double alpha);

// Tight delta(epsilon) of the Gaussian mechanism,
//   Phi(-eps*sigma/delta_f + delta_f/(2 sigma))
//     - e^eps * Phi(-eps*sigma/delta_f - delta_f/(2 sigma)),
// clamped to [0, 1]. delta_f == 0 degenerates to max(0, 1 - e^eps).
double GaussianHsDelta(double delta_f, double sigma, double epsilon);

// E[e^{t|X|}] for X ~ N(0, scale^2), via 2 * e^{t^2 scale^2 / 2} * Phi(t*scale).
// Requires scale >= 0 and t >= 0. Overflows to +inf for large t*scale; use the
// log form for accounting.
double HalfNormalMgf(double scale, double t);
double LogHalfNormalMgf(double scale, double t);

// min over sampled alpha > 1 of eps(alpha) + log(1/delta) / (alpha - 1).
double RdpEpsilonToDp(const RdpCurve& curve, double delta);

// min over sampled alpha > 1 of exp((alpha - 1) (eps(alpha) - epsilon)),
// clamped to [0, 1]; nonincreasing in epsilon by construction.
double RdpDeltaAtEpsilon(const RdpCurve& curve, double epsilon);

// Pointwise sum of epsilon values; all curves must share the alpha grid.
RdpCurve ComposeRdp(const std::vector<RdpCurve>& curves);

}  // namespace objpert

#endif  // OBJPERT_DP_CORE_H_
