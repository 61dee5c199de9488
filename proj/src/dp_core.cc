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

#include "objpert/dp_core.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace objpert {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))

// erfc underflows around x ~ 26.5, i.e. Phi arguments below ~ -37.5.
constexpr double kErfcSafeBound = -37.0;

}  // namespace

std::vector<double> DefaultAlphaGrid() {
  std::vector<double> alphas(kAlphaGridSize);
  const double lo = std::log(kAlphaGridLow);
  const double hi = std::log(kAlphaGridHigh);
  for (int i = 0; i < kAlphaGridSize; ++i) {
    alphas[i] = std::exp(lo + (hi - lo) * i / (kAlphaGridSize - 1));
  }
  alphas.back() = kAlphaGridHigh;
  return alphas;
}

double StdNormalCdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double LogStdNormalCdf(double x) {
  if (x >= kErfcSafeBound) {
    return std::log(StdNormalCdf(x));
  }
  // Asymptotic series Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - ...),
  // accurate well below 1e-14 relative for x <= -37.
  const double z2 = x * x;
  double term = 1.0;
  double series = 1.0;
  double coef = 1.0;
  for (int k = 1; k <= 7; ++k) {
    coef *= (2 * k - 1);
    term /= -z2;
    series += coef * term;
  }
  return -0.5 * z2 - std::log(-x) - kLogSqrt2Pi + std::log(series);
}

double GaussianRdp(double delta_f, double sigma, double alpha) {
  if (sigma <= 0) throw std::domain_error("GaussianRdp: sigma must be > 0");
  if (alpha < 1) throw std::domain_error("GaussianRdp: alpha must be >= 1");
  return delta_f * delta_f * alpha / (2.0 * sigma * sigma);
}

double GaussianHsDelta(double delta_f, double sigma, double epsilon) {
  if (sigma <= 0) throw std::domain_error("GaussianHsDelta: sigma must be > 0");
  if (delta_f < 0) throw std::domain_error("GaussianHsDelta: delta_f must be >= 0");
  if (delta_f == 0) return std::max(0.0, -std::expm1(epsilon));
  const double a = -epsilon * sigma / delta_f + delta_f / (2.0 * sigma);
  const double b = -epsilon * sigma / delta_f - delta_f / (2.0 * sigma);
  // e^eps * Phi(b) in log space; the difference of two tiny tails would
  // otherwise lose all precision.
  const double log_second = epsilon + LogStdNormalCdf(b);
  const double second = log_second > 0 ? std::numeric_limits<double>::infinity()
                                       : std::exp(log_second);
  const double delta = StdNormalCdf(a) - second;
  return std::clamp(delta, 0.0, 1.0);
}

double LogHalfNormalMgf(double scale, double t) {
  if (scale < 0 || t < 0) {
    throw std::domain_error("LogHalfNormalMgf: scale and t must be >= 0");
  }
  const double ts = t * scale;
  if (ts == 0) return 0.0;  // MGF at zero is exactly 1
  return std::log(2.0) + 0.5 * ts * ts + LogStdNormalCdf(ts);
}

double HalfNormalMgf(double scale, double t) {
  return std::exp(LogHalfNormalMgf(scale, t));
}

double RdpEpsilonToDp(const RdpCurve& curve, double delta) {
  if (curve.points.empty()) {
    throw std::domain_error("RdpEpsilonToDp: empty curve");
  }
  if (delta <= 0 || delta > 1) {
    throw std::domain_error("RdpEpsilonToDp: delta must be in (0, 1]");
  }
  const double log_inv_delta = std::log(1.0 / delta);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : curve.points) {
    if (p.alpha <= 1.0) continue;
    best = std::min(best, p.epsilon + log_inv_delta / (p.alpha - 1.0));
  }
  if (!std::isfinite(best)) {
    throw std::domain_error("RdpEpsilonToDp: no alpha > 1 in curve");
  }
  return best;
}

double RdpDeltaAtEpsilon(const RdpCurve& curve, double epsilon) {
  if (curve.points.empty()) {
    throw std::domain_error("RdpDeltaAtEpsilon: empty curve");
  }
  double best = 1.0;
  for (const auto& p : curve.points) {
    if (p.alpha <= 1.0) continue;
    const double exponent = (p.alpha - 1.0) * (p.epsilon - epsilon);
    if (exponent < 0) best = std::min(best, std::exp(exponent));
  }
  return best;
}

RdpCurve ComposeRdp(const std::vector<RdpCurve>& curves) {
  if (curves.empty()) throw std::domain_error("ComposeRdp: no curves");
  RdpCurve out = curves.front();
  for (size_t c = 1; c < curves.size(); ++c) {
    const RdpCurve& cur = curves[c];
    if (cur.points.size() != out.points.size()) {
      throw std::domain_error("ComposeRdp: alpha grids differ in size");
    }
    for (size_t i = 0; i < out.points.size(); ++i) {
      if (cur.points[i].alpha != out.points[i].alpha) {
        throw std::domain_error("ComposeRdp: alpha grids differ");
      }
      out.points[i].epsilon += cur.points[i].epsilon;
    }
  }
  out.label = "composed";
  return out;
}

}  // namespace objpert
