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

#include "oracles.h"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace objpert::testing {
namespace {

constexpr double kSqrt2Pi = 2.5066282746310005;

}  // namespace

double RombergIntegrate(const std::function<double(double)>& f, double a,
                        double b, double rel_tol) {
  constexpr int kMaxLevels = 24;
  std::vector<double> row(kMaxLevels);
  double h = b - a;
  row[0] = 0.5 * h * (f(a) + f(b));
  long n = 1;
  for (int level = 1; level < kMaxLevels; ++level) {
    h *= 0.5;
    double acc = 0;
    for (long i = 0; i < n; ++i) acc += f(a + (2 * i + 1) * h);
    n *= 2;
    std::vector<double> next(kMaxLevels);
    next[0] = 0.5 * row[0] + h * acc;
    double pow4 = 1;
    for (int k = 1; k <= level; ++k) {
      pow4 *= 4;
      next[k] = next[k - 1] + (next[k - 1] - row[k - 1]) / (pow4 - 1);
    }
    const double estimate = next[level];
    const double prev = row[level - 1];
    row = next;
    // Do not trust agreement before the mesh is fine enough to have seen a
    // narrow peak anywhere in the interval.
    if (level > 10 &&
        std::abs(estimate - prev) <=
            rel_tol * std::max(std::abs(estimate), 1e-300)) {
      return estimate;
    }
  }
  return row[kMaxLevels - 1];
}

double SeriesNormalCdf(double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  if (std::abs(x) > 8.5) {
    throw std::invalid_argument("SeriesNormalCdf: |x| too large for the series");
  }
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int k = 1; k < 400; ++k) {
    term *= x2 / (2.0 * k + 1.0);
    const double prev = sum;
    sum += term;
    if (sum == prev) break;
  }
  return 0.5 + std::exp(-0.5 * x2) / kSqrt2Pi * sum;
}

double QuadratureLogNormalCdf(double z) {
  if (!(z < 0)) throw std::invalid_argument("QuadratureLogNormalCdf: z < 0");
  // Phi(z) = phi(z) * integral_0^inf e^{z u - u^2/2} du; the integrand is <= 1
  // and decays at scale 1/|z|.
  const double upper = 60.0 / (-z) + 10.0;
  const double integral = RombergIntegrate(
      [z](double u) { return std::exp(z * u - 0.5 * u * u); }, 0.0, upper,
      1e-13);
  return -0.5 * z * z - std::log(kSqrt2Pi) + std::log(integral);
}

double QuadratureLogHalfNormalMgf(double s, double t) {
  if (s <= 0) throw std::invalid_argument("QuadratureLogHalfNormalMgf: s > 0");
  const double scale_log = 0.5 * t * t * s * s;
  const double upper = t * s * s + 50.0 * s;
  const double integral = RombergIntegrate(
      [s, t, scale_log](double x) {
        return 2.0 / (kSqrt2Pi * s) *
               std::exp(-0.5 * x * x / (s * s) + t * x - scale_log);
      },
      0.0, upper, 1e-13);
  return scale_log + std::log(integral);
}

double CentralDiff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace objpert::testing
