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

#include "objpert/plrv.h"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "objpert/dp_core.h"

namespace objpert {
namespace {

// Direct convolution is exact up to relative rounding of nonnegative sums;
// FFT is faster but carries an absolute noise floor (~1e-16 * total mass)
// that would swamp deep-tail coefficients. Stay direct until the multiply
// count gets out of hand.
constexpr double kDirectConvLimit = 1.5e9;

std::vector<double> DirectConv(const std::vector<double>& a,
                               const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (size_t j = 0; j < b.size(); ++j) {
      out[i + j] += ai * b[j];
    }
  }
  return out;
}

std::vector<double> FftConv(const std::vector<double>& a,
                            const std::vector<double>& b) {
  const size_t out_len = a.size() + b.size() - 1;
  size_t n = 1;
  while (n < out_len) n <<= 1;
  std::vector<double> pa(n, 0.0), pb(n, 0.0);
  std::copy(a.begin(), a.end(), pa.begin());
  std::copy(b.begin(), b.end(), pb.begin());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> fa, fb;
  fft.fwd(fa, pa);
  fft.fwd(fb, pb);
  for (size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  std::vector<double> full;
  fft.inv(full, fa);
  full.resize(out_len);
  for (double& v : full) v = std::max(v, 0.0);
  return full;
}

std::vector<double> Conv(const std::vector<double>& a,
                         const std::vector<double>& b) {
  const double cost = static_cast<double>(a.size()) * b.size();
  return internal::ConvolveMasses(a, b, cost > kDirectConvLimit);
}

PlrvGrid PointMass(double at) {
  PlrvGrid g;
  g.origin = at;
  g.spacing = kDefaultPlrvSpacing;
  g.masses = {1.0};
  g.tail_mass = 0.0;
  g.shift = at;
  return g;
}

// Deterministic part of the objective-perturbation PLRV.
double ObjPertShift(const MechanismParams& p) {
  const double s = p.grad_bound / p.sigma;
  return std::abs(std::log1p(-p.beta / p.lambda)) + 0.5 * s * s;
}

}  // namespace

PlrvGrid BuildObjPertPlrv(const MechanismParams& p, double spacing,
                          double right_edge) {
  if (!(p.lambda > p.beta)) {
    throw std::domain_error("BuildObjPertPlrv: requires lambda > beta");
  }
  if (!(p.sigma > 0)) throw std::domain_error("BuildObjPertPlrv: sigma > 0");
  if (!(spacing > 0)) throw std::domain_error("BuildObjPertPlrv: spacing > 0");
  const double s = p.grad_bound / p.sigma;
  const double shift = ObjPertShift(p);
  if (s == 0) return PointMass(shift);
  if (!(right_edge > shift)) {
    throw std::domain_error("BuildObjPertPlrv: right_edge must exceed shift");
  }
  const long m = static_cast<long>(std::ceil((right_edge - shift) / spacing));
  PlrvGrid g;
  g.origin = shift;
  g.spacing = spacing;
  g.shift = shift;
  g.masses.resize(m + 1);
  g.masses[0] = 0.0;  // half-normal has no mass below 0
  // Complementary-CDF differences keep full relative precision in the tail:
  // P(a < |X| <= b) = 2 (Phi(-a/s) - Phi(-b/s)).
  double upper_tail_prev = 2.0 * StdNormalCdf(0.0);  // = 1
  for (long j = 1; j <= m; ++j) {
    const double upper_tail = 2.0 * StdNormalCdf(-(j * spacing) / s);
    g.masses[j] = std::max(0.0, upper_tail_prev - upper_tail);
    upper_tail_prev = upper_tail;
  }
  g.tail_mass = upper_tail_prev;
  return g;
}

PlrvGrid BuildObjPertPlrv(const MechanismParams& p) {
  return BuildObjPertPlrv(p, kDefaultPlrvSpacing,
                          ObjPertShift(p) + kPlrvTruncationSigmas *
                                                p.grad_bound / p.sigma);
}

PlrvGrid BuildGaussianPlrv(double delta_f, double sigma, double spacing,
                           double left_edge, double right_edge) {
  if (!(sigma > 0)) throw std::domain_error("BuildGaussianPlrv: sigma > 0");
  if (!(spacing > 0)) throw std::domain_error("BuildGaussianPlrv: spacing > 0");
  if (delta_f == 0) return PointMass(0.0);
  const double mu = delta_f * delta_f / (2.0 * sigma * sigma);
  const double sd = delta_f / sigma;
  if (!(right_edge > left_edge)) {
    throw std::domain_error("BuildGaussianPlrv: empty interval");
  }
  const long m = static_cast<long>(std::ceil((right_edge - left_edge) / spacing));
  PlrvGrid g;
  g.origin = left_edge;
  g.spacing = spacing;
  g.shift = 0.0;
  g.masses.resize(m + 1);
  auto cdf = [&](double x) { return StdNormalCdf((x - mu) / sd); };
  auto sf = [&](double x) { return StdNormalCdf(-(x - mu) / sd); };
  // Left tail folded into the leftmost cell: moving mass up is conservative.
  g.masses[0] = cdf(left_edge);
  for (long j = 1; j <= m; ++j) {
    const double a = left_edge + (j - 1) * spacing;
    const double b = left_edge + j * spacing;
    // Pick the side of the distribution that avoids cancellation.
    const double mass = (0.5 * (a + b) < mu) ? cdf(b) - cdf(a) : sf(a) - sf(b);
    g.masses[j] = std::max(0.0, mass);
  }
  g.tail_mass = sf(left_edge + m * spacing);
  return g;
}

PlrvGrid BuildGaussianPlrv(double delta_f, double sigma, double spacing) {
  const double mu = delta_f * delta_f / (2.0 * sigma * sigma);
  const double sd = delta_f / sigma;
  return BuildGaussianPlrv(delta_f, sigma, spacing,
                           mu - kPlrvTruncationSigmas * sd,
                           mu + kPlrvTruncationSigmas * sd);
}

PlrvGrid ComposePlrv(const std::vector<PlrvGrid>& grids) {
  if (grids.empty()) throw std::domain_error("ComposePlrv: no grids");
  PlrvGrid out = grids.front();
  for (size_t i = 1; i < grids.size(); ++i) {
    const PlrvGrid& g = grids[i];
    if (g.spacing != out.spacing) {
      throw std::domain_error("ComposePlrv: spacing mismatch");
    }
    out.masses = Conv(out.masses, g.masses);
    out.origin += g.origin;
    out.shift += g.shift;
    // Union bound 1 - (1 - t1)(1 - t2), written so tiny tails survive
    // double rounding.
    out.tail_mass =
        out.tail_mass + g.tail_mass - out.tail_mass * g.tail_mass;
  }
  return out;
}

PlrvGrid SelfCompose(const PlrvGrid& grid, int k) {
  if (k < 1) throw std::domain_error("SelfCompose: k must be >= 1");
  PlrvGrid result = PointMass(0.0);
  result.spacing = grid.spacing;
  PlrvGrid base = grid;
  int e = k;
  while (true) {
    if (e & 1) result = ComposePlrv({result, base});
    e >>= 1;
    if (e == 0) break;
    base = ComposePlrv({base, base});
  }
  return result;
}

double DeltaFromPlrv(const PlrvGrid& grid, double epsilon) {
  double acc = 0.0;
  for (size_t j = 0; j < grid.masses.size(); ++j) {
    const double s = grid.origin + j * grid.spacing;
    if (s <= epsilon) continue;
    acc += grid.masses[j] * (1.0 - std::exp(epsilon - s));
  }
  acc += grid.tail_mass;
  return std::clamp(acc, 0.0, 1.0);
}

PlrvGrid BuildAmpPlrv(const MechanismParams& p, double spacing) {
  PlrvGrid objpert = BuildObjPertPlrv(
      p, spacing,
      ObjPertShift(p) + kPlrvTruncationSigmas * p.grad_bound / p.sigma);
  if (p.tau == 0) return objpert;
  if (!(p.sigma_out > 0)) {
    throw std::domain_error("BuildAmpPlrv: tau > 0 requires sigma_out > 0");
  }
  const PlrvGrid gauss =
      BuildGaussianPlrv(2.0 * p.tau / p.lambda, p.sigma_out, spacing);
  return ComposePlrv({objpert, gauss});
}

double PlrvDeltaTolerance(const PlrvGrid& grid, int compositions) {
  return compositions * grid.spacing + grid.tail_mass;
}

namespace internal {

std::vector<double> ConvolveMasses(const std::vector<double>& a,
                                   const std::vector<double>& b, bool use_fft) {
  return use_fft ? FftConv(a, b) : DirectConv(a, b);
}

}  // namespace internal

}  // namespace objpert
