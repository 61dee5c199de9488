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

#ifndef OBJPERT_ACCOUNTANT_H_
#define OBJPERT_ACCOUNTANT_H_

#include <optional>
#include <stdexcept>
#include <vector>

#include "objpert/dp_core.h"

namespace objpert {

// Every knob appearing in the objective-perturbation privacy theorems.
//   sigma      objective noise scale (> 0)
//   lambda     regularization strength (> beta for all ObjPert bounds)
//   beta       smoothness of the scalar loss
//   grad_bound per-example gradient bound: L unclipped, C clipped
//   tau        gradient-norm stopping threshold (>= 0)
//   sigma_out  output perturbation scale (> 0 whenever tau > 0)
//   dim        parameter dimension d
//   n          dataset size
struct MechanismParams {
  double sigma = 0;
  double lambda = 0;
  double beta = 0;
  double grad_bound = 0;
  double tau = 0;
  double sigma_out = 0;
  int dim = 1;
  long n = 0;
};

enum class BoundKind {
  kRdpGlm,
  kRdpGlmAlpha1,
  kRdpLinearized,
  kRdpNonGlm,
  kHsAnalytic,
  kKifer,
  kGaussianLowerRdp,
  kGaussianLowerHs,
  kAmpRdp,
};

// RDP of objective perturbation for GLM losses:
//   -log(1 - beta/lambda) + L^2/(2 sigma^2)
//     + log E[e^{(alpha-1)|X|}] / (alpha - 1),   X ~ N(0, L^2/sigma^2).
// alpha == 1 uses the KL form with the MGF evaluated at t = 1.
double ObjPertRdp(const MechanismParams& p, double alpha);

// Hockey-stick delta(epsilon) of objective perturbation. With
// A = |log(1 - beta/lambda)|, eps~ = eps - A, eps^ = eps~ - L^2/(2 sigma^2):
//   eps^ >= 0:  2 * GaussianHsDelta(L, sigma, eps~)
//   eps^ <  0:  (1 - e^{eps^}) + e^{eps^} * 2 * GaussianHsDelta(L, sigma,
//               L^2/(2 sigma^2))
// This is the proof-consistent variant (A subtracted, threshold
// L^2/(2 sigma^2)): conservative and continuous at eps^ = 0. The theorem
// statement's variant (A added, threshold L^2/sigma^2) is neither.
double ObjPertHsDelta(const MechanismParams& p, double epsilon);

// Classic (eps, delta)-DP bound: delta = 2 exp(-(sigma^2 eps^2 / L^2
// - 4 eps)/8), applicable only when eps >= 2 beta / lambda (nullopt
// otherwise).
std::optional<double> KiferDelta(const MechanismParams& p, double epsilon);

// RDP of approximate minima perturbation: ObjPertRdp plus the Gaussian term
// for the release of the residual, sensitivity 2 tau / lambda at noise
// sigma_out.
double AmpRdp(const MechanismParams& p, double alpha);

// Linearized RDP bound, minimized over the Holder exponent p > 1:
//   lead + L^2/(2 sigma^2) + p (alpha-1) L^2/(2 sigma^2)
//     - log(1 - 2 q (alpha-1) beta / lambda) / (2 q (alpha-1)),
// with q = p/(p-1). nullopt (divergent) when no p makes
// 2 q (alpha-1) beta / lambda < 1, i.e. when alpha - 1 >= lambda/(2 beta).
std::optional<double> ObjPertRdpLinearized(const MechanismParams& p,
                                           double alpha);

// Dimension-dependent RDP bound without the GLM assumption:
//   -d log(1 - beta/lambda) + L/(2 sigma^2)
//     + log E_{Z ~ chi_d}[e^{(alpha-1)(L/sigma) Z}] / (alpha - 1).
// The middle term follows the theorem as printed (L, not L^2);
// squared_sensitivity_term switches to the L^2/(2 sigma^2) variant.
double ObjPertRdpNonGlm(const MechanismParams& p, double alpha,
                        bool squared_sensitivity_term = false);

struct LowerBoundCurves {
  RdpCurve rdp;
  DpCurve dp;
};

// Gaussian-mechanism lower bounds with sensitivity L and noise sigma (the
// one-point linear-loss instance, scale invariance removes lambda).
LowerBoundCurves GaussianLowerBounds(const MechanismParams& p,
                                     const std::vector<double>& alphas,
                                     const std::vector<double>& epsilons);

// Samples the named bound on a grid. RDP kinds take alphas, DP kinds take
// epsilons. Divergent / not-applicable points are skipped.
RdpCurve BuildRdpCurve(BoundKind kind, const MechanismParams& p,
                       const std::vector<double>& alphas);
DpCurve BuildDpCurve(BoundKind kind, const MechanismParams& p,
                     const std::vector<double>& epsilons);

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Smallest sigma (relative tolerance 1e-6, bisection over [1e-6, 1e6]) such
// that the chosen bound's delta(target_epsilon) <= target_delta. RDP kinds go
// through RdpDeltaAtEpsilon on the default alpha grid. Throws
// CalibrationError when the target is unreachable inside the bracket.
double CalibrateSigma(double target_epsilon, double target_delta,
                      MechanismParams p, BoundKind kind);

inline constexpr double kSigmaBracketLow = 1e-6;
inline constexpr double kSigmaBracketHigh = 1e6;
inline constexpr double kSigmaRelTol = 1e-6;

}  // namespace objpert

#endif  // OBJPERT_ACCOUNTANT_H_
