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

#include "objpert/accountant.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace objpert {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckObjPertParams(const MechanismParams& p) {
  if (!(p.lambda > p.beta)) {
    throw std::domain_error("objective perturbation requires lambda > beta");
  }
  if (!(p.sigma > 0)) throw std::domain_error("sigma must be > 0");
  if (p.grad_bound < 0) throw std::domain_error("grad_bound must be >= 0");
  if (p.beta < 0) throw std::domain_error("beta must be >= 0");
}

// -log(1 - beta/lambda), the Jacobian term of the density-ratio bound.
double LeadTerm(const MechanismParams& p) {
  return -std::log1p(-p.beta / p.lambda);
}

// Adaptive Simpson quadrature. tol_floor keeps the refinement criterion
// reachable once the requested precision drops to rounding noise; without it
// a sharp feature can drive the recursion to the full depth everywhere.
double AdaptiveSimpson(const std::function<double(double)>& f, double a,
                       double b, double fa, double fm, double fb, double whole,
                       double tol, double tol_floor, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * std::max(tol, tol_floor)) {
    return left + right + delta / 15.0;
  }
  return AdaptiveSimpson(f, a, m, fa, flm, fm, left, 0.5 * tol, tol_floor,
                         depth - 1) +
         AdaptiveSimpson(f, m, b, fm, frm, fb, right, 0.5 * tol, tol_floor,
                         depth - 1);
}

// Integrates f over [a, b] to roughly rel_tol of the crude whole-interval
// estimate. Callers arrange for any sharp feature to sit at a panel
// endpoint, so the crude estimate never misses it entirely.
double Integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max(
      {std::abs(whole), (b - a) * std::abs(fm), 1e-300});
  return AdaptiveSimpson(f, a, b, fa, fm, fb, whole, rel_tol * scale,
                         4e-16 * scale, 30);
}

// log E_{Z ~ chi_d}[e^{t Z}] by adaptive quadrature of the chi density,
// rescaled by the exponent's mode so the integrand stays representable.
double LogChiMgf(int d, double t) {
  if (d < 1) throw std::domain_error("chi dimension must be >= 1");
  if (t < 0) throw std::domain_error("chi MGF requires t >= 0");
  if (t == 0) return 0.0;
  const double dm1 = d - 1;
  // Mode of g(z) = t z - z^2/2 + (d-1) log z.
  const double mode = 0.5 * (t + std::sqrt(t * t + 4.0 * dm1));
  const double g_mode =
      t * mode - 0.5 * mode * mode + (dm1 > 0 ? dm1 * std::log(mode) : 0.0);
  const double log_norm =
      (0.5 * d - 1.0) * std::log(2.0) + std::lgamma(0.5 * d);
  auto integrand = [&](double z) {
    if (z <= 0) return dm1 > 0 ? 0.0 : std::exp(t * z - 0.5 * z * z - g_mode);
    const double lg = t * z - 0.5 * z * z + (dm1 > 0 ? dm1 * std::log(z) : 0.0);
    return std::exp(lg - g_mode);
  };
  // Split at the mode so the adaptive refinement cannot step over the peak.
  const double hi = mode + 45.0;
  const double integral = Integrate(integrand, 0.0, mode, 1e-13) +
                          Integrate(integrand, mode, hi, 1e-13);
  return g_mode - log_norm + std::log(integral);
}

}  // namespace

double ObjPertRdp(const MechanismParams& p, double alpha) {
  CheckObjPertParams(p);
  if (alpha < 1) throw std::domain_error("ObjPertRdp: alpha must be >= 1");
  const double scale = p.grad_bound / p.sigma;
  const double mid = 0.5 * scale * scale;
  const double lead = LeadTerm(p);
  if (alpha == 1.0) return lead + mid + LogHalfNormalMgf(scale, 1.0);
  return lead + mid + LogHalfNormalMgf(scale, alpha - 1.0) / (alpha - 1.0);
}

double ObjPertHsDelta(const MechanismParams& p, double epsilon) {
  CheckObjPertParams(p);
  const double a = std::abs(LeadTerm(p));
  const double scale = p.grad_bound / p.sigma;
  const double mid = 0.5 * scale * scale;
  const double eps_tilde = epsilon - a;
  const double eps_hat = eps_tilde - mid;
  double delta;
  if (eps_hat >= 0) {
    delta = 2.0 * GaussianHsDelta(p.grad_bound, p.sigma, eps_tilde);
  } else {
    const double e = std::exp(eps_hat);
    delta = (1.0 - e) + e * 2.0 * GaussianHsDelta(p.grad_bound, p.sigma, mid);
  }
  return std::clamp(delta, 0.0, 1.0);
}

std::optional<double> KiferDelta(const MechanismParams& p, double epsilon) {
  if (!(p.sigma > 0)) throw std::domain_error("sigma must be > 0");
  if (p.lambda <= 0) throw std::domain_error("lambda must be > 0");
  if (epsilon < 2.0 * p.beta / p.lambda) return std::nullopt;
  if (p.grad_bound == 0) return 0.0;
  const double se = p.sigma * epsilon / p.grad_bound;
  const double exponent = (se * se - 4.0 * epsilon) / 8.0;
  if (exponent <= 0) return 1.0;
  return std::clamp(2.0 * std::exp(-exponent), 0.0, 1.0);
}

double AmpRdp(const MechanismParams& p, double alpha) {
  const double objpert = ObjPertRdp(p, alpha);
  if (p.tau < 0) throw std::domain_error("tau must be >= 0");
  if (p.tau == 0) return objpert;
  if (!(p.sigma_out > 0)) {
    throw std::domain_error("AmpRdp: tau > 0 requires sigma_out > 0");
  }
  return objpert + GaussianRdp(2.0 * p.tau / p.lambda, p.sigma_out, alpha);
}

std::optional<double> ObjPertRdpLinearized(const MechanismParams& p,
                                           double alpha) {
  CheckObjPertParams(p);
  if (!(alpha > 1)) {
    throw std::domain_error("ObjPertRdpLinearized: alpha must be > 1");
  }
  const double am1 = alpha - 1.0;
  const double scale = p.grad_bound / p.sigma;
  const double mid = 0.5 * scale * scale;
  const double lead = LeadTerm(p);
  const double bl = p.beta / p.lambda;
  if (bl == 0) return lead + mid + am1 * mid;  // plain Gaussian MGF, p -> 1
  // Feasible q in (1, q_max) with q_max = lambda / (2 beta (alpha-1)).
  const double q_max = 1.0 / (2.0 * bl * am1);
  if (q_max <= 1.0) return std::nullopt;
  auto value = [&](double q) {
    const double hp = q / (q - 1.0);
    const double chi_arg = 2.0 * q * am1 * bl;
    return hp * am1 * mid - std::log1p(-chi_arg) / (2.0 * q * am1);
  };
  // Golden-section over log(q - 1); the objective diverges at both ends.
  const double golden = 0.6180339887498949;
  double lo = std::log((q_max - 1.0) * 1e-12);
  double hi = std::log((q_max - 1.0) * (1.0 - 1e-12));
  double x1 = hi - golden * (hi - lo);
  double x2 = lo + golden * (hi - lo);
  double f1 = value(1.0 + std::exp(x1));
  double f2 = value(1.0 + std::exp(x2));
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = value(1.0 + std::exp(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = value(1.0 + std::exp(x2));
    }
  }
  return lead + mid + std::min(f1, f2);
}

double ObjPertRdpNonGlm(const MechanismParams& p, double alpha,
                        bool squared_sensitivity_term) {
  CheckObjPertParams(p);
  if (!(alpha > 1)) {
    throw std::domain_error("ObjPertRdpNonGlm: alpha must be > 1");
  }
  if (p.dim < 1) throw std::domain_error("ObjPertRdpNonGlm: dim must be >= 1");
  const double lead = -static_cast<double>(p.dim) * std::log1p(-p.beta / p.lambda);
  // The theorem as printed has L/(2 sigma^2); the squared variant mirrors the
  // GLM bound's L^2/(2 sigma^2).
  const double mid = squared_sensitivity_term
                         ? 0.5 * p.grad_bound * p.grad_bound / (p.sigma * p.sigma)
                         : 0.5 * p.grad_bound / (p.sigma * p.sigma);
  if (p.grad_bound == 0) return lead;
  const double t = (alpha - 1.0) * p.grad_bound / p.sigma;
  return lead + mid + LogChiMgf(p.dim, t) / (alpha - 1.0);
}

LowerBoundCurves GaussianLowerBounds(const MechanismParams& p,
                                     const std::vector<double>& alphas,
                                     const std::vector<double>& epsilons) {
  if (!(p.sigma > 0)) throw std::domain_error("sigma must be > 0");
  LowerBoundCurves out;
  out.rdp.label = "gaussian-lower-rdp";
  out.dp.label = "gaussian-lower-hs";
  for (double a : alphas) {
    out.rdp.points.push_back({a, GaussianRdp(p.grad_bound, p.sigma, a)});
  }
  for (double e : epsilons) {
    out.dp.points.push_back({e, GaussianHsDelta(p.grad_bound, p.sigma, e)});
  }
  return out;
}

RdpCurve BuildRdpCurve(BoundKind kind, const MechanismParams& p,
                       const std::vector<double>& alphas) {
  RdpCurve curve;
  for (double a : alphas) {
    switch (kind) {
      case BoundKind::kRdpGlm:
        curve.points.push_back({a, ObjPertRdp(p, a)});
        break;
      case BoundKind::kRdpGlmAlpha1:
        curve.points.push_back({a, ObjPertRdp(p, 1.0)});
        break;
      case BoundKind::kAmpRdp:
        curve.points.push_back({a, AmpRdp(p, a)});
        break;
      case BoundKind::kGaussianLowerRdp:
        curve.points.push_back({a, GaussianRdp(p.grad_bound, p.sigma, a)});
        break;
      case BoundKind::kRdpLinearized: {
        if (a <= 1) break;
        const auto eps = ObjPertRdpLinearized(p, a);
        if (eps) curve.points.push_back({a, *eps});
        break;
      }
      case BoundKind::kRdpNonGlm:
        if (a <= 1) break;
        curve.points.push_back({a, ObjPertRdpNonGlm(p, a)});
        break;
      default:
        throw std::invalid_argument("BuildRdpCurve: not an RDP bound kind");
    }
  }
  switch (kind) {
    case BoundKind::kRdpGlm: curve.label = "rdp"; break;
    case BoundKind::kRdpGlmAlpha1: curve.label = "rdp-alpha1"; break;
    case BoundKind::kAmpRdp: curve.label = "amp-rdp"; break;
    case BoundKind::kGaussianLowerRdp: curve.label = "gaussian-lower-rdp"; break;
    case BoundKind::kRdpLinearized: curve.label = "rdp-linearized"; break;
    case BoundKind::kRdpNonGlm: curve.label = "rdp-nonglm"; break;
    default: break;
  }
  return curve;
}

DpCurve BuildDpCurve(BoundKind kind, const MechanismParams& p,
                     const std::vector<double>& epsilons) {
  DpCurve curve;
  for (double e : epsilons) {
    switch (kind) {
      case BoundKind::kHsAnalytic:
        curve.points.push_back({e, ObjPertHsDelta(p, e)});
        break;
      case BoundKind::kKifer: {
        const auto d = KiferDelta(p, e);
        if (d) curve.points.push_back({e, *d});
        break;
      }
      case BoundKind::kGaussianLowerHs:
        curve.points.push_back({e, GaussianHsDelta(p.grad_bound, p.sigma, e)});
        break;
      default:
        throw std::invalid_argument("BuildDpCurve: not a DP bound kind");
    }
  }
  switch (kind) {
    case BoundKind::kHsAnalytic: curve.label = "hs"; break;
    case BoundKind::kKifer: curve.label = "kifer"; break;
    case BoundKind::kGaussianLowerHs: curve.label = "gaussian-lower-hs"; break;
    default: break;
  }
  return curve;
}

double CalibrateSigma(double target_epsilon, double target_delta,
                      MechanismParams p, BoundKind kind) {
  if (!(target_delta > 0 && target_delta < 1)) {
    throw std::domain_error("CalibrateSigma: target_delta must be in (0, 1)");
  }
  if (kind == BoundKind::kRdpGlmAlpha1) {
    throw std::invalid_argument(
        "CalibrateSigma: the alpha = 1 bound does not define delta(epsilon)");
  }
  if (kind == BoundKind::kKifer &&
      target_epsilon < 2.0 * p.beta / p.lambda) {
    throw CalibrationError("Kifer bound not applicable: epsilon < 2beta/lambda");
  }
  auto delta_at = [&](double sigma) -> double {
    p.sigma = sigma;
    switch (kind) {
      case BoundKind::kHsAnalytic:
        return ObjPertHsDelta(p, target_epsilon);
      case BoundKind::kKifer: {
        const auto d = KiferDelta(p, target_epsilon);
        return d ? *d : kInf;
      }
      case BoundKind::kGaussianLowerHs:
        return GaussianHsDelta(p.grad_bound, sigma, target_epsilon);
      default: {
        const RdpCurve curve = BuildRdpCurve(kind, p, DefaultAlphaGrid());
        if (curve.points.empty()) return kInf;
        return RdpDeltaAtEpsilon(curve, target_epsilon);
      }
    }
  };
  double lo = kSigmaBracketLow;
  double hi = kSigmaBracketHigh;
  if (delta_at(hi) > target_delta) {
    throw CalibrationError("CalibrateSigma: target unreachable at sigma = 1e6");
  }
  if (delta_at(lo) <= target_delta) return lo;
  // Bisect in log space: delta is monotone decreasing in sigma for every
  // bound kind accepted here.
  while (hi / lo > 1.0 + kSigmaRelTol) {
    const double mid = std::sqrt(lo * hi);
    if (delta_at(mid) <= target_delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace objpert
