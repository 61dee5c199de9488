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

#include "objpert/solver.h"

#include <cmath>
#include <random>
#include <utility>

namespace objpert {
namespace {

std::mt19937_64 MakeEngine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// Uniform in (0, 1]: never 0, so log() below is safe.
double UnitUniform(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

// Box-Muller; hand-rolled so draws are identical across standard libraries.
double StandardNormal(std::mt19937_64& eng) {
  const double u1 = UnitUniform(eng);
  const double u2 = UnitUniform(eng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
}

}  // namespace

Eigen::VectorXd SampleGaussianVector(std::uint64_t seed, std::uint64_t stream,
                                     int d, double sigma) {
  if (sigma < 0) throw std::domain_error("SampleGaussianVector: sigma >= 0");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  if (sigma == 0) return v;
  auto eng = MakeEngine(seed, stream);
  for (int i = 0; i < d; ++i) v[i] = sigma * StandardNormal(eng);
  return v;
}

PerturbedObjective::PerturbedObjective(std::vector<Example> examples,
                                       ClippedGlmLoss loss, double lambda,
                                       Eigen::VectorXd noise_b)
    : examples_(std::move(examples)),
      loss_(loss),
      lambda_(lambda),
      noise_b_(std::move(noise_b)) {
  if (lambda_ < 0) throw std::domain_error("lambda must be >= 0");
  x_norms_.reserve(examples_.size());
  for (const auto& ex : examples_) {
    if (ex.x.size() != noise_b_.size()) {
      throw std::invalid_argument("example dimension != noise dimension");
    }
    x_norms_.push_back(ex.x.norm());
  }
}

double PerturbedObjective::Value(const Eigen::VectorXd& theta) const {
  double acc = 0.5 * lambda_ * theta.squaredNorm() + noise_b_.dot(theta);
  for (size_t i = 0; i < examples_.size(); ++i) {
    acc += ClippedValue(loss_, examples_[i].x.dot(theta), examples_[i].y,
                        x_norms_[i]);
  }
  return acc;
}

Eigen::VectorXd PerturbedObjective::Gradient(
    const Eigen::VectorXd& theta) const {
  Eigen::VectorXd g = lambda_ * theta + noise_b_;
  for (const auto& ex : examples_) {
    g += PerExampleGrad(loss_, theta, ex);
  }
  return g;
}

double PerturbedObjective::Smoothness() const {
  return static_cast<double>(examples_.size()) * loss_.base.beta + lambda_;
}

Eigen::VectorXd PerturbedObjective::ComponentGradient(
    long i, const Eigen::VectorXd& theta) const {
  const double n = static_cast<double>(examples_.size());
  return PerExampleGrad(loss_, theta, examples_[i]) +
         (lambda_ / n) * theta + noise_b_ / n;
}

SolveResult GdSolve(const SmoothObjective& obj, Eigen::VectorXd theta0,
                    double tau, long max_iters, bool record_trace) {
  if (!(tau > 0)) throw std::domain_error("GdSolve: tau must be > 0");
  const double step = 1.0 / obj.Smoothness();
  Eigen::VectorXd theta = std::move(theta0);
  SolveResult result;
  if (record_trace) result.objective_trace.push_back(obj.Value(theta));
  for (long t = 0;; ++t) {
    const Eigen::VectorXd g = obj.Gradient(theta);
    const double gn = g.norm();
    if (gn <= tau) {
      result.theta = std::move(theta);
      result.iterations = t;
      result.grad_norm = gn;
      return result;
    }
    if (t >= max_iters) {
      throw NonConvergenceError("GdSolve: iteration cap reached", gn);
    }
    theta -= step * g;
    if (record_trace) result.objective_trace.push_back(obj.Value(theta));
  }
}

SolveResult AgdSolve(const SmoothObjective& obj, Eigen::VectorXd theta0,
                     double tau, long max_iters) {
  if (!(tau > 0)) throw std::domain_error("AgdSolve: tau must be > 0");
  const double smoothness = obj.Smoothness();
  const double mu = obj.StrongConvexity();
  const double step = 1.0 / smoothness;
  // Strongly convex momentum when available, FISTA schedule otherwise.
  const bool sc = mu > 0;
  const double sc_momentum =
      sc ? (std::sqrt(smoothness / mu) - 1.0) / (std::sqrt(smoothness / mu) + 1.0)
         : 0.0;
  Eigen::VectorXd theta = theta0;
  Eigen::VectorXd y = theta0;
  double prev_value = obj.Value(theta);
  double t_k = 1.0;
  for (long t = 0;; ++t) {
    const Eigen::VectorXd g_theta = obj.Gradient(theta);
    const double gn = g_theta.norm();
    if (gn <= tau) return {std::move(theta), t, gn, {}};
    if (t >= max_iters) {
      throw NonConvergenceError("AgdSolve: iteration cap reached", gn);
    }
    const Eigen::VectorXd next = y - step * obj.Gradient(y);
    double momentum;
    if (sc) {
      momentum = sc_momentum;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
      momentum = (t_k - 1.0) / t_next;
      t_k = t_next;
    }
    const double value = obj.Value(next);
    if (value > prev_value) {
      // Adaptive restart: kill the momentum when monotonicity breaks.
      y = next;
      t_k = 1.0;
    } else {
      y = next + momentum * (next - theta);
    }
    prev_value = value;
    theta = next;
  }
}

SolveResult SagSolve(const PerturbedObjective& obj, Eigen::VectorXd theta0,
                     double tau, long max_epochs, const RngSpec& rng) {
  if (!(tau > 0)) throw std::domain_error("SagSolve: tau must be > 0");
  const long n = obj.NumExamples();
  if (n < 1) throw std::domain_error("SagSolve: needs at least one example");
  const double component_smoothness =
      obj.loss().base.beta + obj.lambda() / static_cast<double>(n);
  const double step = 1.0 / (16.0 * component_smoothness);
  const int d = obj.Dim();

  Eigen::VectorXd theta = std::move(theta0);
  {
    const double gn = obj.Gradient(theta).norm();
    if (gn <= tau) return {std::move(theta), 0, gn, {}};
  }
  Eigen::MatrixXd stored = Eigen::MatrixXd::Zero(d, n);
  Eigen::VectorXd sum_grad = Eigen::VectorXd::Zero(d);
  auto eng = MakeEngine(rng.seed, rng.sag_stream);
  std::uniform_int_distribution<long> pick(0, n - 1);
  long evals = 0;
  for (long epoch = 0; epoch < max_epochs; ++epoch) {
    for (long s = 0; s < n; ++s) {
      const long i = pick(eng);
      const Eigen::VectorXd gi = obj.ComponentGradient(i, theta);
      sum_grad += gi - stored.col(i);
      stored.col(i) = gi;
      ++evals;
      theta -= step * (sum_grad / static_cast<double>(n));
    }
    const double gn = obj.Gradient(theta).norm();
    if (gn <= tau) return {std::move(theta), evals, gn, {}};
  }
  throw NonConvergenceError("SagSolve: epoch cap reached",
                            obj.Gradient(theta).norm());
}

Eigen::VectorXd ReferenceMinimizer(const SmoothObjective& obj, double tol) {
  Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(obj.Dim());
  const double g0 = obj.Gradient(theta0).norm();
  const double target = tol * std::max(1.0, g0);
  SolveResult res = AgdSolve(obj, std::move(theta0), target, 50'000'000);
  return std::move(res.theta);
}

FitReport AmpFitObjective(const SmoothObjective& obj,
                          const MechanismParams& params, Optimizer optimizer,
                          const RngSpec& rng, const SolverLimits& limits) {
  if (!(params.tau > 0)) throw std::domain_error("AmpFit: tau must be > 0");
  const int d = obj.Dim();
  Eigen::VectorXd theta0 = Eigen::VectorXd::Zero(d);
  SolveResult solved;
  switch (optimizer) {
    case Optimizer::kGd:
      solved = GdSolve(obj, std::move(theta0), params.tau, limits.max_iters);
      break;
    case Optimizer::kAgd:
      solved = AgdSolve(obj, std::move(theta0), params.tau, limits.max_iters);
      break;
    case Optimizer::kSag: {
      const auto* perturbed = dynamic_cast<const PerturbedObjective*>(&obj);
      if (perturbed == nullptr) {
        throw std::invalid_argument("SAG needs a finite-sum objective");
      }
      solved = SagSolve(*perturbed, std::move(theta0), params.tau,
                        limits.max_epochs, rng);
      break;
    }
  }
  FitReport report;
  report.theta_tilde = solved.theta;
  report.theta_tilde_p =
      solved.theta + SampleGaussianVector(rng.seed, rng.output_noise_stream, d,
                                          params.sigma_out);
  report.grad_norm_final = solved.grad_norm;
  report.iterations = solved.iterations;
  report.seed = rng.seed;
  if (params.tau == 0 || params.sigma_out > 0) {
    report.privacy =
        BuildRdpCurve(BoundKind::kAmpRdp, params, DefaultAlphaGrid());
  } else {
    // An approximate minimizer without output noise is not a DP release;
    // leave the accounting empty rather than claim a bound.
    report.privacy.label = "undefined (tau > 0 with sigma_out = 0)";
  }
  return report;
}

FitReport AmpFit(const std::vector<Example>& dataset, LossKind loss_kind,
                 const MechanismParams& params, Optimizer optimizer,
                 const RngSpec& rng, const SolverLimits& limits) {
  if (!(params.lambda > params.beta)) {
    throw std::domain_error("AmpFit: requires lambda > beta");
  }
  if (!(params.grad_bound > 0)) {
    throw std::domain_error("AmpFit: clip threshold must be > 0");
  }
  const int d = dataset.empty() ? params.dim : static_cast<int>(dataset[0].x.size());
  const GlmLoss base =
      loss_kind == LossKind::kLogistic ? GlmLoss::Logistic() : GlmLoss::Squared();
  const ClippedGlmLoss clipped{base, params.grad_bound};
  const Eigen::VectorXd b = SampleGaussianVector(
      rng.seed, rng.objective_noise_stream, d, params.sigma);
  const PerturbedObjective obj(dataset, clipped, params.lambda, b);
  return AmpFitObjective(obj, params, optimizer, rng, limits);
}

}  // namespace objpert
