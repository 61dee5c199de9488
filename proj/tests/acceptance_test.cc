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
// Acceptance suite: nine end-to-end criteria, one [PASS]/[FAIL] line each.
// Every tolerance is pinned in code next to the check it guards.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "objpert/accountant.h"
#include "objpert/data.h"
#include "objpert/dp_core.h"
#include "objpert/glm_loss.h"
#include "objpert/plrv.h"
#include "objpert/risk.h"
#include "objpert/solver.h"
#include "oracles.h"

using namespace objpert;
namespace oracle = objpert::testing;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int failures = 0;

void Report(int criterion, bool ok, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion,
              what.c_str());
  if (!ok) ++failures;
}

// ---------------------------------------------------------------------------
// 1. Closed-form half-normal MGF vs adaptive-quadrature oracle, rel 1e-8 over
//    a 20 x 20 grid of scales and orders. Values beyond double range are
//    compared in log space (|log difference| <= 1e-8 is the same relative
//    criterion).
bool Criterion1() {
  int bad = 0;
  for (int i = 0; i < 20; ++i) {
    const double s = 0.01 * std::pow(1000.0, i / 19.0);  // 0.01 .. 10
    for (int j = 0; j < 20; ++j) {
      const double t = 20.0 * j / 19.0;  // 0 .. 20
      const double log_closed = LogHalfNormalMgf(s, t);
      if (t == 0) {
        if (log_closed != 0.0) ++bad;
        continue;
      }
      const double log_quad = oracle::QuadratureLogHalfNormalMgf(s, t);
      if (log_quad < 700.0) {
        const double rel =
            std::abs(std::exp(log_closed) - std::exp(log_quad)) /
            std::exp(log_quad);
        if (rel > 1e-8) ++bad;
      } else if (std::abs(log_closed - log_quad) > 1e-8) {
        ++bad;
      }
    }
  }
  return bad == 0;
}

// ---------------------------------------------------------------------------
// 2. Bound ordering on the two comparison settings, eps in linspace(0.05, 4,
//    80): gaussian lower <= hs <= rdp-converted, hs <= kifer where defined;
//    at eps = 1 in the left setting the hs bound beats kifer by >= 10x and
//    reproduces the frozen regression value.
bool Criterion2() {
  const double kFrozenHsLeftAtOne = 1.3118895530521624e-7;
  MechanismParams left, right;
  left.sigma = 5;
  left.beta = 1;
  left.lambda = 20;
  left.grad_bound = 1;
  right.sigma = 10;
  right.beta = 1;
  right.lambda = 5;
  right.grad_bound = 1;

  bool ok = true;
  for (const MechanismParams& p : {left, right}) {
    const RdpCurve rdp = BuildRdpCurve(BoundKind::kRdpGlm, p, DefaultAlphaGrid());
    for (int i = 0; i < 80; ++i) {
      const double e = 0.05 + (4.0 - 0.05) * i / 79.0;
      const double lower = GaussianHsDelta(p.grad_bound, p.sigma, e);
      const double hs = ObjPertHsDelta(p, e);
      const double converted = RdpDeltaAtEpsilon(rdp, e);
      ok &= lower <= hs + 1e-15;
      ok &= hs <= converted + 1e-15;
      const auto kifer = KiferDelta(p, e);
      if (kifer) ok &= hs <= *kifer + 1e-15;
    }
  }
  const double hs_at_one = ObjPertHsDelta(left, 1.0);
  const double kifer_at_one = KiferDelta(left, 1.0).value();
  ok &= kifer_at_one / hs_at_one >= 10.0;
  ok &= std::abs(hs_at_one - kFrozenHsLeftAtOne) <= 1e-6 * kFrozenHsLeftAtOne;
  return ok;
}

// ---------------------------------------------------------------------------
// 3. PLRV composition at sigma=8, beta=1, lambda=10, L=1: one-composition
//    agreement with the analytic bound within (h + tail + 1e-9) on [0, 4];
//    delta_k nondecreasing in k; PLRV route below the composed-RDP route
//    (strictly wherever the converted delta is above 1e-12, and within the
//    k*h + tail budget everywhere - the conservative tail floor makes an
//    unconditional strict comparison unattainable in the deep tail); strict
//    gap of at least 1e-6 at k = 16, eps = 2.
bool Criterion3() {
  MechanismParams p;
  p.sigma = 8;
  p.beta = 1;
  p.lambda = 10;
  p.grad_bound = 1;
  const PlrvGrid base = BuildObjPertPlrv(p);
  const RdpCurve rdp1 = BuildRdpCurve(BoundKind::kRdpGlm, p, DefaultAlphaGrid());

  bool ok = true;
  const double budget1 = PlrvDeltaTolerance(base, 1) + 1e-9;
  for (int i = 0; i <= 80; ++i) {
    const double e = 4.0 * i / 80.0;
    ok &= std::abs(DeltaFromPlrv(base, e) - ObjPertHsDelta(p, e)) <= budget1;
  }

  std::vector<double> prev(81, -1.0);
  double gap_at_16 = 0;
  for (int k : {1, 2, 4, 8, 16}) {
    const PlrvGrid gk = SelfCompose(base, k);
    RdpCurve rdpk = rdp1;
    for (auto& pt : rdpk.points) pt.epsilon *= k;
    const double budget = PlrvDeltaTolerance(gk, k) + 1e-9;
    for (int i = 0; i <= 80; ++i) {
      const double e = 4.0 * i / 80.0;
      const double plrv_delta = DeltaFromPlrv(gk, e);
      const double rdp_delta = RdpDeltaAtEpsilon(rdpk, e);
      ok &= plrv_delta >= prev[i] - 1e-15;  // nondecreasing in k
      prev[i] = plrv_delta;
      ok &= plrv_delta <= rdp_delta + budget;
      if (rdp_delta >= 1e-12) ok &= plrv_delta <= rdp_delta;
      if (k == 16 && i == 40) gap_at_16 = rdp_delta - plrv_delta;
    }
  }
  ok &= gap_at_16 >= 1e-6;
  return ok;
}

// ---------------------------------------------------------------------------
// 4. AMP additivity: amp_rdp - objpert_rdp = 2 tau^2 alpha / (sigma_out^2
//    lambda^2) to 1e-12 relative over 100 random parameter draws.
bool Criterion4() {
  std::mt19937_64 eng(404);
  std::uniform_real_distribution<double> unit(0.1, 3.0);
  bool ok = true;
  for (int rep = 0; rep < 100; ++rep) {
    MechanismParams p;
    p.beta = unit(eng);
    p.lambda = p.beta + unit(eng);
    p.sigma = unit(eng);
    p.grad_bound = unit(eng);
    p.tau = 0.1 * unit(eng);
    p.sigma_out = unit(eng);
    const double alpha = 1.0 + 20.0 * unit(eng);
    const double expected = 2.0 * p.tau * p.tau * alpha /
                            (p.sigma_out * p.sigma_out * p.lambda * p.lambda);
    const double got = AmpRdp(p, alpha) - ObjPertRdp(p, alpha);
    ok &= std::abs(got - expected) <= 1e-12 * std::max(1.0, expected);
  }
  return ok;
}

// ---------------------------------------------------------------------------
// 5. Gaussian special case: the one-point linear-loss instance releases
//    -(x + b)/lambda within tau/lambda + 1e-9 (sigma_out = 0), and the
//    empty-dataset instance releases -b/lambda likewise; 50 seeds each.
class LinearProbeObjective final : public SmoothObjective {
 public:
  LinearProbeObjective(Eigen::VectorXd x, double lambda, Eigen::VectorXd b)
      : x_(std::move(x)), lambda_(lambda), b_(std::move(b)) {}
  double Value(const Eigen::VectorXd& theta) const override {
    return x_.dot(theta) + 0.5 * lambda_ * theta.squaredNorm() + b_.dot(theta);
  }
  Eigen::VectorXd Gradient(const Eigen::VectorXd& theta) const override {
    return x_ + lambda_ * theta + b_;
  }
  double Smoothness() const override { return lambda_; }
  double StrongConvexity() const override { return lambda_; }
  int Dim() const override { return static_cast<int>(x_.size()); }

 private:
  Eigen::VectorXd x_;
  double lambda_;
  Eigen::VectorXd b_;
};

bool Criterion5() {
  const double lambda = 2.0;
  const double tau = 1e-6;
  const int d = 4;
  bool ok = true;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RngSpec rng;
    rng.seed = 500 + seed;
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> unit(-1, 1);
    Eigen::VectorXd x =
        Eigen::VectorXd::NullaryExpr(d, [&](int) { return unit(eng); });
    if (x.norm() > 1) x /= x.norm();
    const Eigen::VectorXd b =
        SampleGaussianVector(rng.seed, rng.objective_noise_stream, d, 1.3);
    MechanismParams p;
    p.sigma = 1.3;
    p.lambda = lambda;
    p.beta = 1.0;
    p.grad_bound = 1.0;
    p.tau = tau;
    p.sigma_out = 0;
    const LinearProbeObjective probe(x, lambda, b);
    const FitReport fit = AmpFitObjective(probe, p, Optimizer::kGd, rng);
    ok &= (fit.theta_tilde_p - (-(x + b) / lambda)).norm() <=
          tau / lambda + 1e-9;

    p.dim = d;
    const FitReport empty = AmpFit({}, LossKind::kSquared, p, Optimizer::kGd, rng);
    ok &= (empty.theta_tilde_p - (-b / lambda)).norm() <= tau / lambda + 1e-9;
  }
  return ok;
}

// ---------------------------------------------------------------------------
// 6. Clipped-loss suite: 1000 randomized convexity-midpoint checks,
//    beta-Lipschitz-gradient checks, per-example gradient norm checks, and
//    finite-difference agreement away from the kinks. Zero failures allowed.
bool Criterion6() {
  std::mt19937_64 eng(606);
  std::uniform_real_distribution<double> udist(-20, 20);
  std::uniform_real_distribution<double> cdist(0.01, 2.0);
  std::uniform_real_distribution<double> ndist(0.05, 1.0);
  std::uniform_real_distribution<double> unit(-1, 1);
  int bad = 0;

  for (int rep = 0; rep < 1000; ++rep) {
    const GlmLoss base = rep % 2 ? GlmLoss::Squared() : GlmLoss::Logistic();
    const ClippedGlmLoss cl{base, cdist(eng)};
    const double y =
        base.kind == LossKind::kLogistic ? double(eng() % 2) : unit(eng);
    const double xn = ndist(eng);

    // Convexity midpoint.
    const double u1 = udist(eng), u2 = udist(eng);
    const double mid = ClippedValue(cl, 0.5 * (u1 + u2), y, xn);
    const double avg =
        0.5 * (ClippedValue(cl, u1, y, xn) + ClippedValue(cl, u2, y, xn));
    if (!(mid <= avg + 1e-12)) ++bad;

    // Smoothness of the clipped derivative.
    const double d1 = ClippedDeriv(cl, u1, y, xn);
    const double d2 = ClippedDeriv(cl, u2, y, xn);
    if (!(std::abs(d1 - d2) <= base.beta * std::abs(u1 - u2) + 1e-12)) ++bad;

    // Per-example gradient bound.
    Eigen::VectorXd xv =
        Eigen::VectorXd::NullaryExpr(3, [&](int) { return unit(eng); });
    if (xv.norm() > 1) xv /= xv.norm();
    Eigen::VectorXd theta =
        Eigen::VectorXd::NullaryExpr(3, [&](int) { return 4 * unit(eng); });
    const Eigen::VectorXd g = PerExampleGrad(cl, theta, {xv, y});
    if (!(g.norm() <= cl.clip + 1e-12)) ++bad;

    // Finite-difference agreement away from the kinks.
    const double u = udist(eng) / 4;
    const auto bnd = ComputeClipBoundaries(base, cl.clip, y, xn);
    if (std::abs(u - bnd.u_low) > 1e-4 && std::abs(u - bnd.u_high) > 1e-4) {
      const double fd = oracle::CentralDiff(
          [&](double v) { return ClippedValue(cl, v, y, xn); }, u, 1e-6);
      const double an = ClippedDeriv(cl, u, y, xn);
      if (std::abs(an) > 1e-7 &&
          !(std::abs(fd - an) <= 1e-5 * std::abs(an) + 1e-9)) {
        ++bad;
      }
    }
  }
  return bad == 0;
}

// ---------------------------------------------------------------------------
// 7. Solver contracts: converged fits end below tau; GD iteration counts stay
//    within ceil(T) of the sufficiency bound on 50 synthetic instances; the
//    SAG incremental-gradient count scales like n log n across n in {100,
//    1000, 10000} (log-log slope in [0.9, 1.3] for at least 19 of 20 seeds).
std::vector<Example> SyntheticRegression(int n, int d, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> unit(-1, 1);
  Eigen::VectorXd truth =
      Eigen::VectorXd::NullaryExpr(d, [&](int) { return unit(eng); });
  truth *= 0.7 / std::max(0.7, truth.norm());
  std::vector<Example> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Example ex;
    ex.x = Eigen::VectorXd::NullaryExpr(d, [&](int) { return unit(eng); });
    if (ex.x.norm() > 1) ex.x /= ex.x.norm();
    ex.y = std::clamp(ex.x.dot(truth) + 0.05 * unit(eng), -1.0, 1.0);
    out.push_back(std::move(ex));
  }
  return out;
}

bool Criterion7() {
  bool ok = true;

  // Gradient-descent iteration bound, 50 instances.
  std::mt19937_64 eng(707);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 2 + rep % 5;
    const int n = 20 + static_cast<int>(eng() % 80);
    const auto data = SyntheticRegression(n, d, 7000 + rep);
    const double lambda = 0.5 + (rep % 9);
    const double clip = 0.3;
    const Eigen::VectorXd b = SampleGaussianVector(rep, 1, d, 0.5);
    const PerturbedObjective obj(data, ClippedGlmLoss{GlmLoss::Squared(), clip},
                                 lambda, b);
    const double tau = 1e-4;
    const auto res = GdSolve(obj, Eigen::VectorXd::Zero(d), tau, 10'000'000);
    ok &= res.grad_norm <= tau;
    const Eigen::VectorXd star = ReferenceMinimizer(obj);
    const double r0 = star.norm();
    if (r0 > 0) {
      const double bound = GdIterationBound(n, 1.0, lambda, tau, r0);
      ok &= static_cast<double>(res.iterations) <= std::ceil(bound);
    }
  }

  // SAG n log n scaling, 20 seeds, fitted log-log slope across three decades.
  const std::vector<int> sizes = {100, 1000, 10000};
  int in_range = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<double> log_n, log_count;
    for (int n : sizes) {
      const auto data = SyntheticRegression(n, 5, 7700 + 31 * seed + n);
      const Eigen::VectorXd b = SampleGaussianVector(900 + seed, 1, 5, 0.5);
      const PerturbedObjective obj(
          data, ClippedGlmLoss{GlmLoss::Squared(), 0.1}, 1.0, b);
      RngSpec rng;
      rng.seed = 9000 + seed;
      const double tau = 1e-3;
      const auto res =
          SagSolve(obj, Eigen::VectorXd::Zero(5), tau, 100000, rng);
      ok &= res.grad_norm <= tau;
      log_n.push_back(std::log(static_cast<double>(n)));
      log_count.push_back(std::log(static_cast<double>(res.iterations)));
    }
    // Least-squares slope through the three points.
    double mx = 0, my = 0;
    for (size_t i = 0; i < log_n.size(); ++i) {
      mx += log_n[i];
      my += log_count[i];
    }
    mx /= log_n.size();
    my /= log_n.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < log_n.size(); ++i) {
      sxy += (log_n[i] - mx) * (log_count[i] - my);
      sxx += (log_n[i] - mx) * (log_n[i] - mx);
    }
    const double slope = sxy / sxx;
    if (slope >= 0.9 && slope <= 1.3) ++in_range;
  }
  ok &= in_range >= 19;
  return ok;
}

// ---------------------------------------------------------------------------
// 8. Excess risk: Monte Carlo mean over 50 mechanism seeds on one synthetic
//    linear-regression dataset (n=200, d=5, the risk-bound CLI defaults)
//    stays below the errata bound, with two standard errors to spare.
bool Criterion8() {
  const int n = 200, d = 5;
  const auto data = SyntheticRegression(n, d, 808);
  MechanismParams p;
  p.sigma = 5;
  p.lambda = 20;
  p.beta = 1;
  p.grad_bound = 0.1;  // clip C = L = 0.1
  p.tau = 0.005;
  p.sigma_out = 0.01;
  p.dim = d;
  p.n = n;

  // theta* of the unregularized, unperturbed, unclipped objective.
  const PerturbedObjective unreg(
      data, ClippedGlmLoss{GlmLoss::Squared(),
                           std::numeric_limits<double>::infinity()},
      0.0, Eigen::VectorXd::Zero(d));
  const Eigen::VectorXd theta_star = ReferenceMinimizer(unreg);

  double sum = 0, sum_sq = 0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    RngSpec rng;
    rng.seed = 8800 + s;
    const FitReport fit = AmpFit(data, LossKind::kSquared, p, Optimizer::kGd, rng);
    const double risk =
        EmpiricalExcessRisk(data, GlmLoss::Squared(), fit.theta_tilde_p,
                            theta_star);
    sum += risk;
    sum_sq += risk * risk;
  }
  const double mean = sum / seeds;
  const double var = (sum_sq - seeds * mean * mean) / (seeds - 1);
  const double stderr_mean = std::sqrt(std::max(0.0, var) / seeds);

  RiskInputs r{n, d, p.grad_bound, p.beta, p.lambda, p.sigma, p.sigma_out,
               p.tau, theta_star.norm(), 1.0};
  const double bound = ExcessRiskBound(r, RiskBoundVariant::kErrata);
  return mean >= 0 && mean <= bound && mean + 2 * stderr_mean <= bound;
}

// ---------------------------------------------------------------------------
// 9. End to end through the CLI: logistic training on a 5000-row synthetic
//    dataset at (eps=8, delta=1e-5) beats the majority-class baseline; at
//    eps=0.1 the pipeline still runs and reports valid accounting.
int RunCli(const std::string& args, std::string* stdout_text) {
  static int counter = 0;
  const fs::path out = fs::temp_directory_path() /
                       ("objpert_acc_out_" + std::to_string(counter++));
  const std::string cmd = std::string(OBJPERT_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  *stdout_text = ss.str();
  fs::remove(out);
  return WEXITSTATUS(raw);
}

bool Criterion9() {
  const fs::path data = fs::temp_directory_path() / "objpert_acceptance.csv";
  {
    std::mt19937_64 eng(909);
    std::normal_distribution<double> gauss(0.0, 0.45);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::ofstream out(data);
    out << "f1,f2,f3,f4,f5,f6,f7,f8,label\n";
    for (int i = 0; i < 5000; ++i) {
      Eigen::VectorXd x =
          Eigen::VectorXd::NullaryExpr(8, [&](int) { return gauss(eng); });
      if (x.norm() > 1) x /= x.norm();
      const double u = 2.5 * x[0] - 2.0 * x[1] + 1.2 * x[2] + 0.3;
      const int label = unit(eng) < 1.0 / (1.0 + std::exp(-5 * u)) ? 1 : 0;
      for (int k = 0; k < 8; ++k) out << x[k] << ',';
      out << label << "\n";
    }
  }
  const fs::path model = fs::temp_directory_path() / "objpert_acc_model.json";
  const fs::path report = fs::temp_directory_path() / "objpert_acc_report.json";
  const std::string common =
      "train --data " + data.string() +
      " --task logistic --delta 1e-5 --lambda 20 --clip 1 --tau 0.005 "
      "--sigma-out 0.1 --optimizer gd --seed 7 --test-fraction 0.2 "
      "--out-model " + model.string() + " --out-report " + report.string();

  bool ok = true;
  std::string text;
  ok &= RunCli(common + " --eps 8", &text) == 0;
  if (!ok) {
    fs::remove(data);
    return false;
  }
  json high = json::parse(text);
  ok &= high.at("accuracy").get<double>() >
        high.at("test_majority_fraction").get<double>();
  ok &= high.at("grad_norm").get<double>() <= 0.005;
  ok &= high.at("privacy").at("delta").get<double>() <= 1e-5;

  // Tight budget: accounting must stay valid, accuracy is unconstrained.
  ok &= RunCli(common + " --eps 0.1", &text) == 0;
  if (ok) {
    json low = json::parse(text);
    ok &= low.at("privacy").at("delta").get<double>() <= 1e-5;
    ok &= low.at("privacy").at("sigma").get<double>() >
          high.at("privacy").at("sigma").get<double>();
  }
  fs::remove(data);
  fs::remove(model);
  fs::remove(report);
  return ok;
}

}  // namespace

int main() {
  Report(1, Criterion1(),
         "half-normal MGF closed form vs quadrature oracle, rel 1e-8 on 400 points");
  Report(2, Criterion2(),
         "delta(eps) ordering: gaussian lower <= hs <= {rdp-converted, kifer}; "
         ">= 10x better than kifer at eps=1");
  Report(3, Criterion3(),
         "PLRV composition: k=1 matches the analytic bound; monotone in k; "
         "tighter than composed RDP; 1e-6 gap at k=16");
  Report(4, Criterion4(),
         "AMP additivity: gaussian residual term exact to 1e-12 over 100 draws");
  Report(5, Criterion5(),
         "gaussian special case: releases -(x+b)/lambda and -b/lambda within "
         "tau/lambda across 50 seeds");
  Report(6, Criterion6(),
         "clipped losses: convexity, smoothness, gradient bound, finite "
         "differences - 1000 random checks");
  Report(7, Criterion7(),
         "solver contracts: grad targets met, GD within the iteration bound, "
         "SAG count scales like n log n");
  Report(8, Criterion8(),
         "Monte Carlo excess empirical risk below the errata bound (mean + 2 "
         "stderr)");
  Report(9, Criterion9(),
         "end-to-end CLI training: beats majority baseline at eps=8, valid "
         "accounting at eps=0.1");
  if (failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", failures);
  return 1;
}
