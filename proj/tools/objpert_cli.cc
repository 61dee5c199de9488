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
// Command-line surface: privacy-curve emission (`account`), noise
// calibration (`calibrate`), private training (`train`), and risk-bound
// reports (`risk-bound`). Exit codes: 0 success, 2 argument/domain error,
// 3 infeasible calibration, 4 optimization failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "objpert/accountant.h"
#include "objpert/data.h"
#include "objpert/dp_core.h"
#include "objpert/plrv.h"
#include "objpert/risk.h"
#include "objpert/solver.h"

namespace {

using json = nlohmann::json;
using namespace objpert;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitOptimFailure = 4;

// FNV-1a over the canonical parameter string; hex-encoded so every output
// row is traceable to the exact invocation.
std::string ParamsHash(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string canon;
  for (const auto& [k, v] : kv) {
    canon += k;
    canon += '=';
    canon += v;
    canon += ';';
  }
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Grid syntax a:b:n, n points linearly spaced inclusive.
std::vector<double> ParseGrid(const std::string& spec) {
  double a, b;
  long n;
  char c1, c2;
  std::istringstream ss(spec);
  if (!(ss >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 ||
      !ss.eof()) {
    throw std::invalid_argument("bad grid '" + spec + "', expected a:b:n");
  }
  std::vector<double> grid(n);
  if (n == 1) {
    grid[0] = a;
    return grid;
  }
  for (long i = 0; i < n; ++i) {
    grid[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return grid;
}

// Temp file + rename, so partially written outputs never appear.
void WriteFileAtomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

struct AccountArgs {
  std::string bound;
  double beta = 0, lambda = 0, L = 0, sigma = 0;
  std::string alpha_grid, eps_grid;
  int compositions = 1;
  double tau = 0, sigma_out = 0;
  int dim = 1;
  std::string out;
};

int RunAccount(const AccountArgs& a) {
  const std::vector<std::pair<std::string, std::string>> kv = {
      {"bound", a.bound},           {"beta", FormatDouble(a.beta)},
      {"lambda", FormatDouble(a.lambda)}, {"L", FormatDouble(a.L)},
      {"sigma", FormatDouble(a.sigma)},   {"alpha_grid", a.alpha_grid},
      {"eps_grid", a.eps_grid},     {"compositions", std::to_string(a.compositions)},
      {"tau", FormatDouble(a.tau)}, {"sigma_out", FormatDouble(a.sigma_out)},
      {"dim", std::to_string(a.dim)}};
  const std::string hash = ParamsHash(kv);

  MechanismParams p;
  p.beta = a.beta;
  p.lambda = a.lambda;
  p.grad_bound = a.L;
  p.sigma = a.sigma;
  p.tau = a.tau;
  p.sigma_out = a.sigma_out;
  p.dim = a.dim;

  const bool rdp_kind = a.bound == "rdp" || a.bound == "rdp-linearized" ||
                        a.bound == "rdp-nonglm";
  const bool dp_kind = a.bound == "hs" || a.bound == "kifer" || a.bound == "plrv";
  if (!rdp_kind && !dp_kind && a.bound != "gaussian-lower") {
    std::cerr << "unknown bound '" << a.bound << "'\n";
    return kExitUsage;
  }
  if (a.compositions < 1) {
    std::cerr << "--compositions must be >= 1\n";
    return kExitUsage;
  }
  if (a.compositions > 1 && (a.bound == "hs" || a.bound == "kifer")) {
    std::cerr << "--compositions > 1 is not supported for bound '" << a.bound
              << "' (use plrv or rdp)\n";
    return kExitUsage;
  }

  std::vector<double> alphas = a.alpha_grid.empty() ? DefaultAlphaGrid()
                                                    : ParseGrid(a.alpha_grid);
  std::vector<double> epsilons =
      a.eps_grid.empty() ? ParseGrid("0.05:4:80") : ParseGrid(a.eps_grid);

  std::ostringstream csv;
  csv << "x,value,bound,params_hash\n";
  json summary;
  summary["bound"] = a.bound;
  summary["params_hash"] = hash;
  long rows = 0;
  auto emit = [&](double x, double value) {
    csv << FormatDouble(x) << ',' << FormatDouble(value) << ',' << a.bound
        << ',' << hash << '\n';
    ++rows;
  };

  if (a.bound == "rdp" || a.bound == "rdp-linearized" || a.bound == "rdp-nonglm") {
    BoundKind kind = a.bound == "rdp"              ? BoundKind::kRdpGlm
                     : a.bound == "rdp-linearized" ? BoundKind::kRdpLinearized
                                                   : BoundKind::kRdpNonGlm;
    RdpCurve curve = BuildRdpCurve(kind, p, alphas);
    for (const auto& pt : curve.points) {
      emit(pt.alpha, pt.epsilon * a.compositions);
    }
  } else if (a.bound == "hs") {
    for (double e : epsilons) emit(e, ObjPertHsDelta(p, e));
  } else if (a.bound == "kifer") {
    for (double e : epsilons) {
      const auto d = KiferDelta(p, e);
      if (d) emit(e, *d);
    }
  } else if (a.bound == "gaussian-lower") {
    // Scale invariance: lambda plays no role in the values.
    if (!a.alpha_grid.empty()) {
      for (double al : alphas) emit(al, GaussianRdp(p.grad_bound, p.sigma, al));
    } else {
      for (double e : epsilons) emit(e, GaussianHsDelta(p.grad_bound, p.sigma, e));
    }
  } else {  // plrv
    PlrvGrid grid = BuildAmpPlrv(p, kDefaultPlrvSpacing);
    if (a.compositions > 1) grid = SelfCompose(grid, a.compositions);
    for (double e : epsilons) emit(e, DeltaFromPlrv(grid, e));
    summary["tolerance"] = PlrvDeltaTolerance(grid, a.compositions);
  }

  WriteFileAtomically(a.out, csv.str());
  summary["rows"] = rows;
  summary["out"] = a.out;
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

struct CalibrateArgs {
  double eps = 0, delta = 0, beta = 0, lambda = 0, L = 0;
  double tau = 0, sigma_out = 0;
  std::string bound;
};

// Bisection over sigma for the composed AMP mechanism via the PLRV route;
// bracket seeded by the analytic ObjPert calibration, which is a lower bound
// on the composed noise requirement.
double CalibrateAmpPlrvSigma(double eps, double delta, MechanismParams p) {
  p.sigma = 1.0;
  const double sigma_obj =
      CalibrateSigma(eps, delta, p, BoundKind::kHsAnalytic);
  auto delta_at = [&](double sigma) {
    p.sigma = sigma;
    return DeltaFromPlrv(BuildAmpPlrv(p, kDefaultPlrvSpacing), eps);
  };
  double lo = sigma_obj * (1.0 - 1e-9);
  double hi = sigma_obj;
  int doublings = 0;
  while (delta_at(hi) > delta) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60) {
      throw CalibrationError("AMP calibration: target unreachable");
    }
  }
  while (hi / lo > 1.0 + kSigmaRelTol) {
    const double mid = std::sqrt(lo * hi);
    (delta_at(mid) <= delta ? hi : lo) = mid;
  }
  return hi;
}

int RunCalibrate(const CalibrateArgs& a) {
  if (!(a.delta > 0)) {
    std::cerr << "--delta must be > 0 (pure DP unsupported here)\n";
    return kExitUsage;
  }
  MechanismParams p;
  p.beta = a.beta;
  p.lambda = a.lambda;
  p.grad_bound = a.L;
  p.tau = a.tau;
  p.sigma_out = a.sigma_out;
  p.sigma = 1.0;

  double sigma;
  if (a.bound == "plrv") {
    sigma = CalibrateAmpPlrvSigma(a.eps, a.delta, p);
  } else {
    BoundKind kind;
    if (a.bound == "rdp") kind = BoundKind::kRdpGlm;
    else if (a.bound == "rdp-linearized") kind = BoundKind::kRdpLinearized;
    else if (a.bound == "rdp-nonglm") kind = BoundKind::kRdpNonGlm;
    else if (a.bound == "hs") kind = BoundKind::kHsAnalytic;
    else if (a.bound == "kifer") kind = BoundKind::kKifer;
    else if (a.bound == "gaussian-lower") kind = BoundKind::kGaussianLowerHs;
    else {
      std::cerr << "unknown bound '" << a.bound << "'\n";
      return kExitUsage;
    }
    sigma = CalibrateSigma(a.eps, a.delta, p, kind);
  }

  p.sigma = sigma;
  double achieved;
  if (a.bound == "plrv") {
    achieved = DeltaFromPlrv(BuildAmpPlrv(p, kDefaultPlrvSpacing), a.eps);
  } else if (a.bound == "hs") {
    achieved = ObjPertHsDelta(p, a.eps);
  } else if (a.bound == "kifer") {
    achieved = KiferDelta(p, a.eps).value_or(1.0);
  } else if (a.bound == "gaussian-lower") {
    achieved = GaussianHsDelta(p.grad_bound, p.sigma, a.eps);
  } else {
    BoundKind kind = a.bound == "rdp"              ? BoundKind::kRdpGlm
                     : a.bound == "rdp-linearized" ? BoundKind::kRdpLinearized
                                                   : BoundKind::kRdpNonGlm;
    achieved = RdpDeltaAtEpsilon(BuildRdpCurve(kind, p, DefaultAlphaGrid()), a.eps);
  }

  json out;
  out["sigma"] = sigma;
  out["bound"] = a.bound;
  out["achieved_delta"] = achieved;
  std::cout << out.dump() << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string data;
  std::string task;
  double eps = 0, delta = 0, lambda = 0, clip = 0, tau = 0, sigma_out = 0;
  std::string optimizer = "gd";
  std::uint64_t seed = 0;
  std::string normalize = "unit_ball";
  double test_fraction = 0.2;
  std::string out_model = "model.json";
  std::string out_report = "report.json";
};

int RunTrain(const TrainArgs& a) {
  if (!(a.delta > 0)) {
    std::cerr << "--delta must be > 0\n";
    return kExitUsage;
  }
  const Task task =
      a.task == "logistic" ? Task::kBinaryClassification : Task::kRegression;
  const LossKind loss_kind =
      a.task == "logistic" ? LossKind::kLogistic : LossKind::kSquared;
  const GlmLoss base_loss =
      loss_kind == LossKind::kLogistic ? GlmLoss::Logistic() : GlmLoss::Squared();

  // Label column: "label" when present, otherwise the last column.
  std::string label_column;
  {
    std::ifstream probe(a.data);
    std::string header;
    if (!probe || !std::getline(probe, header)) {
      std::cerr << "cannot read " << a.data << "\n";
      return kExitUsage;
    }
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::stringstream ss(header);
    std::string cell;
    bool has_label = false;
    while (std::getline(ss, cell, ',')) {
      if (cell == "label") has_label = true;
      label_column = cell;
    }
    if (has_label) label_column = "label";
  }

  RawTable raw = LoadCsv(a.data, label_column, task);
  const NormalizeMode mode = a.normalize == "paper_adult"
                                 ? NormalizeMode::kPaperAdult
                                 : NormalizeMode::kUnitBall;
  Dataset ds = NormalizeFeatures(raw, mode, task);
  RngSpec rng;
  rng.seed = a.seed;
  auto [train, test] = Split(ds, a.test_fraction, rng);
  if (train.examples.empty() || test.examples.empty()) {
    std::cerr << "split leaves an empty train or test side (n = "
              << ds.examples.size() << ", test fraction " << a.test_fraction
              << ")\n";
    return kExitUsage;
  }

  // Accounting uses the effective gradient bound min(clip, L); clipping at
  // that threshold is pointwise identical to clipping at a larger-than-L one.
  MechanismParams p;
  p.beta = base_loss.beta;
  p.lambda = a.lambda;
  p.grad_bound = base_loss.lipschitz ? std::min(a.clip, *base_loss.lipschitz)
                                     : a.clip;
  p.tau = a.tau;
  p.sigma_out = a.sigma_out;
  p.dim = ds.d;
  p.n = static_cast<long>(train.examples.size());

  // The released object is the AMP composition; the privacy statement always
  // covers the ObjPert + Gaussian pair, never the ObjPert-only bound.
  const double sigma = CalibrateAmpPlrvSigma(a.eps, a.delta, p);
  p.sigma = sigma;
  const double achieved_delta =
      DeltaFromPlrv(BuildAmpPlrv(p, kDefaultPlrvSpacing), a.eps);

  const Optimizer optimizer = a.optimizer == "agd"   ? Optimizer::kAgd
                              : a.optimizer == "sag" ? Optimizer::kSag
                                                     : Optimizer::kGd;
  const FitReport fit = AmpFit(train.examples, loss_kind, p, optimizer, rng);

  // Test-split metric.
  double metric = 0;
  double majority = 0;
  if (task == Task::kBinaryClassification) {
    long correct = 0, positives = 0;
    for (const auto& ex : test.examples) {
      const double u = ex.x.dot(fit.theta_tilde_p);
      const double pred = u >= 0 ? 1.0 : 0.0;
      if (pred == ex.y) ++correct;
      if (ex.y == 1.0) ++positives;
    }
    const double n_test = static_cast<double>(test.examples.size());
    metric = correct / n_test;
    majority = std::max(positives / n_test, 1.0 - positives / n_test);
  } else {
    double sse = 0;
    for (const auto& ex : test.examples) {
      const double r = ex.x.dot(fit.theta_tilde_p) - ex.y;
      sse += r * r;
    }
    metric = std::sqrt(sse / static_cast<double>(test.examples.size()));
  }

  const std::vector<std::pair<std::string, std::string>> kv = {
      {"data", a.data},        {"task", a.task},
      {"eps", FormatDouble(a.eps)},   {"delta", FormatDouble(a.delta)},
      {"lambda", FormatDouble(a.lambda)}, {"clip", FormatDouble(a.clip)},
      {"tau", FormatDouble(a.tau)},   {"sigma_out", FormatDouble(a.sigma_out)},
      {"optimizer", a.optimizer},     {"seed", std::to_string(a.seed)},
      {"normalize", a.normalize},
      {"test_fraction", FormatDouble(a.test_fraction)}};
  const std::string hash = ParamsHash(kv);

  json model;
  model["theta"] = std::vector<double>(fit.theta_tilde_p.data(),
                                       fit.theta_tilde_p.data() + ds.d);
  model["preprocessing"] = {{"normalize", a.normalize},
                            {"label_scale", ds.label_scale},
                            {"label_offset", ds.label_offset},
                            {"d", ds.d},
                            {"label_column", label_column}};
  model["params_hash"] = hash;

  json report;
  report["grad_norm"] = fit.grad_norm_final;
  report["iterations"] = fit.iterations;
  if (task == Task::kBinaryClassification) {
    report["accuracy"] = metric;
    report["test_majority_fraction"] = majority;
  } else {
    report["rmse"] = metric;
  }
  report["privacy"] = {{"eps", a.eps},
                       {"delta", achieved_delta},
                       {"bound", "plrv-amp"},
                       {"sigma", sigma},
                       {"grad_bound", p.grad_bound}};
  report["seed"] = a.seed;
  report["params_hash"] = hash;

  WriteFileAtomically(a.out_model, model.dump(2) + "\n");
  WriteFileAtomically(a.out_report, report.dump(2) + "\n");
  std::cout << report.dump() << "\n";
  return kExitOk;
}

struct RiskBoundArgs {
  long n = 200;
  int d = 5;
  double L = 0.1, beta = 1.0, lambda = 20.0, sigma = 5.0, sigma_out = 0.01,
         tau = 0.005, theta_star_norm = 1.0, domain_norm = 1.0;
};

int RunRiskBound(const RiskBoundArgs& a) {
  RiskInputs r{a.n,        a.d,       a.L,   a.beta,           a.lambda,
               a.sigma,    a.sigma_out, a.tau, a.theta_star_norm, a.domain_norm};
  const std::vector<std::pair<std::string, std::string>> kv = {
      {"n", std::to_string(a.n)},      {"d", std::to_string(a.d)},
      {"L", FormatDouble(a.L)},        {"beta", FormatDouble(a.beta)},
      {"lambda", FormatDouble(a.lambda)}, {"sigma", FormatDouble(a.sigma)},
      {"sigma_out", FormatDouble(a.sigma_out)}, {"tau", FormatDouble(a.tau)},
      {"theta_star_norm", FormatDouble(a.theta_star_norm)},
      {"domain_norm", FormatDouble(a.domain_norm)}};
  json out;
  out["excess_risk_bound_errata"] = ExcessRiskBound(r, RiskBoundVariant::kErrata);
  out["excess_risk_bound_appendix"] =
      ExcessRiskBound(r, RiskBoundVariant::kAppendix);
  out["gd_iteration_bound"] =
      GdIterationBound(a.n, a.beta, a.lambda, a.tau, a.theta_star_norm);
  out["params_hash"] = ParamsHash(kv);
  std::cout << out.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Objective perturbation privacy accounting and training"};
  app.require_subcommand(1);

  AccountArgs acc;
  CLI::App* account = app.add_subcommand("account", "Emit a privacy-bound curve as CSV");
  account->add_option("--bound", acc.bound,
                      "rdp|rdp-linearized|rdp-nonglm|hs|kifer|gaussian-lower|plrv")
      ->required();
  account->add_option("--beta", acc.beta)->required();
  account->add_option("--lambda", acc.lambda)->required();
  account->add_option("--L", acc.L)->required();
  account->add_option("--sigma", acc.sigma)->required();
  account->add_option("--alpha-grid", acc.alpha_grid, "a:b:n, linear inclusive");
  account->add_option("--eps-grid", acc.eps_grid, "a:b:n, linear inclusive");
  account->add_option("--compositions", acc.compositions);
  account->add_option("--tau", acc.tau);
  account->add_option("--sigma-out", acc.sigma_out);
  account->add_option("--dim", acc.dim, "dimension for rdp-nonglm");
  account->add_option("--out", acc.out)->required();

  CalibrateArgs cal;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Smallest sigma meeting a privacy target");
  calibrate->add_option("--eps", cal.eps)->required();
  calibrate->add_option("--delta", cal.delta)->required();
  calibrate->add_option("--beta", cal.beta)->required();
  calibrate->add_option("--lambda", cal.lambda)->required();
  calibrate->add_option("--L", cal.L)->required();
  calibrate->add_option("--bound", cal.bound)->required();
  calibrate->add_option("--tau", cal.tau);
  calibrate->add_option("--sigma-out", cal.sigma_out);

  TrainArgs tr;
  CLI::App* train = app.add_subcommand("train", "Private GLM training (Algorithm: AMP with gradient clipping)");
  train->add_option("--data", tr.data)->required();
  train->add_option("--task", tr.task, "logistic|linear")->required()
      ->check(CLI::IsMember({"logistic", "linear"}));
  train->add_option("--eps", tr.eps)->required();
  train->add_option("--delta", tr.delta)->required();
  train->add_option("--lambda", tr.lambda)->required();
  train->add_option("--clip", tr.clip)->required();
  train->add_option("--tau", tr.tau)->required();
  train->add_option("--sigma-out", tr.sigma_out)->required();
  train->add_option("--optimizer", tr.optimizer)
      ->check(CLI::IsMember({"gd", "agd", "sag"}));
  train->add_option("--seed", tr.seed);
  train->add_option("--normalize", tr.normalize)
      ->check(CLI::IsMember({"unit_ball", "paper_adult"}));
  train->add_option("--test-fraction", tr.test_fraction);
  train->add_option("--out-model", tr.out_model);
  train->add_option("--out-report", tr.out_report);

  RiskBoundArgs rb;
  CLI::App* risk = app.add_subcommand("risk-bound", "Excess-risk and iteration bounds");
  risk->add_option("--n", rb.n);
  risk->add_option("--d", rb.d);
  risk->add_option("--L", rb.L);
  risk->add_option("--beta", rb.beta);
  risk->add_option("--lambda", rb.lambda);
  risk->add_option("--sigma", rb.sigma);
  risk->add_option("--sigma-out", rb.sigma_out);
  risk->add_option("--tau", rb.tau);
  risk->add_option("--theta-star-norm", rb.theta_star_norm);
  risk->add_option("--domain-norm", rb.domain_norm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (account->parsed()) return RunAccount(acc);
    if (calibrate->parsed()) return RunCalibrate(cal);
    if (train->parsed()) return RunTrain(tr);
    if (risk->parsed()) return RunRiskBound(rb);
  } catch (const CalibrationError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const NonConvergenceError& e) {
    std::cerr << "optimization failed: " << e.what()
              << " (last gradient norm " << e.grad_norm << ")\n";
    return kExitOptimFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
