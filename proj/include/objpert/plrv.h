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

#ifndef OBJPERT_PLRV_H_
#define OBJPERT_PLRV_H_

#include <vector>

#include "objpert/accountant.h"

namespace objpert {

// Discretized privacy loss random variable on the equidistant grid
// origin + j * spacing, j = 0..masses.size()-1. Cell masses are CDF
// differences assigned to the cell's RIGHT endpoint: rounding the loss
// upward overstates delta, so every grid is a sound upper bound. Mass beyond
// the right edge is kept in tail_mass and contributes fully to delta.
// shift records the deterministic offset already folded into origin.
struct PlrvGrid {
  double origin = 0;
  double spacing = 0;
  std::vector<double> masses;
  double tail_mass = 0;
  double shift = 0;
};

// Grid discretization step and half-normal truncation width. At 12 standard
// deviations the half-normal tail mass is 2*Phi(-12) < 4e-33.
inline constexpr double kDefaultPlrvSpacing = 5e-4;
inline constexpr double kPlrvTruncationSigmas = 12.0;

// PLRV of objective perturbation:
//   |log(1 - beta/lambda)| + L^2/(2 sigma^2) + |N(0, L^2/sigma^2)|.
// The deterministic part becomes the grid origin; half-normal cell masses by
// CDF differences up to right_edge. L = 0 degenerates to a point mass.
PlrvGrid BuildObjPertPlrv(const MechanismParams& p, double spacing,
                          double right_edge);
PlrvGrid BuildObjPertPlrv(const MechanismParams& p);

// PLRV of the Gaussian mechanism, N(delta_f^2/(2 sigma^2), delta_f^2/sigma^2),
// truncated on both sides: the left tail is folded into the leftmost cell
// (moving mass up is conservative), the right tail goes to tail_mass.
PlrvGrid BuildGaussianPlrv(double delta_f, double sigma, double spacing,
                           double left_edge, double right_edge);
PlrvGrid BuildGaussianPlrv(double delta_f, double sigma, double spacing);

// Distribution of the sum of independent PLRVs: mass sequences convolve,
// origins add, tail masses combine as 1 - prod(1 - t_i). All grids must share
// the spacing. Convolution is exact (direct) below a size threshold and
// FFT-based above it.
PlrvGrid ComposePlrv(const std::vector<PlrvGrid>& grids);
PlrvGrid SelfCompose(const PlrvGrid& grid, int k);

// delta(epsilon) = sum_j mass_j * max(0, 1 - e^{epsilon - s_j}) + tail_mass,
// clamped to [0, 1].
double DeltaFromPlrv(const PlrvGrid& grid, double epsilon);

// PLRV of approximate minima perturbation: the ObjPert grid convolved with
// the Gaussian grid for the residual release (sensitivity 2 tau / lambda,
// noise sigma_out). tau = 0 is plain objective perturbation.
PlrvGrid BuildAmpPlrv(const MechanismParams& p, double spacing);

// Discretization budget of delta values read off a composed grid: one
// spacing of upward rounding per composed component plus the retained tail.
double PlrvDeltaTolerance(const PlrvGrid& grid, int compositions);

namespace internal {

// Mass-sequence convolution backends; ComposePlrv picks direct below a size
// threshold (relative accuracy in deep tails) and FFT above it.
std::vector<double> ConvolveMasses(const std::vector<double>& a,
                                   const std::vector<double>& b, bool use_fft);

}  // namespace internal

}  // namespace objpert

#endif  // OBJPERT_PLRV_H_
