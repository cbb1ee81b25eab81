// Copyright 2026 The nestplan Authors
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

#ifndef NESTPLAN_ANALYSIS_H_
#define NESTPLAN_ANALYSIS_H_

#include <cstddef>
#include <optional>
#include <span>

#include "nestplan/domain.h"

namespace nestplan {

inline constexpr double kKlSmoothing = 1e-6;

// Sampling error of a mean over n values spread over a range rho, holding
// with probability 1 - delta. Throws std::domain_error on bad inputs.
double chernoff_epsilon(std::size_t n, double delta, double rho);

// Smallest particle count whose chernoff_epsilon is at most eps (at least 1).
std::size_t particles_needed(double eps, double delta, double rho);

struct BoundInputs {
  std::size_t n = 1;
  double delta = 0.1;
  double rho = 0.0;
  double gamma = 0.9;
  int horizon = 1;
  double r_max = 0.0;
  double r_min = 0.0;
};

struct HorizonBound {
  double bound = 0.0;
  double trivial = 0.0;
};

// Error bound on a horizon-t value computed from sampled beliefs, alongside
// the trivial worst-case bound (R_max - R_min)(1 - gamma^t) / (1 - gamma)^2.
HorizonBound horizon_error_bound(const BoundInputs& in, double eps);

// Value range over a horizon-t tree: (R_max - R_min)(1 - gamma^t) / (1 - gamma).
double horizon_value_range(double r_max, double r_min, double gamma, int t);
// The looser infinite-horizon range (R_max - R_min) / (1 - gamma).
double discounted_value_range(double r_max, double r_min, double gamma);

// D(p || q) in nats after adding `smoothing` to every cell of both and
// renormalizing. Inputs must have the same shape (std::invalid_argument).
double kl_divergence(const Matrix& p, const Matrix& q, double smoothing = kKlSmoothing);
double kl_divergence(const Vector& p, const Vector& q, double smoothing = kKlSmoothing);

// Half the L1 distance between the normalized inputs.
double total_variation(const Matrix& p, const Matrix& q);

// Sums adjacent groups of `factor` lattice columns (two-state lattices).
Matrix coarsen_columns(const Matrix& m, int factor);

struct DensityCurve {
  Vector x;
  Vector y;
  double bandwidth = 0.0;
};

double silverman_bandwidth(std::span<const double> samples);

// Gaussian-kernel density of samples in [0, 1] evaluated on `points`
// equally spaced lattice points; each kernel is renormalized to unit mass on
// [0, 1]. Silverman's bandwidth when none is given. Empty input throws
// std::invalid_argument.
DensityCurve kde_density(std::span<const double> samples,
                         std::optional<double> bandwidth = std::nullopt, int points = 201);

double trapezoid(const DensityCurve& curve);

}  // namespace nestplan

#endif  // NESTPLAN_ANALYSIS_H_
