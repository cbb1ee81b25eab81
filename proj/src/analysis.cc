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

#include "nestplan/analysis.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nestplan {
namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0, 1)");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double chernoff_epsilon(std::size_t n, double delta, double rho) {
  if (n < 1) throw std::domain_error("sample count must be at least 1");
  check_delta(delta);
  if (!(rho >= 0.0)) throw std::domain_error("value range must be nonnegative");
  return rho * std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

std::size_t particles_needed(double eps, double delta, double rho) {
  if (!(eps > 0.0)) throw std::domain_error("epsilon must be positive");
  check_delta(delta);
  if (!(rho >= 0.0)) throw std::domain_error("value range must be nonnegative");
  const double n = std::ceil(rho * rho * std::log(2.0 / delta) / (2.0 * eps * eps));
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

HorizonBound horizon_error_bound(const BoundInputs& in, double eps) {
  if (in.r_max < in.r_min) throw std::domain_error("R_max must not be below R_min");
  if (!(in.gamma >= 0.0 && in.gamma < 1.0)) throw std::domain_error("gamma must lie in [0, 1)");
  if (in.horizon < 0) throw std::domain_error("horizon must be nonnegative");
  check_delta(in.delta);
  const double g = 1.0 - std::pow(in.gamma, in.horizon);
  const double range = in.r_max - in.r_min;
  HorizonBound out;
  out.trivial = range * g / ((1.0 - in.gamma) * (1.0 - in.gamma));
  out.bound = (1.0 - in.delta) * 2.0 * eps * g / (1.0 - in.gamma) + in.delta * out.trivial;
  return out;
}

double horizon_value_range(double r_max, double r_min, double gamma, int t) {
  return (r_max - r_min) * (1.0 - std::pow(gamma, t)) / (1.0 - gamma);
}

double discounted_value_range(double r_max, double r_min, double gamma) {
  return (r_max - r_min) / (1.0 - gamma);
}

double kl_divergence(const Matrix& p, const Matrix& q, double smoothing) {
  if (p.rows() != q.rows() || p.cols() != q.cols())
    throw std::invalid_argument("KL divergence needs distributions over the same partition");
  if (p.size() == 0) throw std::invalid_argument("KL divergence of empty distributions");
  const Eigen::ArrayXXd ps = (p.array() + smoothing) / (p.sum() + smoothing * static_cast<double>(p.size()));
  const Eigen::ArrayXXd qs = (q.array() + smoothing) / (q.sum() + smoothing * static_cast<double>(q.size()));
  return std::max(0.0, (ps * (ps / qs).log()).sum());
}

double kl_divergence(const Vector& p, const Vector& q, double smoothing) {
  return kl_divergence(Matrix(p), Matrix(q), smoothing);
}

double total_variation(const Matrix& p, const Matrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols())
    throw std::invalid_argument("total variation needs distributions over the same partition");
  return 0.5 * (p / p.sum() - q / q.sum()).cwiseAbs().sum();
}

Matrix coarsen_columns(const Matrix& m, int factor) {
  if (factor < 1) throw std::invalid_argument("coarsening factor must be positive");
  const Eigen::Index cols = (m.cols() + factor - 1) / factor;
  Matrix out = Matrix::Zero(m.rows(), cols);
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.col(c / factor) += m.col(c);
  return out;
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("bandwidth of an empty sample");
  const auto n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  const double sd = samples.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  std::vector<double> v(samples.begin(), samples.end());
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  // Degenerate spread: fall back to two lattice spacings.
  return std::max(0.9 * spread * std::pow(n, -0.2), 0.01);
}

DensityCurve kde_density(std::span<const double> samples, std::optional<double> bandwidth,
                         int points) {
  if (samples.empty()) throw std::invalid_argument("kernel density of an empty sample");
  if (points < 2) throw std::invalid_argument("kernel density needs at least two lattice points");
  DensityCurve c;
  c.bandwidth = bandwidth.value_or(silverman_bandwidth(samples));
  if (!(c.bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  c.x = Vector::LinSpaced(points, 0.0, 1.0);
  c.y = Vector::Zero(points);
  const double h = c.bandwidth;
  const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
  for (double s : samples) {
    const double mass = normal_cdf((1.0 - s) / h) - normal_cdf(-s / h);
    for (int k = 0; k < points; ++k) {
      const double z = (c.x[k] - s) / h;
      c.y[k] += norm * std::exp(-0.5 * z * z) / mass;
    }
  }
  c.y /= static_cast<double>(samples.size());
  return c;
}

double trapezoid(const DensityCurve& curve) {
  double sum = 0.0;
  for (Eigen::Index k = 1; k < curve.x.size(); ++k)
    sum += 0.5 * (curve.y[k] + curve.y[k - 1]) * (curve.x[k] - curve.x[k - 1]);
  return sum;
}

}  // namespace nestplan
