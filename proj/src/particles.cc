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

#include "nestplan/particles.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nestplan/errors.h"

namespace nestplan {
namespace {

std::uint64_t combine(std::uint64_t h, std::uint64_t v) { return mix64(h ^ mix64(v)); }

std::uint64_t quantize(double x) {
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::llround(x * 1e9)));
}

}  // namespace

double ParticleSet::total_weight() const {
  double sum = 0.0;
  for (const auto& p : particles) sum += p.weight;
  return sum;
}

bool ParticleSet::is_normalized(double tol) const {
  return std::abs(total_weight() - 1.0) <= tol;
}

Vector ParticleSet::physical_marginal() const {
  Vector m = Vector::Zero(owner->num_states());
  for (const auto& p : particles) m[p.state] += p.weight;
  double total = m.sum();
  if (total > 0.0) m /= total;
  return m;
}

void ParticleSet::check_levels() const {
  if (level < 1) throw LevelMismatchError(fmt::format("particle set level {} < 1", level));
  for (const auto& p : particles) {
    if (p.frame < 0 || p.frame >= static_cast<int>(other_frames.size()))
      throw LevelMismatchError("particle frame index out of range");
    if (level == 1) {
      if (p.nested()) throw LevelMismatchError("level-1 particle holds a nested particle set");
      continue;
    }
    if (!p.nested())
      throw LevelMismatchError(fmt::format("level-{} particle holds a level-0 belief", level));
    const ParticleSet& inner = p.nested_set();
    if (inner.level != level - 1) {
      throw LevelMismatchError(
          fmt::format("level-{} particle holds a level-{} set", level, inner.level));
    }
    inner.check_levels();
  }
}

std::uint64_t belief_fingerprint(const Belief& b) {
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (Eigen::Index k = 0; k < b.size(); ++k) h = combine(h, quantize(b[k]));
  return h;
}

std::uint64_t ParticleSet::fingerprint() const {
  std::vector<std::uint64_t> hashes;
  hashes.reserve(particles.size());
  for (const auto& p : particles) {
    std::uint64_t h = combine(static_cast<std::uint64_t>(p.state), static_cast<std::uint64_t>(p.frame));
    h = combine(h, p.nested() ? p.nested_set().fingerprint() : belief_fingerprint(p.belief()));
    h = combine(h, quantize(p.weight));
    hashes.push_back(h);
  }
  std::sort(hashes.begin(), hashes.end());
  std::uint64_t h = combine(static_cast<std::uint64_t>(level),
                           static_cast<std::uint64_t>(owner ? index(owner->agent()) : 7));
  for (auto v : hashes) h = combine(h, v);
  return h;
}

ParticleSet normalize_weights(ParticleSet ps) {
  double total = ps.total_weight();
  if (!(total > 0.0)) {
    throw ParticleDepletionError(
        "all particle weights are zero: the observation is inconsistent with every particle");
  }
  for (auto& p : ps.particles) p.weight /= total;
  return ps;
}

std::vector<std::size_t> resample_indices(const Vector& weights, std::size_t n, Rng& rng,
                                          ResampleScheme scheme) {
  if (weights.size() == 0) throw DegenerateInputError("cannot resample an empty particle set");
  if (n == 0) throw DegenerateInputError("resample size must be positive");
  std::vector<double> cumulative(static_cast<std::size_t>(weights.size()));
  double acc = 0.0;
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    cumulative[static_cast<std::size_t>(k)] = acc;
  }
  if (!(acc > 0.0)) throw ParticleDepletionError("cannot resample: all weights are zero");

  // Positions landing on the final boundary are clamped to the last
  // particle with positive weight.
  std::size_t last_positive = 0;
  for (std::size_t k = cumulative.size(); k-- > 0;) {
    if (weights[static_cast<Eigen::Index>(k)] > 0.0) {
      last_positive = k;
      break;
    }
  }
  auto locate = [&](double u) {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cumulative.begin());
    return std::min(k, last_positive);
  };

  std::vector<std::size_t> out;
  out.reserve(n);
  if (scheme == ResampleScheme::kSystematic) {
    const double step = acc / static_cast<double>(n);
    const double offset = rng.uniform() * step;
    for (std::size_t m = 0; m < n; ++m) out.push_back(locate(offset + step * static_cast<double>(m)));
  } else {
    for (std::size_t m = 0; m < n; ++m) out.push_back(locate(rng.uniform() * acc));
  }
  return out;
}

ParticleSet resample_unbiased(const ParticleSet& ps, std::size_t n, Rng& rng,
                              ResampleScheme scheme) {
  if (ps.empty()) throw DegenerateInputError("cannot resample an empty particle set");
  Vector w(static_cast<Eigen::Index>(ps.size()));
  for (std::size_t k = 0; k < ps.size(); ++k) w[static_cast<Eigen::Index>(k)] = ps.particles[k].weight;
  auto picks = resample_indices(w, n, rng, scheme);

  ParticleSet out;
  out.level = ps.level;
  out.owner = ps.owner;
  out.other_frames = ps.other_frames;
  out.nominal_size = n;
  out.particles.reserve(n);
  const double uniform = 1.0 / static_cast<double>(n);
  for (std::size_t k : picks) {
    out.particles.push_back(ps.particles[k]);
    out.particles.back().weight = uniform;
  }
  return out;
}

}  // namespace nestplan
