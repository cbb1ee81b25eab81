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

#include "nestplan/belief.h"

#include <fmt/format.h>

#include "nestplan/errors.h"

namespace nestplan {

Belief level0_predict(const Belief& b, int own_action, const Frame& frame) {
  return frame.noisy_transition(own_action).transpose() * b;
}

Vector level0_observation_distribution(const Belief& b, int own_action, const Frame& frame) {
  return frame.noisy_observation(own_action).transpose() * level0_predict(b, own_action, frame);
}

Belief level0_update(const Belief& b, int own_action, int own_obs, const Frame& frame) {
  Belief post(b.size());
  post.noalias() = frame.noisy_transition(own_action).transpose() * b;
  post.array() *= frame.noisy_observation(own_action).col(own_obs).array();
  const double total = post.sum();
  if (!(total > 0.0)) {
    throw InconsistentObservationError(
        fmt::format("observation {} has zero probability after action {}",
                    frame.domain().observations[index(frame.agent())][own_obs],
                    frame.domain().actions[index(frame.agent())][own_action]));
  }
  post /= total;
  return post;
}

Vector StateParticles::marginal(int num_states) const {
  Vector m = Vector::Zero(num_states);
  for (std::size_t k = 0; k < states.size(); ++k) m[states[k]] += weights[static_cast<Eigen::Index>(k)];
  return m / m.sum();
}

StateParticles bootstrap_filter(const StateParticles& ps, int own_action, int own_obs,
                                const Frame& frame, Rng& rng, ResampleScheme scheme) {
  if (ps.size() == 0) throw DegenerateInputError("bootstrap filter needs at least one particle");
  const auto n = static_cast<Eigen::Index>(ps.size());
  std::vector<int> next(ps.size());
  Vector w(n);
  const Matrix& likelihood = frame.noisy_observation(own_action);
  for (Eigen::Index k = 0; k < n; ++k) {
    const int theirs = static_cast<int>(rng.below(static_cast<std::size_t>(frame.num_other_actions())));
    const int s = ps.states[static_cast<std::size_t>(k)];
    const int s2 = static_cast<int>(rng.categorical(frame.transition(own_action, theirs).row(s)));
    next[static_cast<std::size_t>(k)] = s2;
    w[k] = ps.weights[k] * likelihood(s2, own_obs);
  }
  if (!(w.sum() > 0.0)) {
    throw ParticleDepletionError("bootstrap filter: every particle has zero likelihood");
  }
  auto picks = resample_indices(w, ps.size(), rng, scheme);
  StateParticles out;
  out.states.reserve(ps.size());
  for (std::size_t k : picks) out.states.push_back(next[k]);
  out.weights = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return out;
}

}  // namespace nestplan
