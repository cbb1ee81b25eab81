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

#ifndef NESTPLAN_BELIEF_H_
#define NESTPLAN_BELIEF_H_

#include <vector>

#include "nestplan/domain.h"
#include "nestplan/particles.h"
#include "nestplan/rng.h"

namespace nestplan {

// Predicted state distribution after `own_action`, with the other agent's
// action marginalized uniformly: b' = T_noisy(a)^T b.
Belief level0_predict(const Belief& b, int own_action, const Frame& frame);

// Pr(o | b, a) for every own observation under the noise-marginalized
// dynamics. Sums to 1.
Vector level0_observation_distribution(const Belief& b, int own_action, const Frame& frame);

// Exact level-0 belief update with the other agent's action treated as
// uniform noise, separately in the transition and in the observation
// likelihood. Zero posterior mass throws InconsistentObservationError.
Belief level0_update(const Belief& b, int own_action, int own_obs, const Frame& frame);

// Level-0 particle approximation over physical states.
struct StateParticles {
  std::vector<int> states;
  Vector weights;

  std::size_t size() const { return states.size(); }
  Vector marginal(int num_states) const;
};

// Sampling-importance-resampling update of a level-0 belief: propagate each
// particle through T with the other agent's action drawn uniformly, weight by
// the noise-marginalized observation likelihood, normalize and resample the
// original count.
StateParticles bootstrap_filter(const StateParticles& ps, int own_action, int own_obs,
                                const Frame& frame, Rng& rng,
                                ResampleScheme scheme = ResampleScheme::kMultinomial);

}  // namespace nestplan

#endif  // NESTPLAN_BELIEF_H_
