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

#ifndef NESTPLAN_IPF_H_
#define NESTPLAN_IPF_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "nestplan/domain.h"
#include "nestplan/particles.h"
#include "nestplan/rng.h"

namespace nestplan {

class ModelSolver;

enum class IpfVariant {
  kEnumerate,          // one child per other-agent observation
  kSampleObservation,  // one child per particle, other's observation sampled
};

struct IpfStats {
  std::size_t children = 0;
  std::size_t nested_depletions = 0;
};

struct IpfOptions {
  IpfVariant variant = IpfVariant::kEnumerate;
  ResampleScheme scheme = ResampleScheme::kMultinomial;
  // Steps to go for every modeled agent; each frame's own horizon if unset.
  std::optional<int> other_horizon;
  // Precomputed other-agent policies, one per input particle.
  const std::vector<ActionDistribution>* other_policies = nullptr;
  IpfStats* stats = nullptr;
};

// The weighted children of one propagation, before normalization.
struct PropagatedSet {
  ParticleSet set;                     // weight = parent weight * likelihood
  std::vector<double> likelihood;      // O_other(o_other) * O_own(o_own)
  std::vector<std::size_t> parent;     // input particle index
  std::vector<int> other_observation;  // o_other of the child
};

// Propagation and weighting without resampling. Children with zero weight are
// omitted. Nested models are updated for every child.
PropagatedSet ipf_propagate(const ParticleSet& ps, int own_action, int own_obs,
                            ModelSolver& solver, Rng& rng, const IpfOptions& options = {});

// One interactive particle filter step: propagate, weight, normalize and
// resample back to the nominal size. Only the children that survive
// resampling have the other agent's model updated; an update that proves
// impossible zeroes that child and resampling is repeated. Throws
// ParticleDepletionError when no child has positive weight and
// LevelMismatchError on malformed nesting.
ParticleSet ipf_step(const ParticleSet& ps, int own_action, int own_obs, ModelSolver& solver,
                     Rng& rng, const IpfOptions& options = {});

// ipf_step with the other agent's observation sampled instead of enumerated.
ParticleSet ipf_step_sampled_obs(const ParticleSet& ps, int own_action, int own_obs,
                                 ModelSolver& solver, Rng& rng, IpfOptions options = {});

}  // namespace nestplan

#endif  // NESTPLAN_IPF_H_
