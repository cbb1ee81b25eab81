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

#ifndef NESTPLAN_PARTICLES_H_
#define NESTPLAN_PARTICLES_H_

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "nestplan/domain.h"
#include "nestplan/rng.h"

namespace nestplan {

class ParticleSet;
using ParticleSetPtr = std::shared_ptr<const ParticleSet>;

// One sampled interactive state: a physical state paired with a model of the
// other agent. At level 1 the model's belief is an exact level-0 vector; at
// level l >= 2 it is a particle set of level l - 1, shared between copies
// made by resampling.
struct InteractiveParticle {
  int state = 0;
  int frame = 0;  // index into the owning set's other_frames
  std::variant<Belief, ParticleSetPtr> model;
  double weight = 0.0;

  bool nested() const { return std::holds_alternative<ParticleSetPtr>(model); }
  const Belief& belief() const { return std::get<Belief>(model); }
  const ParticleSet& nested_set() const { return *std::get<ParticleSetPtr>(model); }
};

// Agent `owner`'s sampled belief at nesting level `level` >= 1.
class ParticleSet {
 public:
  int level = 1;
  FramePtr owner;
  std::vector<FramePtr> other_frames;
  std::vector<InteractiveParticle> particles;
  std::size_t nominal_size = 0;

  std::size_t size() const { return particles.size(); }
  bool empty() const { return particles.empty(); }
  const Frame& frame_of(const InteractiveParticle& p) const { return *other_frames[p.frame]; }
  const Domain& domain() const { return owner->domain(); }

  double total_weight() const;
  bool is_normalized(double tol = kInternalTolerance) const;

  // Weighted distribution over physical states.
  Vector physical_marginal() const;

  // Throws LevelMismatchError unless every nested set sits exactly one level
  // below its parent (recursively) and level-1 particles hold level-0 vectors.
  void check_levels() const;

  // Order-independent 64-bit hash of the weighted particle multiset, with
  // beliefs and weights quantized at 1e-9.
  std::uint64_t fingerprint() const;
};

// Hash of a level-0 belief quantized at 1e-9.
std::uint64_t belief_fingerprint(const Belief& b);

// Rescales weights to sum to 1. All-zero weights throw ParticleDepletionError.
ParticleSet normalize_weights(ParticleSet ps);

enum class ResampleScheme { kMultinomial, kSystematic };

// Draws n particles with replacement proportionally to weight; the result has
// nominal size n and uniform weights 1/n. Multinomial by default.
ParticleSet resample_unbiased(const ParticleSet& ps, std::size_t n, Rng& rng,
                              ResampleScheme scheme = ResampleScheme::kMultinomial);

// Index-level resampler shared by every filter: n ancestor indices drawn
// proportionally to `weights` (normalized or not).
std::vector<std::size_t> resample_indices(const Vector& weights, std::size_t n, Rng& rng,
                                          ResampleScheme scheme = ResampleScheme::kMultinomial);

}  // namespace nestplan

#endif  // NESTPLAN_PARTICLES_H_
