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

#ifndef NESTPLAN_PRIOR_H_
#define NESTPLAN_PRIOR_H_

#include <array>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nestplan/domain.h"
#include "nestplan/particles.h"
#include "nestplan/rng.h"

namespace nestplan {

// A density over the other agent's level-0 simplex.
//
// Piecewise-constant densities are defined on the first state's probability
// p_1 with bins [edges[k], edges[k+1]); for more than two states the
// remaining 1 - p_1 is spread uniformly (flat Dirichlet) over the rest.
struct SimplexDensity {
  enum class Kind { kUniform, kPiecewise, kPointMass };

  Kind kind = Kind::kUniform;
  std::vector<double> edges;
  std::vector<double> densities;
  std::vector<Belief> points;
  std::vector<double> point_weights;

  static SimplexDensity uniform() { return {}; }
  static SimplexDensity piecewise(std::vector<double> edges, std::vector<double> densities);
  static SimplexDensity point_mass(Belief at);

  Belief sample(int num_states, Rng& rng) const;
};

// Declarative prior over interactive states.
//
//   level 0: state_marginal only.
//   level 1: state_marginal, frame_weights over the other's frames, and a
//            SimplexDensity per (state, frame), stored state-major.
//   level 2+: state_marginal, frame_weights, and a weighted mixture of the
//            other agent's level-(l-1) priors.
struct NestedPrior {
  std::string name;
  int level = 1;
  Vector state_marginal;
  Vector frame_weights = Vector::Ones(1);
  std::vector<SimplexDensity> densities;
  std::vector<double> component_weights;
  std::vector<std::shared_ptr<const NestedPrior>> components;

  int num_frames() const { return static_cast<int>(frame_weights.size()); }
  const SimplexDensity& density(int state, int frame) const {
    return densities[static_cast<std::size_t>(state * num_frames() + frame)];
  }

  // Throws ConfigError on any violated invariant, recursively.
  void validate(int num_states) const;
};

using PriorPtr = std::shared_ptr<const NestedPrior>;

// Frames available to each agent; particles index into these lists.
struct FrameBook {
  std::array<std::vector<FramePtr>, 2> frames;

  const std::vector<FramePtr>& of(Agent a) const { return frames[index(a)]; }
  static FrameBook single(FramePtr i_frame, FramePtr j_frame) {
    return FrameBook{{std::vector<FramePtr>{std::move(i_frame)},
                      std::vector<FramePtr>{std::move(j_frame)}}};
  }
};

// Draws n interactive particles for `owner` from a level >= 1 prior.
// State and frame come from the current level's marginals; the other agent's
// belief is drawn from the matching density (level 1) or, at higher levels,
// a mixture component is picked and a nested set of n particles is sampled
// from it recursively. Nested draws use substreams derived from the particle
// index. n = 0 or a level-0 prior throws DegenerateInputError.
ParticleSet sample_initial_particles(const NestedPrior& prior, std::size_t n,
                                     const FramePtr& owner, const FrameBook& frames, Rng& rng);

// Text format, one or more blocks:
//
//   [prior <name>]
//   level <l>
//   marginal <p_1> ... <p_n>
//   frames <w_1> ... <w_k>                   (optional, default 1)
//   density <state|*> [frame <k>] uniform
//   density <state|*> [frame <k>] piecewise <e_0> ... <e_m> | <d_1> ... <d_m>
//   density <state|*> [frame <k>] points <w> <b_1> ... <b_n> [; <w> <b_1> ...]
//   component <weight> <prior name>          (level >= 2)
//
// Components may name earlier blocks or built-in priors. Returns every block
// by name; the last block is also stored under the key "".
std::map<std::string, PriorPtr> parse_priors(std::string_view text, const Domain& domain);

// Built-in priors: tiger-uniform, tiger-informed, tiger-level2, mm-uniform,
// mm-informed, mm-level2, uav-uniform.
PriorPtr builtin_prior(const std::string& name, const Domain& domain);
std::vector<std::string> builtin_prior_names();

// Resolves a built-in name or a prior file path (using its last block).
PriorPtr resolve_prior(const std::string& name_or_path, const Domain& domain);

// Default prior for a built-in domain at the given level.
std::string default_prior_name(const std::string& domain_name, int level);

}  // namespace nestplan

#endif  // NESTPLAN_PRIOR_H_
