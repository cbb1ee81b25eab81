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

#ifndef NESTPLAN_SOLVER_H_
#define NESTPLAN_SOLVER_H_

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nestplan/domain.h"
#include "nestplan/ipf.h"
#include "nestplan/particles.h"
#include "nestplan/rng.h"

namespace nestplan {

// Actions whose value is within this of the best are all optimal.
inline constexpr double kArgmaxTolerance = 1e-9;

// Uniform distribution over every action within kArgmaxTolerance of max(q).
ActionDistribution uniform_over_optimal(const Vector& q);

struct Level0Solution {
  ActionDistribution action;
  double value = 0.0;
  Vector q;  // per-action value
};

// Exact finite-horizon solution of a level-0 model, by dynamic programming
// over the full reachability tree under the noise-marginalized dynamics.
Level0Solution solve_level0_policy(const Belief& b, const Frame& frame, int horizon);

// Observation-branch sampling for the planner's reachability tree.
//
// `schedule` maps a starting depth to a draw count; depth d uses the entry
// with the largest key <= d, or `draws` when no key applies.
struct RtsConfig {
  bool enabled = false;
  int draws = 8;
  std::map<int, int> schedule;

  int draws_at(int depth) const;

  // 8 draws for depths 0-4, 6 thereafter.
  static RtsConfig tiger_schedule();
  // "off", "<N>", or "<depth>:<N>,<depth>:<N>,...". Throws ConfigError.
  static RtsConfig parse(std::string_view text);
};

// Draws n observations from `dist` with replacement and returns the distinct
// ones, ascending, each with its true probability renormalized over the set.
std::vector<std::pair<int, double>> sample_observation_set(const Vector& dist, int n, Rng& rng);

struct SolverStats {
  std::uint64_t requests = 0;
  std::uint64_t level0_solves = 0;
  std::uint64_t nested_solves = 0;

  std::uint64_t model_solves() const { return level0_solves + nested_solves; }
};

// Solves other-agent models on demand and memoizes the results.
//
// Level-0 models are cached by (frame, horizon, belief quantized at 1e-9);
// nested models by (level, owner, particle-set fingerprint, horizon). Nested
// solves draw from a stream derived from the solver seed and the cache key,
// so every cached policy is a pure function of the model and the results do
// not depend on request order. Lookups take a shared lock; insertion is
// exclusive and first-writer-wins.
class ModelSolver {
 public:
  explicit ModelSolver(std::uint64_t seed = 0) : seed_(seed) {}

  ModelSolver(const ModelSolver&) = delete;
  ModelSolver& operator=(const ModelSolver&) = delete;

  const Level0Solution& level0(const Belief& b, const Frame& frame, int horizon);

  // Pr(A_other | model) for the model held by particle `p` whose frame is
  // `frame`, acting with `horizon` steps to go.
  ActionDistribution policy(const InteractiveParticle& p, const Frame& frame, int horizon);

  // Policies for every particle of `ps`, with `horizon` steps to go, or each
  // model's own frame horizon when horizon <= 0.
  std::vector<ActionDistribution> policies(const ParticleSet& ps, int horizon);

  SolverStats stats() const;
  void reset_stats();
  void clear();

 private:
  struct Key {
    const void* frame;
    int level;
    int horizon;
    std::uint64_t hash;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  std::uint64_t seed_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<Key, std::unique_ptr<Level0Solution>, KeyHash> level0_;
  std::unordered_map<Key, ActionDistribution, KeyHash> nested_;
  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> level0_solves_{0};
  std::atomic<std::uint64_t> nested_solves_{0};
};

// Own-observation likelihood Pr(o | a, belief) averaged over the particles,
// with each particle's other agent acting by its solved policy.
Vector observation_likelihood(const ParticleSet& ps, int own_action,
                              const std::vector<ActionDistribution>& policies);
Vector observation_likelihood(const ParticleSet& ps, int own_action, ModelSolver& solver,
                              int horizon);

// Expected immediate reward of `own_action` averaged over the particles.
double expected_reward(const ParticleSet& ps, int own_action,
                       const std::vector<ActionDistribution>& policies);

struct PolicyNode {
  ActionDistribution action;
  double value = 0.0;
  Vector q;
  int horizon = 1;  // steps to go at this node
  // Slot |Omega| * a + o; null where the branch was not expanded.
  std::vector<std::unique_ptr<PolicyNode>> children;
  // Same layout; sums to 1 over the expanded observations of each action.
  Vector branch_weights;
  // The belief at this node, kept when PlannerOptions::retain_beliefs is set.
  ParticleSetPtr belief;

  const PolicyNode* child(int own_action, int own_obs, int num_obs) const {
    if (children.empty()) return nullptr;
    return children[static_cast<std::size_t>(num_obs * own_action + own_obs)].get();
  }
  std::size_t node_count() const;
};

struct PlannerOptions {
  RtsConfig rts;
  IpfVariant variant = IpfVariant::kEnumerate;
  ResampleScheme scheme = ResampleScheme::kMultinomial;
  bool retain_beliefs = false;
  std::size_t max_nodes = 0;  // 0 = unlimited; otherwise ResourceLimitError
};

struct PlanStats {
  std::size_t nodes = 0;
  std::size_t dropped_branches = 0;
  std::size_t nested_depletions = 0;
};

struct PlanResult {
  ActionDistribution action;
  double value = 0.0;
  std::unique_ptr<PolicyNode> root;
  PlanStats stats;
};

// Approximate finite-horizon policy for a sampled nested belief: expands the
// reachability tree with the interactive particle filter over every own
// action and every (or an RTS-sampled set of) own observations, then backs
// values up from the leaves. The other agent's models are solved at each
// node with the node's remaining horizon. Empty input throws
// DegenerateInputError.
PlanResult approx_policy(const ParticleSet& ps, int horizon, const PlannerOptions& options,
                         ModelSolver& solver, Rng& rng);

// Level-0 case: delegates to the exact solver; the tree is the root only.
PlanResult approx_policy(const Belief& b, const Frame& frame, int horizon);

}  // namespace nestplan

#endif  // NESTPLAN_SOLVER_H_
