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

#ifndef NESTPLAN_GRID_H_
#define NESTPLAN_GRID_H_

#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nestplan/domain.h"
#include "nestplan/particles.h"
#include "nestplan/prior.h"

namespace nestplan {

class ModelSolver;

// Regular lattice of resolution G on the probability simplex over n states:
// every belief whose entries are multiples of 1/G. For two states the
// vertices are ordered by the first state's probability, k/G for k = 0..G.
class SimplexLattice {
 public:
  SimplexLattice(int num_states, int resolution);

  int num_states() const { return num_states_; }
  int resolution() const { return resolution_; }
  int size() const { return static_cast<int>(counts_.size()); }
  Belief vertex(int v) const;

  // Spreads unit mass of `b` over vertices: linear split between the two
  // neighbours for two states, nearest vertex otherwise. Appends to `out`.
  void project(const Belief& b, std::vector<std::pair<int, double>>& out) const;

  // Linear-split weight vertex `v` receives from a two-state belief whose
  // first probability is p; the nearest-vertex indicator otherwise.
  double kernel(int v, const Belief& b) const;

 private:
  int nearest(const Belief& b) const;

  int num_states_;
  int resolution_;
  std::vector<std::vector<int>> counts_;
  std::unordered_map<std::uint64_t, int> index_;
};

// A level-1 belief as mass over (state, other's frame, lattice vertex).
// Rows are state * F + frame, columns vertices.
struct GridBelief {
  FramePtr owner;
  std::vector<FramePtr> other_frames;
  SimplexLattice lattice{2, 1};
  Matrix mass;

  int num_frames() const { return static_cast<int>(other_frames.size()); }
  double total() const { return mass.sum(); }
  Vector physical_marginal() const;
};

// Discretizes a level-1 prior: each (state, frame) density is integrated
// against the lattice's projection kernel.
GridBelief grid_from_prior(const NestedPrior& prior, int resolution, const FramePtr& owner,
                           const FrameBook& frames);

enum class GridMethod {
  kScatter,     // push each vertex's successors onto the lattice
  kQuadrature,  // evaluate the update integral at every target vertex
};

struct GridUpdateOptions {
  GridMethod method = GridMethod::kScatter;
  // Steps to go for the other agent; its frame horizon when <= 0.
  int other_horizon = 0;
};

// Exact-on-the-grid level-1 update. Writes Pr(o | a, belief) to *evidence
// when given. Zero posterior mass throws InconsistentObservationError.
GridBelief grid_update_level1(const GridBelief& gb, int own_action, int own_obs,
                              ModelSolver& solver, const GridUpdateOptions& options = {},
                              double* evidence = nullptr);

// Particles binned onto the lattice with the grid's projection; same shape
// as GridBelief::mass. Normalized.
Matrix particle_histogram(const ParticleSet& ps, const SimplexLattice& lattice);

struct GridPlanOptions {
  GridMethod method = GridMethod::kScatter;
  std::size_t max_nodes = 200000;
};

struct GridPlan {
  ActionDistribution action;
  double value = 0.0;
  Vector q;
  std::size_t nodes = 0;
};

// Value iteration over the grid reachability tree. Throws ResourceLimitError
// when the full tree would exceed options.max_nodes.
GridPlan grid_plan_level1(const GridBelief& gb, int horizon, ModelSolver& solver,
                          const GridPlanOptions& options = {});

}  // namespace nestplan

#endif  // NESTPLAN_GRID_H_
