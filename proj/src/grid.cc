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

#include "nestplan/grid.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <fmt/format.h>

#include "nestplan/belief.h"
#include "nestplan/errors.h"
#include "nestplan/solver.h"

namespace nestplan {
namespace {

constexpr std::size_t kMaxLatticeSize = 5'000'000;

std::uint64_t counts_key(const std::vector<int>& counts) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (int c : counts) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return h;
}

void enumerate(int parts, int remaining, std::vector<int>& cur,
               std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(remaining);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int c = remaining; c >= 0; --c) {
    cur.push_back(c);
    enumerate(parts - 1, remaining - c, cur, out);
    cur.pop_back();
  }
}

double lattice_size(int n, int g) {
  // C(g + n - 1, n - 1) in floating point, for the size guard only.
  double r = 1.0;
  for (int k = 1; k < n; ++k) r = r * (g + k) / k;
  return r;
}

double piecewise_at(const SimplexDensity& d, double p) {
  auto it = std::upper_bound(d.edges.begin(), d.edges.end(), p);
  auto bin = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - d.edges.begin() - 1, 0));
  return d.densities[std::min(bin, d.densities.size() - 1)];
}

Vector discretize(const SimplexDensity& d, const SimplexLattice& lat) {
  const int v_count = lat.size();
  const int g = lat.resolution();
  Vector r = Vector::Zero(v_count);
  std::vector<std::pair<int, double>> proj;
  switch (d.kind) {
    case SimplexDensity::Kind::kPointMass:
      for (std::size_t k = 0; k < d.points.size(); ++k) {
        proj.clear();
        lat.project(d.points[k], proj);
        for (auto [v, w] : proj) r[v] += d.point_weights[k] * w;
      }
      break;
    case SimplexDensity::Kind::kUniform:
      if (lat.num_states() == 2) {
        r.setConstant(1.0 / g);
        r[0] = r[g] = 0.5 / g;
      } else {
        r.setConstant(1.0);
      }
      break;
    case SimplexDensity::Kind::kPiecewise:
      if (lat.num_states() == 2) {
        // Midpoint rule for the integral of density times the hat function.
        constexpr int kSub = 64;
        for (int cell = 0; cell < g; ++cell) {
          for (int m = 0; m < kSub; ++m) {
            const double t = (m + 0.5) / kSub;
            const double dens = piecewise_at(d, (cell + t) / g) / (g * kSub);
            r[cell] += dens * (1.0 - t);
            r[cell + 1] += dens * t;
          }
        }
      } else {
        for (int v = 0; v < v_count; ++v) r[v] = piecewise_at(d, lat.vertex(v)[0]);
      }
      break;
  }
  return r / r.sum();
}

// Per-update cache of the other agent's policy and belief successors at
// every lattice vertex.
class VertexCache {
 public:
  VertexCache(const GridBelief& gb, ModelSolver& solver, int other_horizon)
      : gb_(gb), solver_(solver), horizon_(other_horizon) {
    const auto slots = static_cast<std::size_t>(gb.num_frames() * gb.lattice.size());
    policy_.resize(slots);
    const Frame& any = *gb.other_frames.front();
    actions_ = any.num_actions();
    obs_ = any.num_observations();
    successor_.resize(slots * static_cast<std::size_t>(actions_ * obs_));
  }

  const ActionDistribution& policy(int f, int v) {
    auto& slot = policy_[static_cast<std::size_t>(f * gb_.lattice.size() + v)];
    if (!slot) {
      const Frame& fr = *gb_.other_frames[f];
      slot = solver_.level0(gb_.lattice.vertex(v), fr, horizon_ > 0 ? horizon_ : fr.horizon()).action;
    }
    return *slot;
  }

  struct Successor {
    bool valid = false;
    Belief belief;
    std::vector<std::pair<int, double>> projection;
  };

  const Successor& successor(int f, int v, int theirs, int obs) {
    auto idx = (static_cast<std::size_t>(f * gb_.lattice.size() + v) * actions_ + theirs) * obs_ + obs;
    auto& slot = successor_[idx];
    if (!slot) {
      Successor s;
      try {
        s.belief = level0_update(gb_.lattice.vertex(v), theirs, obs, *gb_.other_frames[f]);
        s.valid = true;
        gb_.lattice.project(s.belief, s.projection);
      } catch (const InconsistentObservationError&) {
      }
      slot = std::move(s);
    }
    return *slot;
  }

 private:
  const GridBelief& gb_;
  ModelSolver& solver_;
  int horizon_;
  int actions_ = 0;
  int obs_ = 0;
  std::vector<std::optional<ActionDistribution>> policy_;
  std::vector<std::optional<Successor>> successor_;
};

Matrix scatter_update(const GridBelief& gb, int a, int o, VertexCache& cache) {
  const Frame& own = *gb.owner;
  const int ns = own.num_states();
  const int nf = gb.num_frames();
  const int nv = gb.lattice.size();
  Matrix next = Matrix::Zero(gb.mass.rows(), gb.mass.cols());
  for (int f = 0; f < nf; ++f) {
    for (int v = 0; v < nv; ++v) {
      bool any = false;
      for (int s = 0; s < ns; ++s) any = any || gb.mass(s * nf + f, v) > 0.0;
      if (!any) continue;
      const ActionDistribution& pol = cache.policy(f, v);
      for (int theirs = 0; theirs < pol.size(); ++theirs) {
        if (!(pol[theirs] > 0.0)) continue;
        const Matrix& t = own.transition(a, theirs);
        const Matrix& oi = own.observation(a, theirs);
        const Matrix& oj = own.other_observation(a, theirs);
        for (int s = 0; s < ns; ++s) {
          const double m = gb.mass(s * nf + f, v) * pol[theirs];
          if (!(m > 0.0)) continue;
          for (int s2 = 0; s2 < ns; ++s2) {
            const double base = m * t(s, s2) * oi(s2, o);
            if (!(base > 0.0)) continue;
            for (int k = 0; k < oj.cols(); ++k) {
              if (!(oj(s2, k) > 0.0)) continue;
              const auto& succ = cache.successor(f, v, theirs, k);
              if (!succ.valid) continue;
              for (auto [v2, w] : succ.projection) next(s2 * nf + f, v2) += base * oj(s2, k) * w;
            }
          }
        }
      }
    }
  }
  return next;
}

Matrix quadrature_update(const GridBelief& gb, int a, int o, VertexCache& cache) {
  const Frame& own = *gb.owner;
  const int ns = own.num_states();
  const int nf = gb.num_frames();
  const int nv = gb.lattice.size();
  const int na = own.num_other_actions();
  const int no = own.num_other_observations();

  // Integrand weight of each (source vertex, other action, other obs) for
  // every next state, and the successor point it is concentrated at.
  struct Term {
    int frame;
    const Belief* point;
    Vector weight;  // per next state
  };
  std::vector<Term> terms;
  for (int f = 0; f < nf; ++f) {
    for (int v = 0; v < nv; ++v) {
      bool any = false;
      for (int s = 0; s < ns; ++s) any = any || gb.mass(s * nf + f, v) > 0.0;
      if (!any) continue;
      const ActionDistribution& pol = cache.policy(f, v);
      for (int theirs = 0; theirs < na; ++theirs) {
        if (!(pol[theirs] > 0.0)) continue;
        Vector reach = Vector::Zero(ns);
        for (int s = 0; s < ns; ++s) {
          reach += gb.mass(s * nf + f, v) * pol[theirs] * own.transition(a, theirs).row(s).transpose();
        }
        reach = reach.cwiseProduct(own.observation(a, theirs).col(o));
        for (int k = 0; k < no; ++k) {
          const auto& succ = cache.successor(f, v, theirs, k);
          if (!succ.valid) continue;
          Vector w = reach.cwiseProduct(own.other_observation(a, theirs).col(k));
          if (!(w.sum() > 0.0)) continue;
          terms.push_back({f, &succ.belief, std::move(w)});
        }
      }
    }
  }

  Matrix next = Matrix::Zero(gb.mass.rows(), gb.mass.cols());
  for (int v2 = 0; v2 < nv; ++v2) {
    for (const Term& t : terms) {
      const double k = gb.lattice.kernel(v2, *t.point);
      if (k == 0.0) continue;
      for (int s2 = 0; s2 < ns; ++s2) next(s2 * nf + t.frame, v2) += k * t.weight[s2];
    }
  }
  return next;
}

}  // namespace

SimplexLattice::SimplexLattice(int num_states, int resolution)
    : num_states_(num_states), resolution_(resolution) {
  if (num_states < 2) throw ConfigError("a belief lattice needs at least two states");
  if (resolution < 1) throw ConfigError("grid resolution must be at least 1");
  if (lattice_size(num_states, resolution) > static_cast<double>(kMaxLatticeSize)) {
    throw ResourceLimitError(fmt::format("a resolution-{} lattice over {} states exceeds {} vertices",
                                         resolution, num_states, kMaxLatticeSize));
  }
  if (num_states == 2) {
    for (int k = 0; k <= resolution; ++k) counts_.push_back({k, resolution - k});
    return;
  }
  std::vector<int> cur;
  enumerate(num_states, resolution, cur, counts_);
  for (std::size_t v = 0; v < counts_.size(); ++v) index_.emplace(counts_key(counts_[v]), static_cast<int>(v));
}

Belief SimplexLattice::vertex(int v) const {
  const auto& c = counts_[static_cast<std::size_t>(v)];
  Belief b(num_states_);
  for (int k = 0; k < num_states_; ++k) b[k] = static_cast<double>(c[static_cast<std::size_t>(k)]) / resolution_;
  return b;
}

int SimplexLattice::nearest(const Belief& b) const {
  std::vector<int> counts(static_cast<std::size_t>(num_states_));
  std::vector<std::pair<double, int>> frac;
  int used = 0;
  for (int k = 0; k < num_states_; ++k) {
    const double x = b[k] * resolution_;
    const int fl = static_cast<int>(std::floor(x));
    counts[static_cast<std::size_t>(k)] = fl;
    used += fl;
    frac.emplace_back(x - fl, k);
  }
  std::stable_sort(frac.begin(), frac.end(),
                   [](const auto& l, const auto& r) { return l.first > r.first; });
  for (int k = 0; k < resolution_ - used && k < num_states_; ++k) ++counts[static_cast<std::size_t>(frac[static_cast<std::size_t>(k)].second)];
  return index_.at(counts_key(counts));
}

void SimplexLattice::project(const Belief& b, std::vector<std::pair<int, double>>& out) const {
  if (num_states_ != 2) {
    out.emplace_back(nearest(b), 1.0);
    return;
  }
  const double x = std::clamp(b[0], 0.0, 1.0) * resolution_;
  const int lo = std::min(static_cast<int>(std::floor(x)), resolution_);
  const double frac = x - lo;
  if (frac > 0.0) {
    out.emplace_back(lo, 1.0 - frac);
    out.emplace_back(lo + 1, frac);
  } else {
    out.emplace_back(lo, 1.0);
  }
}

double SimplexLattice::kernel(int v, const Belief& b) const {
  if (num_states_ != 2) return nearest(b) == v ? 1.0 : 0.0;
  const double x = std::clamp(b[0], 0.0, 1.0) * resolution_;
  return std::max(0.0, 1.0 - std::abs(x - v));
}

Vector GridBelief::physical_marginal() const {
  const int ns = owner->num_states();
  const int nf = num_frames();
  Vector m = Vector::Zero(ns);
  for (int s = 0; s < ns; ++s) m[s] = mass.middleRows(s * nf, nf).sum();
  return m / m.sum();
}

GridBelief grid_from_prior(const NestedPrior& prior, int resolution, const FramePtr& owner,
                           const FrameBook& frames) {
  if (prior.level != 1) throw ConfigError("the grid baseline supports level-1 priors only");
  const int ns = owner->num_states();
  prior.validate(ns);
  GridBelief gb;
  gb.owner = owner;
  const auto& theirs = frames.of(other(owner->agent()));
  if (static_cast<int>(theirs.size()) < prior.num_frames())
    throw ConfigError("prior names more frames than are available");
  gb.other_frames.assign(theirs.begin(), theirs.begin() + prior.num_frames());
  gb.lattice = SimplexLattice(ns, resolution);
  const int nf = gb.num_frames();
  gb.mass = Matrix::Zero(ns * nf, gb.lattice.size());
  for (int s = 0; s < ns; ++s) {
    for (int f = 0; f < nf; ++f) {
      gb.mass.row(s * nf + f) = prior.state_marginal[s] * prior.frame_weights[f] *
                                discretize(prior.density(s, f), gb.lattice).transpose();
    }
  }
  gb.mass /= gb.mass.sum();
  return gb;
}

GridBelief grid_update_level1(const GridBelief& gb, int own_action, int own_obs,
                              ModelSolver& solver, const GridUpdateOptions& options,
                              double* evidence) {
  VertexCache cache(gb, solver, options.other_horizon);
  GridBelief out;
  out.owner = gb.owner;
  out.other_frames = gb.other_frames;
  out.lattice = gb.lattice;
  out.mass = options.method == GridMethod::kScatter
                 ? scatter_update(gb, own_action, own_obs, cache)
                 : quadrature_update(gb, own_action, own_obs, cache);
  const double total = out.mass.sum();
  if (evidence) *evidence = total / gb.total();
  if (!(total > 0.0))
    throw InconsistentObservationError("grid update: the observation has zero probability");
  out.mass /= total;
  return out;
}

Matrix particle_histogram(const ParticleSet& ps, const SimplexLattice& lattice) {
  if (ps.level != 1) throw LevelMismatchError("only level-1 particles can be binned on a grid");
  const int nf = static_cast<int>(ps.other_frames.size());
  Matrix h = Matrix::Zero(lattice.num_states() * nf, lattice.size());
  std::vector<std::pair<int, double>> proj;
  for (const auto& p : ps.particles) {
    proj.clear();
    lattice.project(p.belief(), proj);
    for (auto [v, w] : proj) h(p.state * nf + p.frame, v) += p.weight * w;
  }
  return h / h.sum();
}

namespace {

class GridPlanner {
 public:
  GridPlanner(ModelSolver& solver, const GridPlanOptions& options)
      : solver_(solver), options_(options) {}

  std::pair<Vector, double> value(const GridBelief& gb, int h) {
    ++nodes;
    const Frame& own = *gb.owner;
    const int ns = own.num_states();
    const int nf = gb.num_frames();
    Vector q = Vector::Zero(own.num_actions());

    // Other agent's policy per vertex for this step's remaining horizon.
    std::vector<ActionDistribution> pol(static_cast<std::size_t>(nf * gb.lattice.size()));
    for (int f = 0; f < nf; ++f) {
      for (int v = 0; v < gb.lattice.size(); ++v) {
        if (gb.mass.col(v).sum() <= 0.0) continue;
        pol[static_cast<std::size_t>(f * gb.lattice.size() + v)] =
            solver_.level0(gb.lattice.vertex(v), *gb.other_frames[f], h).action;
      }
    }
    for (int a = 0; a < own.num_actions(); ++a) {
      double er = 0.0;
      for (int s = 0; s < ns; ++s) {
        for (int f = 0; f < nf; ++f) {
          for (int v = 0; v < gb.lattice.size(); ++v) {
            const double m = gb.mass(s * nf + f, v);
            if (!(m > 0.0)) continue;
            const auto& p = pol[static_cast<std::size_t>(f * gb.lattice.size() + v)];
            for (int theirs = 0; theirs < p.size(); ++theirs) {
              if (p[theirs] > 0.0) er += m * p[theirs] * own.reward(s, a, theirs);
            }
          }
        }
      }
      q[a] = er / gb.total();
      if (h <= 1) continue;
      double future = 0.0;
      for (int o = 0; o < own.num_observations(); ++o) {
        double ev = 0.0;
        GridBelief child;
        try {
          child = grid_update_level1(gb, a, o, solver_, {options_.method, h}, &ev);
        } catch (const InconsistentObservationError&) {
          continue;
        }
        future += ev * value(child, h - 1).second;
      }
      q[a] += own.discount() * future;
    }
    return {q, q.maxCoeff()};
  }

  std::size_t nodes = 0;

 private:
  ModelSolver& solver_;
  const GridPlanOptions& options_;
};

}  // namespace

GridPlan grid_plan_level1(const GridBelief& gb, int horizon, ModelSolver& solver,
                          const GridPlanOptions& options) {
  if (horizon < 1) throw DegenerateInputError("planning horizon must be at least 1");
  const double branching = static_cast<double>(gb.owner->num_actions()) *
                           gb.owner->num_observations();
  double tree = 0.0;
  for (int d = 0; d < horizon; ++d) tree += std::pow(branching, d);
  if (tree > static_cast<double>(options.max_nodes)) {
    throw ResourceLimitError(fmt::format(
        "grid planning at horizon {} needs {:.0f} nodes, over the budget of {}", horizon, tree,
        options.max_nodes));
  }
  GridPlanner planner(solver, options);
  auto [q, v] = planner.value(gb, horizon);
  GridPlan out;
  out.q = q;
  out.value = v;
  out.action = uniform_over_optimal(q);
  out.nodes = planner.nodes;
  return out;
}

}  // namespace nestplan
