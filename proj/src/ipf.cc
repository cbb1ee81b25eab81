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

#include "nestplan/ipf.h"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "nestplan/belief.h"
#include "nestplan/errors.h"
#include "nestplan/solver.h"

namespace nestplan {
namespace {

struct Child {
  std::size_t parent;
  int theirs;
  int state;
  int obs;
  double likelihood;
  double weight;
};

void check_shallow_levels(const ParticleSet& ps) {
  if (ps.level < 1) throw LevelMismatchError(fmt::format("particle set level {} < 1", ps.level));
  if (!ps.owner) throw LevelMismatchError("particle set has no owner frame");
  for (const auto& p : ps.particles) {
    if (p.frame < 0 || p.frame >= static_cast<int>(ps.other_frames.size()))
      throw LevelMismatchError("particle frame index out of range");
    if (ps.level == 1 && p.nested())
      throw LevelMismatchError("level-1 particle holds a nested particle set");
    if (ps.level > 1) {
      if (!p.nested())
        throw LevelMismatchError(fmt::format("level-{} particle holds a level-0 belief", ps.level));
      if (p.nested_set().level != ps.level - 1)
        throw LevelMismatchError(fmt::format("level-{} particle holds a level-{} set", ps.level,
                                             p.nested_set().level));
    }
  }
}

class Propagator {
 public:
  Propagator(const ParticleSet& ps, int own_action, int own_obs, ModelSolver& solver, Rng& rng,
             const IpfOptions& options)
      : ps_(ps), action_(own_action), obs_(own_obs), solver_(solver), rng_(rng), opt_(options) {
    if (ps.empty()) throw DegenerateInputError("interactive particle filter needs particles");
    check_shallow_levels(ps);
    const Frame& own = *ps.owner;
    if (own_action < 0 || own_action >= own.num_actions())
      throw Error(fmt::format("action index {} out of range", own_action));
    if (own_obs < 0 || own_obs >= own.num_observations())
      throw Error(fmt::format("observation index {} out of range", own_obs));
    if (opt_.other_policies && opt_.other_policies->size() != ps.size())
      throw Error("precomputed policies do not match the particle count");
    if (!opt_.other_policies) {
      computed_ = solver.policies(ps, opt_.other_horizon.value_or(0));
      policies_ = &computed_;
    } else {
      policies_ = opt_.other_policies;
    }
  }

  // Samples the other's action and the next state per particle and lists the
  // weighted children.
  std::vector<Child> expand() {
    const Frame& own = *ps_.owner;
    std::vector<Child> out;
    out.reserve(ps_.size() * (opt_.variant == IpfVariant::kEnumerate
                                  ? static_cast<std::size_t>(own.num_other_observations())
                                  : 1));
    for (std::size_t n = 0; n < ps_.size(); ++n) {
      const InteractiveParticle& p = ps_.particles[n];
      if (!(p.weight > 0.0)) continue;
      const int theirs = static_cast<int>(rng_.categorical((*policies_)[n]));
      const int next = static_cast<int>(rng_.categorical(own.transition(action_, theirs).row(p.state)));
      const double own_lik = own.observation(action_, theirs)(next, obs_);
      const Matrix& other_obs = own.other_observation(action_, theirs);
      if (opt_.variant == IpfVariant::kSampleObservation) {
        const int o = static_cast<int>(rng_.categorical(other_obs.row(next)));
        if (own_lik > 0.0) out.push_back({n, theirs, next, o, own_lik, p.weight * own_lik});
        continue;
      }
      if (!(own_lik > 0.0)) continue;
      for (int o = 0; o < own.num_other_observations(); ++o) {
        const double lik = other_obs(next, o) * own_lik;
        if (lik > 0.0) out.push_back({n, theirs, next, o, lik, p.weight * lik});
      }
    }
    if (opt_.stats) opt_.stats->children += out.size();
    return out;
  }

  // The other agent's updated model for a child, or nullopt if the update is
  // impossible (zero-probability observation or nested depletion).
  std::optional<InteractiveParticle> materialize(const Child& c) {
    const InteractiveParticle& p = ps_.particles[c.parent];
    const Frame& theirs_frame = ps_.frame_of(p);
    InteractiveParticle child;
    child.state = c.state;
    child.frame = p.frame;
    child.weight = c.weight;
    if (ps_.level == 1) {
      try {
        child.model = level0_update(p.belief(), c.theirs, c.obs, theirs_frame);
      } catch (const InconsistentObservationError&) {
        return std::nullopt;
      }
      return child;
    }
    IpfOptions nested;
    nested.variant = opt_.variant;
    nested.scheme = opt_.scheme;
    nested.other_horizon = opt_.other_horizon;
    nested.stats = opt_.stats;
    Rng sub = rng_.derive({c.parent, static_cast<std::uint64_t>(c.obs)});
    try {
      child.model = std::make_shared<const ParticleSet>(
          ipf_step(p.nested_set(), c.theirs, c.obs, solver_, sub, nested));
    } catch (const ParticleDepletionError&) {
      if (opt_.stats) ++opt_.stats->nested_depletions;
      return std::nullopt;
    }
    return child;
  }

  ParticleSet empty_output() const {
    ParticleSet out;
    out.level = ps_.level;
    out.owner = ps_.owner;
    out.other_frames = ps_.other_frames;
    out.nominal_size = ps_.nominal_size ? ps_.nominal_size : ps_.size();
    return out;
  }

  Rng& rng() { return rng_; }
  const IpfOptions& options() const { return opt_; }

 private:
  const ParticleSet& ps_;
  int action_;
  int obs_;
  ModelSolver& solver_;
  Rng& rng_;
  const IpfOptions& opt_;
  std::vector<ActionDistribution> computed_;
  const std::vector<ActionDistribution>* policies_ = nullptr;
};

Vector weights_of(const std::vector<Child>& children) {
  Vector w(static_cast<Eigen::Index>(children.size()));
  for (std::size_t k = 0; k < children.size(); ++k) w[static_cast<Eigen::Index>(k)] = children[k].weight;
  return w;
}

[[noreturn]] void throw_depleted() {
  throw ParticleDepletionError(
      "interactive particle filter: the observation is inconsistent with every particle");
}

}  // namespace

PropagatedSet ipf_propagate(const ParticleSet& ps, int own_action, int own_obs,
                            ModelSolver& solver, Rng& rng, const IpfOptions& options) {
  Propagator prop(ps, own_action, own_obs, solver, rng, options);
  PropagatedSet out;
  out.set = prop.empty_output();
  for (const Child& c : prop.expand()) {
    auto child = prop.materialize(c);
    if (!child) continue;
    out.set.particles.push_back(std::move(*child));
    out.likelihood.push_back(c.likelihood);
    out.parent.push_back(c.parent);
    out.other_observation.push_back(c.obs);
  }
  return out;
}

ParticleSet ipf_step(const ParticleSet& ps, int own_action, int own_obs, ModelSolver& solver,
                     Rng& rng, const IpfOptions& options) {
  Propagator prop(ps, own_action, own_obs, solver, rng, options);
  ParticleSet out = prop.empty_output();
  const std::size_t n = out.nominal_size;
  const double uniform = 1.0 / static_cast<double>(n);

  std::vector<Child> children = prop.expand();
  // Only children that survive resampling have their models updated.
  Vector w = weights_of(children);
  std::map<std::size_t, InteractiveParticle> ready;
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (w.size() == 0 || !(w.sum() > 0.0)) throw_depleted();
    Rng retry = rng.derive({0x7e5a3b1dULL, attempt});
    std::vector<std::size_t> picks =
        resample_indices(w, n, attempt == 0 ? rng : retry, options.scheme);
    std::vector<std::size_t> distinct = picks;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    bool failed = false;
    for (std::size_t k : distinct) {
      if (ready.count(k)) continue;
      if (auto child = prop.materialize(children[k])) {
        ready.emplace(k, std::move(*child));
      } else {
        w[static_cast<Eigen::Index>(k)] = 0.0;
        failed = true;
      }
    }
    if (failed) continue;
    out.particles.reserve(n);
    for (std::size_t k : picks) {
      out.particles.push_back(ready.at(k));
      out.particles.back().weight = uniform;
    }
    return out;
  }
}

ParticleSet ipf_step_sampled_obs(const ParticleSet& ps, int own_action, int own_obs,
                                 ModelSolver& solver, Rng& rng, IpfOptions options) {
  options.variant = IpfVariant::kSampleObservation;
  return ipf_step(ps, own_action, own_obs, solver, rng, options);
}

}  // namespace nestplan
