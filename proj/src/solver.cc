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

#include "nestplan/solver.h"

#include <algorithm>
#include <charconv>
#include <mutex>
#include <string>

#include <fmt/format.h>

#include "nestplan/errors.h"

namespace nestplan {
namespace {

constexpr std::uint64_t kRtsStream = 0x5254535354524d31ULL;
constexpr std::uint64_t kIpfStream = 0x4950465354524d31ULL;
constexpr std::uint64_t kRootStream = 0x524f4f5453545231ULL;

// Probabilities of the listed observations renormalized over the list,
// summed in ascending observation order so equal lists give equal bits.
std::vector<std::pair<int, double>> renormalized(const Vector& dist, std::vector<int> obs) {
  std::sort(obs.begin(), obs.end());
  obs.erase(std::unique(obs.begin(), obs.end()), obs.end());
  double total = 0.0;
  for (int o : obs) total += dist[o];
  std::vector<std::pair<int, double>> out;
  out.reserve(obs.size());
  for (int o : obs) out.emplace_back(o, dist[o] / total);
  return out;
}

int parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(fmt::format("bad integer '{}' in RTS setting", s));
  return v;
}

class Planner {
 public:
  Planner(const PlannerOptions& options, ModelSolver& solver) : opt_(options), solver_(solver) {}

  std::unique_ptr<PolicyNode> expand(const ParticleSetPtr& ps, int h, int depth, const Rng& rng) {
    if (opt_.max_nodes && stats.nodes >= opt_.max_nodes)
      throw ResourceLimitError(fmt::format("policy tree exceeds the {}-node budget", opt_.max_nodes));
    ++stats.nodes;
    const Frame& own = *ps->owner;
    const int num_actions = own.num_actions();
    const int num_obs = own.num_observations();

    auto node = std::make_unique<PolicyNode>();
    node->horizon = h;
    if (opt_.retain_beliefs) node->belief = ps;
    const std::vector<ActionDistribution> pol = solver_.policies(*ps, h);
    node->q.resize(num_actions);
    for (int a = 0; a < num_actions; ++a) node->q[a] = expected_reward(*ps, a, pol);

    if (h > 1) {
      node->children.resize(static_cast<std::size_t>(num_actions * num_obs));
      node->branch_weights = Vector::Zero(num_actions * num_obs);
      IpfStats ipf_stats;
      IpfOptions ipf;
      ipf.variant = opt_.variant;
      ipf.scheme = opt_.scheme;
      ipf.other_horizon = h;
      ipf.other_policies = &pol;
      ipf.stats = &ipf_stats;
      for (int a = 0; a < num_actions; ++a) {
        const Vector lik = observation_likelihood(*ps, a, pol);
        std::vector<std::pair<int, double>> branches;
        if (opt_.rts.enabled) {
          Rng draw = rng.derive({kRtsStream, static_cast<std::uint64_t>(a)});
          branches = sample_observation_set(lik, opt_.rts.draws_at(depth), draw);
        } else {
          std::vector<int> support;
          for (int o = 0; o < num_obs; ++o) {
            if (lik[o] > 0.0) support.push_back(o);
          }
          branches = renormalized(lik, support);
        }

        std::vector<int> kept;
        std::vector<ParticleSetPtr> beliefs;
        for (const auto& [o, w] : branches) {
          Rng step = rng.derive({static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(o),
                                 kIpfStream});
          try {
            beliefs.push_back(
                std::make_shared<const ParticleSet>(ipf_step(*ps, a, o, solver_, step, ipf)));
            kept.push_back(o);
          } catch (const ParticleDepletionError&) {
            ++stats.dropped_branches;
          }
        }
        if (kept.size() != branches.size()) branches = renormalized(lik, kept);

        double future = 0.0;
        for (std::size_t k = 0; k < branches.size(); ++k) {
          const auto [o, w] = branches[k];
          const auto slot = static_cast<std::size_t>(num_obs * a + o);
          Rng child_rng = rng.derive({static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(o)});
          node->children[slot] = expand(beliefs[k], h - 1, depth + 1, child_rng);
          node->branch_weights[static_cast<Eigen::Index>(slot)] = w;
          future += w * node->children[slot]->value;
        }
        node->q[a] += own.discount() * future;
      }
      stats.nested_depletions += ipf_stats.nested_depletions;
    }
    node->value = node->q.maxCoeff();
    node->action = uniform_over_optimal(node->q);
    return node;
  }

  PlanStats stats;

 private:
  const PlannerOptions& opt_;
  ModelSolver& solver_;
};

}  // namespace

ActionDistribution uniform_over_optimal(const Vector& q) {
  const double best = q.maxCoeff();
  ActionDistribution d = (q.array() >= best - kArgmaxTolerance).cast<double>().matrix();
  return d / d.sum();
}

std::size_t ModelSolver::KeyHash::operator()(const Key& k) const {
  std::uint64_t h = mix64(reinterpret_cast<std::uintptr_t>(k.frame));
  h = mix64(h ^ static_cast<std::uint64_t>(k.level));
  h = mix64(h ^ static_cast<std::uint64_t>(k.horizon));
  return static_cast<std::size_t>(mix64(h ^ k.hash));
}

const Level0Solution& ModelSolver::level0(const Belief& b, const Frame& frame, int horizon) {
  if (horizon < 1) throw DegenerateInputError("level-0 horizon must be at least 1");
  const Key key{&frame, 0, horizon, belief_fingerprint(b)};
  {
    std::shared_lock lock(mutex_);
    if (auto it = level0_.find(key); it != level0_.end()) return *it->second;
  }
  auto sol = std::make_unique<Level0Solution>();
  const int num_actions = frame.num_actions();
  sol->q.resize(num_actions);
  for (int a = 0; a < num_actions; ++a) {
    double v = b.dot(frame.noisy_reward(a));
    if (horizon > 1) {
      const Vector pred = frame.noisy_transition(a).transpose() * b;
      const Matrix& obs = frame.noisy_observation(a);
      double future = 0.0;
      for (int o = 0; o < frame.num_observations(); ++o) {
        const Vector post = pred.cwiseProduct(obs.col(o));
        const double p = post.sum();
        if (!(p > 0.0)) continue;
        future += p * level0(post / p, frame, horizon - 1).value;
      }
      v += frame.discount() * future;
    }
    sol->q[a] = v;
  }
  sol->value = sol->q.maxCoeff();
  sol->action = uniform_over_optimal(sol->q);
  level0_solves_.fetch_add(1, std::memory_order_relaxed);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = level0_.try_emplace(key, std::move(sol));
  return *it->second;
}

ActionDistribution ModelSolver::policy(const InteractiveParticle& p, const Frame& frame,
                                       int horizon) {
  requests_.fetch_add(1, std::memory_order_relaxed);
  if (!p.nested()) return level0(p.belief(), frame, horizon).action;
  const ParticleSet& inner = p.nested_set();
  const Key key{inner.owner.get(), inner.level, horizon, inner.fingerprint()};
  {
    std::shared_lock lock(mutex_);
    if (auto it = nested_.find(key); it != nested_.end()) return it->second;
  }
  Rng rng = Rng(seed_).derive({key.hash, static_cast<std::uint64_t>(horizon),
                               static_cast<std::uint64_t>(inner.level)});
  PlanResult plan = approx_policy(inner, horizon, PlannerOptions{}, *this, rng);
  nested_solves_.fetch_add(1, std::memory_order_relaxed);
  std::unique_lock lock(mutex_);
  auto [it, inserted] = nested_.try_emplace(key, std::move(plan.action));
  return it->second;
}

std::vector<ActionDistribution> ModelSolver::policies(const ParticleSet& ps, int horizon) {
  std::vector<ActionDistribution> out;
  out.reserve(ps.size());
  std::unordered_map<const ParticleSet*, std::size_t> seen;
  for (const auto& p : ps.particles) {
    const Frame& f = ps.frame_of(p);
    const int h = horizon > 0 ? horizon : f.horizon();
    if (p.nested()) {
      // Resampled copies share one nested set; solve it once.
      auto [it, fresh] = seen.try_emplace(&p.nested_set(), out.size());
      if (!fresh) {
        requests_.fetch_add(1, std::memory_order_relaxed);
        out.push_back(out[it->second]);
        continue;
      }
    }
    out.push_back(policy(p, f, h));
  }
  return out;
}

SolverStats ModelSolver::stats() const {
  return {requests_.load(), level0_solves_.load(), nested_solves_.load()};
}

void ModelSolver::reset_stats() {
  requests_ = 0;
  level0_solves_ = 0;
  nested_solves_ = 0;
}

void ModelSolver::clear() {
  std::unique_lock lock(mutex_);
  level0_.clear();
  nested_.clear();
}

Level0Solution solve_level0_policy(const Belief& b, const Frame& frame, int horizon) {
  ModelSolver solver;
  return solver.level0(b, frame, horizon);
}

int RtsConfig::draws_at(int depth) const {
  auto it = schedule.upper_bound(depth);
  if (it == schedule.begin()) return draws;
  return std::prev(it)->second;
}

RtsConfig RtsConfig::tiger_schedule() {
  RtsConfig c;
  c.enabled = true;
  c.draws = 8;
  c.schedule = {{0, 8}, {5, 6}};
  return c;
}

RtsConfig RtsConfig::parse(std::string_view text) {
  RtsConfig c;
  if (text.empty() || text == "off") return c;
  c.enabled = true;
  if (text == "tiger") return tiger_schedule();
  if (text.find(':') == std::string_view::npos) {
    c.draws = parse_int(text);
    if (c.draws < 1) throw ConfigError("RTS draw count must be at least 1");
    return c;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(pos, end - pos);
    std::size_t colon = item.find(':');
    if (colon == std::string_view::npos)
      throw ConfigError(fmt::format("RTS schedule entry '{}' is not <depth>:<draws>", item));
    const int depth = parse_int(item.substr(0, colon));
    const int draws = parse_int(item.substr(colon + 1));
    if (depth < 0 || draws < 1) throw ConfigError("RTS schedule needs depth >= 0 and draws >= 1");
    c.schedule[depth] = draws;
    pos = end + 1;
  }
  c.draws = c.schedule.begin()->second;
  return c;
}

std::vector<std::pair<int, double>> sample_observation_set(const Vector& dist, int n, Rng& rng) {
  if (n < 1) throw DegenerateInputError("observation sampling needs at least one draw");
  std::vector<int> drawn;
  drawn.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) drawn.push_back(static_cast<int>(rng.categorical(dist)));
  return renormalized(dist, std::move(drawn));
}

Vector observation_likelihood(const ParticleSet& ps, int own_action,
                              const std::vector<ActionDistribution>& policies) {
  const Frame& own = *ps.owner;
  Vector out = Vector::Zero(own.num_observations());
  double total = 0.0;
  for (std::size_t n = 0; n < ps.size(); ++n) {
    const auto& p = ps.particles[n];
    if (!(p.weight > 0.0)) continue;
    total += p.weight;
    const ActionDistribution& pol = policies[n];
    for (int theirs = 0; theirs < pol.size(); ++theirs) {
      if (!(pol[theirs] > 0.0)) continue;
      out.noalias() += (p.weight * pol[theirs]) *
                       (own.transition(own_action, theirs).row(p.state) *
                        own.observation(own_action, theirs))
                           .transpose();
    }
  }
  return out / total;
}

Vector observation_likelihood(const ParticleSet& ps, int own_action, ModelSolver& solver,
                              int horizon) {
  return observation_likelihood(ps, own_action, solver.policies(ps, horizon));
}

double expected_reward(const ParticleSet& ps, int own_action,
                       const std::vector<ActionDistribution>& policies) {
  const Frame& own = *ps.owner;
  double sum = 0.0;
  double total = 0.0;
  for (std::size_t n = 0; n < ps.size(); ++n) {
    const auto& p = ps.particles[n];
    total += p.weight;
    double er = 0.0;
    const ActionDistribution& pol = policies[n];
    for (int theirs = 0; theirs < pol.size(); ++theirs) {
      if (pol[theirs] > 0.0) er += pol[theirs] * own.reward(p.state, own_action, theirs);
    }
    sum += p.weight * er;
  }
  return sum / total;
}

std::size_t PolicyNode::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children) {
    if (c) n += c->node_count();
  }
  return n;
}

PlanResult approx_policy(const ParticleSet& ps, int horizon, const PlannerOptions& options,
                         ModelSolver& solver, Rng& rng) {
  if (ps.empty()) throw DegenerateInputError("cannot plan on an empty particle set");
  if (horizon < 1) throw DegenerateInputError("planning horizon must be at least 1");
  if (!(ps.total_weight() > 0.0)) throw DegenerateInputError("particle weights are all zero");
  Planner planner(options, solver);
  auto root = planner.expand(std::make_shared<const ParticleSet>(ps), horizon, 0,
                             rng.derive({kRootStream}));
  PlanResult out;
  out.action = root->action;
  out.value = root->value;
  out.root = std::move(root);
  out.stats = planner.stats;
  return out;
}

PlanResult approx_policy(const Belief& b, const Frame& frame, int horizon) {
  Level0Solution sol = solve_level0_policy(b, frame, horizon);
  PlanResult out;
  out.root = std::make_unique<PolicyNode>();
  out.root->action = sol.action;
  out.root->value = sol.value;
  out.root->q = sol.q;
  out.root->horizon = horizon;
  out.action = sol.action;
  out.value = sol.value;
  out.stats.nodes = 1;
  return out;
}

}  // namespace nestplan
