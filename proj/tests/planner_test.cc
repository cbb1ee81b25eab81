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

#include <doctest.h>

#include <cmath>
#include <functional>

#include "fixtures.h"
#include "nestplan/belief.h"
#include "nestplan/domains.h"
#include "nestplan/errors.h"
#include "nestplan/grid.h"
#include "nestplan/solver.h"

using namespace nestplan;
namespace nt = nestplan::testing;

namespace {

// i's expected reward per action at b(TL) = p with j's action uniform,
// straight from the payoff table: opening the tiger door costs 100, the
// other door pays 10, listening costs 1 whatever j does.
Vector tiger_h1_rewards(double p) {
  Vector q(3);
  q << -100 * p + 10 * (1 - p), 10 * p - 100 * (1 - p), -1.0;
  return q;
}

void check_same_tree(const PolicyNode& a, const PolicyNode& b) {
  CHECK(a.value == b.value);
  CHECK(a.q == b.q);
  CHECK(a.action == b.action);
  REQUIRE(a.children.size() == b.children.size());
  CHECK(a.branch_weights == b.branch_weights);
  for (std::size_t k = 0; k < a.children.size(); ++k) {
    REQUIRE(static_cast<bool>(a.children[k]) == static_cast<bool>(b.children[k]));
    if (a.children[k]) check_same_tree(*a.children[k], *b.children[k]);
  }
}

PlanResult plan(const ParticleSet& ps, int h, const PlannerOptions& opt, std::uint64_t seed,
                ModelSolver* shared = nullptr) {
  ModelSolver local(seed);
  Rng rng(seed);
  return approx_policy(ps, h, opt, shared ? *shared : local, rng);
}

}  // namespace

TEST_CASE("uniform_over_optimal splits ties within tolerance") {
  Vector q(3);
  q << 1.0, 1.0 + 1e-12, 0.5;
  auto pi = uniform_over_optimal(q);
  CHECK(pi[0] == doctest::Approx(0.5));
  CHECK(pi[1] == doctest::Approx(0.5));
  CHECK(pi[2] == 0.0);
}

TEST_CASE("level-0 tiger horizon-1 thresholds") {
  auto t = nt::tiger();
  for (int k = 0; k <= 100; ++k) {
    const double p = k / 100.0;
    CAPTURE(p);
    auto sol = solve_level0_policy(Belief{{p, 1 - p}}, *t.i, 1);
    Vector q = tiger_h1_rewards(p);
    CHECK((sol.q - q).cwiseAbs().maxCoeff() < 1e-9);
    if (k > 10 && k < 90) {
      CHECK(sol.action[2] == 1.0);
    } else if (k == 10) {
      CHECK(sol.action[0] == doctest::Approx(0.5));
      CHECK(sol.action[2] == doctest::Approx(0.5));
    } else if (k == 90) {
      CHECK(sol.action[1] == doctest::Approx(0.5));
      CHECK(sol.action[2] == doctest::Approx(0.5));
    } else {
      CHECK(sol.action[2] == 0.0);
    }
  }
}

TEST_CASE("machine maintenance horizon-1 choice from a new machine") {
  auto d = builtin_domain("mm");
  auto fi = make_frame(Agent::kI, d, 0.9, 1);
  auto sol = solve_level0_policy(Belief{{1.0, 0.0, 0.0}}, *fi, 1);
  // Average of the manufacture row in the new-machine column.
  const double m = (1.805 + 1.555 + 0.4025 - 1.0975) / 4.0;
  CHECK(sol.value == doctest::Approx(m).epsilon(1e-12));
  CHECK(sol.action[d->action_index(Agent::kI, "M")] == 1.0);
}

TEST_CASE("level-0 horizon-2 value matches a hand expansion") {
  auto t = nt::tiger();
  const double gamma = 0.9, p = 0.5;
  auto sol = solve_level0_policy(Belief{{p, 1 - p}}, *t.i, 2);
  // Opening resets the belief to one half, after which listening is best.
  const double open = tiger_h1_rewards(p)[0] + gamma * -1.0;
  double listen = -1.0;
  for (int o = 0; o < 6; ++o) {
    Vector dist = level0_observation_distribution(Belief{{p, 1 - p}}, 2, *t.i);
    Belief next = level0_update(Belief{{p, 1 - p}}, 2, o, *t.i);
    listen += gamma * dist[o] * tiger_h1_rewards(next[0]).maxCoeff();
  }
  CHECK(sol.q[0] == doctest::Approx(open).epsilon(1e-12));
  CHECK(sol.q[2] == doctest::Approx(listen).epsilon(1e-12));
  CHECK(sol.value == doctest::Approx(std::max(open, listen)).epsilon(1e-12));
}

TEST_CASE("rts configuration parsing") {
  CHECK_FALSE(RtsConfig::parse("off").enabled);
  auto fixed = RtsConfig::parse("5");
  CHECK(fixed.enabled);
  CHECK(fixed.draws_at(3) == 5);
  auto sched = RtsConfig::parse("0:8,5:6");
  CHECK(sched.draws_at(4) == 8);
  CHECK(sched.draws_at(5) == 6);
  CHECK(sched.draws_at(9) == 6);
  CHECK(RtsConfig::tiger_schedule().draws_at(5) == 6);
  CHECK_THROWS_AS(RtsConfig::parse("x:1"), ConfigError);
  CHECK_THROWS_AS(RtsConfig::parse("-2"), ConfigError);
}

TEST_CASE("sampled observation sets are sorted and renormalized") {
  Vector dist(4);
  dist << 0.1, 0.0, 0.6, 0.3;
  Rng rng(3);
  auto set = sample_observation_set(dist, 5, rng);
  double total = 0.0;
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (k > 0) CHECK(set[k - 1].first < set[k].first);
    CHECK(set[k].first != 1);
    total += set[k].second;
  }
  CHECK(total == doctest::Approx(1.0));
  auto all = sample_observation_set(dist, 100000, rng);
  REQUIRE(all.size() == 3);
  CHECK(all[1].second == doctest::Approx(0.6));
}

TEST_CASE("level-1 horizon-1 plan from the uniform prior listens") {
  auto t = nt::tiger();
  auto ps = nt::sample_prior(t, "tiger-uniform", 200, 1);
  auto r = plan(ps, 1, {}, 1);
  CHECK(r.action[2] == 1.0);
  CHECK(r.value == doctest::Approx(-1.0));
  CHECK(r.stats.nodes == 1);
}

TEST_CASE("expected reward weighs j's solved actions") {
  auto t = nt::tiger();
  // Tiger on the left; j sure of it opens right, j unsure listens.
  auto ps = nt::level1_set(t, {{0, Belief{{0.95, 0.05}}}, {0, Belief{{0.5, 0.5}}}});
  ModelSolver solver;
  auto pol = solver.policies(ps, 1);
  CHECK(pol[0][1] == 1.0);
  CHECK(pol[1][2] == 1.0);
  // i opening right pays 10 whatever j does.
  CHECK(expected_reward(ps, 1, pol) == doctest::Approx(10.0));
  // i listening costs 1 whatever j does.
  CHECK(expected_reward(ps, 2, pol) == doctest::Approx(-1.0));
  auto lik = observation_likelihood(ps, 2, pol);
  CHECK(lik.sum() == doctest::Approx(1.0));
  // Against j opening right the tiger resets and i rarely hears silence;
  // against j listening the tiger stays left.
  const double gl_s = 0.5 * (0.5 * 0.85 + 0.5 * 0.15) * 0.05 + 0.5 * 0.85 * 0.9;
  CHECK(lik[2] == doctest::Approx(gl_s));
}

TEST_CASE("full-coverage rts is node-for-node identical to no rts") {
  auto t = nt::tiger("tiger", 3);
  auto ps = nt::sample_prior(t, "tiger-uniform", 40, 2);
  PlannerOptions full;
  full.rts = RtsConfig::parse("100000");
  for (int h : {2, 3}) {
    CAPTURE(h);
    auto a = plan(ps, h, {}, 7);
    auto b = plan(ps, h, full, 7);
    CHECK(a.stats.nodes == b.stats.nodes);
    check_same_tree(*a.root, *b.root);
  }
}

TEST_CASE("rts prunes the tree") {
  auto t = nt::tiger("tiger", 3);
  auto ps = nt::sample_prior(t, "tiger-uniform", 40, 2);
  PlannerOptions rts;
  rts.rts = RtsConfig::parse("2");
  auto a = plan(ps, 3, {}, 7);
  auto b = plan(ps, 3, rts, 7);
  CHECK(b.stats.nodes < a.stats.nodes);
  CHECK(b.stats.dropped_branches == 0);  // only depleted branches count as dropped
  int missing = 0;
  for (const auto& c : b.root->children) missing += !c;
  CHECK(missing > 0);
  // Branch weights still sum to one per action.
  for (int act = 0; act < 3; ++act)
    CHECK(b.root->branch_weights.segment(6 * act, 6).sum() == doctest::Approx(1.0));
}

TEST_CASE("planning is reproducible and counts nodes") {
  auto t = nt::tiger("tiger", 2);
  auto ps = nt::sample_prior(t, "tiger-uniform", 30, 3);
  auto a = plan(ps, 2, {}, 5);
  auto b = plan(ps, 2, {}, 5);
  check_same_tree(*a.root, *b.root);
  CHECK(a.root->node_count() == a.stats.nodes);
  CHECK(a.stats.nodes == 1 + 3 * 6);
  PlannerOptions tight;
  tight.max_nodes = 5;
  CHECK_THROWS_AS(plan(ps, 2, tight, 5), ResourceLimitError);
  ParticleSet empty = ps;
  empty.particles.clear();
  CHECK_THROWS_AS(plan(empty, 2, {}, 5), DegenerateInputError);
}

TEST_CASE("shifting i's rewards shifts values and keeps the policy") {
  auto base = builtin_domain("tiger");
  auto shifted = std::make_shared<Domain>(*base);
  const double c = 7.5;
  shifted->reward[0].array() += c;
  nt::TigerPair a = nt::tiger("tiger", 2);
  nt::TigerPair b{shifted, make_frame(Agent::kI, shifted, 0.9, 2), make_frame(Agent::kJ, shifted, 0.9, 2)};
  auto pa = nt::sample_prior(a, "tiger-uniform", 50, 4);
  auto pb = nt::sample_prior(b, "tiger-uniform", 50, 4);
  auto ra = plan(pa, 2, {}, 9);
  auto rb = plan(pb, 2, {}, 9);
  CHECK(rb.value - ra.value == doctest::Approx(c * (1 + 0.9)).epsilon(1e-9));
  CHECK(ra.action == rb.action);
}

TEST_CASE("values stay within the reward range") {
  auto t = nt::tiger("tiger", 3);
  auto ps = nt::sample_prior(t, "tiger-informed", 30, 5);
  auto r = plan(ps, 3, {}, 2);
  std::function<void(const PolicyNode&)> walk = [&](const PolicyNode& n) {
    const double g = (1 - std::pow(0.9, n.horizon)) / (1 - 0.9);
    CHECK(n.value <= 10 * g + 1e-9);
    CHECK(n.value >= -100 * g - 1e-9);
    CHECK(n.action.sum() == doctest::Approx(1.0));
    for (const auto& c : n.children)
      if (c) walk(*c);
  };
  walk(*r.root);
}

TEST_CASE("model-solve count grows with particles and with nesting") {
  auto t = nt::tiger("tiger", 2);
  auto solves = [&](const std::string& prior, std::size_t n) {
    auto ps = nt::sample_prior(t, prior, n, 6);
    ModelSolver solver(1);
    Rng rng(1);
    approx_policy(ps, 2, {}, solver, rng);
    return solver.stats().model_solves();
  };
  const auto l1_small = solves("tiger-uniform", 10), l1_big = solves("tiger-uniform", 40);
  const auto l2_small = solves("tiger-level2", 10);
  CHECK(l1_small < l1_big);
  CHECK(l1_small < l2_small);
}

TEST_CASE("level-0 planning overload") {
  auto t = nt::tiger("tiger", 1);
  auto r = approx_policy(Belief{{0.95, 0.05}}, *t.i, 1);
  CHECK(r.action[1] == 1.0);
  CHECK(r.root->node_count() == 1);
}

TEST_CASE("grid planner agrees with the hand value at horizon one") {
  auto t = nt::tiger("tiger", 1);
  auto gb = grid_from_prior(*builtin_prior("tiger-uniform", *t.domain), 50, t.i,
                            FrameBook::single(t.i, t.j));
  ModelSolver solver;
  auto gp = grid_plan_level1(gb, 1, solver);
  CHECK(gp.value == doctest::Approx(-1.0));
  CHECK(gp.action[2] == 1.0);
  CHECK_THROWS_AS(grid_plan_level1(gb, 5, solver, {GridMethod::kScatter, 10}), ResourceLimitError);
}

TEST_CASE("grid planner value is stable under refinement at horizon two") {
  auto t = nt::tiger("tiger", 2);
  auto prior = builtin_prior("tiger-uniform", *t.domain);
  FrameBook fb = FrameBook::single(t.i, t.j);
  ModelSolver solver;
  auto a = grid_plan_level1(grid_from_prior(*prior, 60, t.i, fb), 2, solver);
  auto b = grid_plan_level1(grid_from_prior(*prior, 120, t.i, fb), 2, solver);
  CHECK(std::abs(a.value - b.value) <= 0.1);
}
