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

#include "fixtures.h"
#include "nestplan/analysis.h"
#include "nestplan/belief.h"
#include "nestplan/domain_io.h"
#include "nestplan/errors.h"
#include "nestplan/grid.h"
#include "nestplan/ipf.h"
#include "nestplan/solver.h"

using namespace nestplan;
namespace nt = nestplan::testing;

namespace {

int act(const Domain& d, Agent a, const char* label) { return d.action_index(a, label); }
int obs(const Domain& d, Agent a, const char* label) { return d.observation_index(a, label); }

// Two states, one action each, i sees the state exactly.
constexpr const char* kRevealing = R"(
[name]
reveal
[states]
A B
[actions i]
wait
[actions j]
wait
[observations i]
a b
[observations j]
x
[transition]
* * A 1 0
* * B 0 1
[observation i]
* * A 1 0
* * B 0 1
[observation j]
* * * 1
[reward i]
* * * 0
[reward j]
* * * 0
)";

}  // namespace

TEST_CASE("level-0 update reproduces the worked tiger example") {
  auto t = nt::tiger();
  const Domain& d = *t.domain;
  Belief post = level0_update(Belief{{0.5, 0.5}}, act(d, Agent::kI, "L"), obs(d, Agent::kI, "GL,S"), *t.i);
  CHECK(std::abs(post[0] - 0.85) < 1e-9);
  CHECK(std::abs(post[1] - 0.15) < 1e-9);
}

TEST_CASE("level-0 update for j against a hand-expanded sum") {
  auto t = nt::tiger();
  const Domain& d = *t.domain;
  // j listens from (0.7, 0.3) and hears GR,S. i's three actions are equally
  // likely: two of them reset the tiger, listening keeps it.
  const double pred_tl = (0.7 + 0.5 + 0.5) / 3.0, pred_tr = (0.3 + 0.5 + 0.5) / 3.0;
  // Pr(GR,S | s') with i opening left, opening right or listening.
  const double o_tl = (0.15 * 0.05 + 0.15 * 0.05 + 0.15 * 0.9) / 3.0;
  const double o_tr = (0.85 * 0.05 + 0.85 * 0.05 + 0.85 * 0.9) / 3.0;
  const double expected = pred_tl * o_tl / (pred_tl * o_tl + pred_tr * o_tr);
  Belief post = level0_update(Belief{{0.7, 0.3}}, act(d, Agent::kJ, "L"), obs(d, Agent::kJ, "GR,S"), *t.j);
  CHECK(post[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(post[0] == doctest::Approx(0.1875).epsilon(1e-9));
}

TEST_CASE("level-0 observation distribution sums to one") {
  auto t = nt::tiger();
  for (int a = 0; a < 3; ++a)
    CHECK(level0_observation_distribution(Belief{{0.3, 0.7}}, a, *t.i).sum() == doctest::Approx(1.0));
}

TEST_CASE("impossible observations are reported") {
  auto d = std::make_shared<const Domain>(load_domain(kRevealing));
  auto fi = make_frame(Agent::kI, d, 0.9, 1), fj = make_frame(Agent::kJ, d, 0.9, 1);
  CHECK_THROWS_AS(level0_update(Belief{{0.0, 1.0}}, 0, 0, *fi), InconsistentObservationError);

  nt::TigerPair t{d, fi, fj};
  auto ps = nt::level1_set(t, {{1, Belief{{0.5, 0.5}}}, {1, Belief{{0.2, 0.8}}}});
  ModelSolver solver;
  Rng rng(1);
  CHECK_THROWS_AS(ipf_step(ps, 0, 0, solver, rng), ParticleDepletionError);
  auto ok = ipf_step(ps, 0, 1, solver, rng);
  CHECK(ok.size() == 2);
}

TEST_CASE("bootstrap filter converges to the exact level-0 update") {
  auto t = nt::tiger();
  StateParticles ps;
  const std::size_t n = 40000;
  Rng rng(4);
  for (std::size_t k = 0; k < n; ++k) ps.states.push_back(rng.uniform() < 0.7 ? 0 : 1);
  ps.weights = Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / n);
  const int a = 2, o = 2;  // L, GL,S
  auto out = bootstrap_filter(ps, a, o, *t.i, rng);
  Belief exact = level0_update(Belief{{0.7, 0.3}}, a, o, *t.i);
  CHECK(std::abs(out.marginal(2)[0] - exact[0]) < 0.01);
}

TEST_CASE("interactive filter weights on the growl-only example") {
  auto t = nt::tiger("tiger-growl-only");
  const Domain& d = *t.domain;
  auto ps = nt::level1_set(t, {{0, Belief{{0.5, 0.5}}}, {1, Belief{{0.5, 0.5}}}});
  ModelSolver solver;
  Rng rng(1);
  auto pr = ipf_propagate(ps, act(d, Agent::kI, "L"), obs(d, Agent::kI, "GL,S"), solver, rng);
  REQUIRE(pr.likelihood.size() == 4);
  // j listens at (0.5, 0.5); the tiger stays put. Pr(GL,S | s') for i times
  // Pr(growl | s') for j, from the raw tables.
  const double oi_tl = 0.85 * 0.9, oi_tr = 0.15 * 0.9;
  double expected[4] = {oi_tl * 0.85, oi_tl * 0.15, oi_tr * 0.15, oi_tr * 0.85};
  for (int k = 0; k < 4; ++k) {
    CAPTURE(k);
    CHECK(std::abs(pr.likelihood[static_cast<std::size_t>(k)] - expected[k]) < 1e-12);
  }
  CHECK(pr.parent == std::vector<std::size_t>{0, 0, 1, 1});
  auto marg = normalize_weights(pr.set).physical_marginal();
  CHECK(std::abs(marg[0] - 0.85) < 1e-12);
  // j's updated beliefs: growl left from (0.5, 0.5) gives 0.85.
  CHECK(pr.set.particles[0].belief()[0] == doctest::Approx(0.85));
  CHECK(pr.set.particles[1].belief()[0] == doctest::Approx(0.15));
}

TEST_CASE("ipf step returns N uniformly weighted particles, reproducibly") {
  auto t = nt::tiger();
  auto ps = nt::sample_prior(t, "tiger-uniform", 300, 2);
  ModelSolver s1, s2;
  Rng r1(9), r2(9);
  auto a = ipf_step(ps, 2, 2, s1, r1);
  auto b = ipf_step(ps, 2, 2, s2, r2);
  CHECK(a.size() == 300);
  CHECK(a.is_normalized());
  CHECK(a.fingerprint() == b.fingerprint());
  Rng r3(10);
  CHECK(ipf_step(ps, 2, 2, s1, r3).fingerprint() != a.fingerprint());
}

TEST_CASE("sampled-observation variant tracks the enumerating filter") {
  auto t = nt::tiger();
  auto ps = nt::sample_prior(t, "tiger-uniform", 20000, 3);
  ModelSolver solver;
  Rng r1(1), r2(2);
  auto a = ipf_step(ps, 2, 2, solver, r1).physical_marginal();
  auto b = ipf_step_sampled_obs(ps, 2, 2, solver, r2).physical_marginal();
  CHECK(0.5 * (a - b).cwiseAbs().sum() <= 0.03);
}

TEST_CASE("interactive filter reduces to the level-0 update when j cannot matter") {
  // Under i's listening, the physical marginal depends on j only through j's
  // action; j listens at every belief in (0.1, 0.9), so it must equal a
  // level-0 update in which j is known to listen.
  auto t = nt::tiger();
  std::vector<std::pair<int, Belief>> items;
  Rng rng(5);
  for (int k = 0; k < 4000; ++k)
    items.push_back({rng.uniform() < 0.5 ? 0 : 1, Belief{{0.5, 0.5}}});
  auto ps = nt::level1_set(t, items);
  ModelSolver solver;
  auto out = ipf_step(ps, 2, 2, solver, rng);
  const Matrix& tr = t.domain->transition[t.domain->joint(2, 2)];
  const Matrix& ob = t.domain->observation[0][t.domain->joint(2, 2)];
  Vector pred = tr.transpose() * ps.physical_marginal();
  Vector post = pred.cwiseProduct(ob.col(2));
  post /= post.sum();
  CHECK(std::abs(out.physical_marginal()[0] - post[0]) < 0.02);
}

TEST_CASE("level-2 ipf step keeps the nesting intact") {
  auto t = nt::tiger();
  auto ps = nt::sample_prior(t, "tiger-level2", 20, 4);
  ModelSolver solver;
  Rng rng(6);
  IpfStats stats;
  IpfOptions opt;
  opt.stats = &stats;
  auto out = ipf_step(ps, 2, 2, solver, rng, opt);
  CHECK(out.level == 2);
  CHECK(out.size() == 20);
  CHECK_NOTHROW(out.check_levels());
  CHECK(stats.children > 0);
}

TEST_CASE("lattice projection preserves mass and mean") {
  SimplexLattice two(2, 10);
  CHECK(two.size() == 11);
  std::vector<std::pair<int, double>> out;
  two.project(Belief{{0.37, 0.63}}, out);
  double mass = 0.0, mean = 0.0;
  for (auto [v, w] : out) {
    mass += w;
    mean += w * two.vertex(v)[0];
  }
  CHECK(mass == doctest::Approx(1.0));
  CHECK(mean == doctest::Approx(0.37));

  SimplexLattice three(3, 4);
  CHECK(three.size() == 15);
  out.clear();
  three.project(Belief{{0.2, 0.3, 0.5}}, out);
  REQUIRE(out.size() == 1);
  CHECK((three.vertex(out[0].first) - Belief{{0.25, 0.25, 0.5}}).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(SimplexLattice(36, 30), ResourceLimitError);
}

TEST_CASE("grid prior carries the prior's marginal") {
  auto t = nt::tiger();
  auto prior = builtin_prior("tiger-informed", *t.domain);
  auto gb = grid_from_prior(*prior, 100, t.i, FrameBook::single(t.i, t.j));
  CHECK(gb.total() == doctest::Approx(1.0));
  CHECK(gb.physical_marginal()[0] == doctest::Approx(0.5));
  // Mass of j beliefs above one half when the tiger is on the left.
  double above = 0.0;
  for (int v = 0; v < gb.lattice.size(); ++v)
    if (gb.lattice.vertex(v)[0] > 0.5) above += gb.mass(0, v);
  CHECK(above / gb.mass.row(0).sum() == doctest::Approx(0.9).epsilon(0.02));
}

TEST_CASE("grid scatter and quadrature forms agree") {
  auto t = nt::tiger();
  auto prior = builtin_prior("tiger-uniform", *t.domain);
  auto gb = grid_from_prior(*prior, 80, t.i, FrameBook::single(t.i, t.j));
  ModelSolver solver;
  double e1 = 0.0, e2 = 0.0;
  auto a = grid_update_level1(gb, 2, 2, solver, {GridMethod::kScatter, 0}, &e1);
  auto b = grid_update_level1(gb, 2, 2, solver, {GridMethod::kQuadrature, 0}, &e2);
  CHECK(e1 == doctest::Approx(e2).epsilon(1e-9));
  CHECK(total_variation(a.mass, b.mass) < 1e-9);
  CHECK(a.physical_marginal()[0] == doctest::Approx(0.85).epsilon(1e-6));
}

TEST_CASE("grid posterior converges under refinement") {
  auto t = nt::tiger();
  auto prior = builtin_prior("tiger-uniform", *t.domain);
  FrameBook fb = FrameBook::single(t.i, t.j);
  ModelSolver solver;
  auto coarse = grid_update_level1(grid_from_prior(*prior, 100, t.i, fb), 2, 2, solver);
  auto fine = grid_update_level1(grid_from_prior(*prior, 1000, t.i, fb), 2, 2, solver);
  // Fine-grid mass pushed onto the coarse lattice with the same projection.
  Matrix onto = Matrix::Zero(coarse.mass.rows(), coarse.mass.cols());
  std::vector<std::pair<int, double>> split;
  for (int v = 0; v < fine.lattice.size(); ++v) {
    split.clear();
    coarse.lattice.project(fine.lattice.vertex(v), split);
    for (auto [c, w] : split) onto.col(c) += w * fine.mass.col(v);
  }
  CHECK(total_variation(coarse.mass, onto) <= 0.02);
}

TEST_CASE("particle and grid posteriors agree at large N") {
  auto t = nt::tiger();
  auto prior = builtin_prior("tiger-uniform", *t.domain);
  auto gb = grid_update_level1(grid_from_prior(*prior, 50, t.i, FrameBook::single(t.i, t.j)), 2, 2,
                               *std::make_unique<ModelSolver>());
  auto ps = nt::sample_prior(t, "tiger-uniform", 20000, 8);
  ModelSolver solver;
  Rng rng(8);
  auto post = ipf_step(ps, 2, 2, solver, rng);
  Matrix hist = particle_histogram(post, gb.lattice);
  CHECK(total_variation(coarsen_columns(hist, 5), coarsen_columns(gb.mass, 5)) < 0.05);
}

TEST_CASE("grid update rejects impossible observations") {
  auto d = std::make_shared<const Domain>(load_domain(kRevealing));
  auto fi = make_frame(Agent::kI, d, 0.9, 1), fj = make_frame(Agent::kJ, d, 0.9, 1);
  NestedPrior p;
  p.state_marginal = Vector::Zero(2);
  p.state_marginal[1] = 1.0;
  p.densities.assign(2, SimplexDensity::uniform());
  auto gb = grid_from_prior(p, 10, fi, FrameBook::single(fi, fj));
  ModelSolver solver;
  CHECK_THROWS_AS(grid_update_level1(gb, 0, 0, solver), InconsistentObservationError);
}
