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

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "fixtures.h"
#include "nestplan/domain_io.h"
#include "nestplan/domains.h"
#include "nestplan/errors.h"
#include "nestplan/particles.h"
#include "nestplan/prior.h"
#include "nestplan/rng.h"

using namespace nestplan;
using nestplan::testing::TigerPair;

TEST_CASE("rng streams are reproducible and derived streams differ") {
  Rng a(42), b(42);
  for (int k = 0; k < 10; ++k) CHECK(a.next() == b.next());
  Rng d1 = Rng(42).derive({1, 2}), d2 = Rng(42).derive({1, 2}), d3 = Rng(42).derive({2, 1});
  CHECK(d1.seed() == d2.seed());
  CHECK(d1.seed() != d3.seed());
  double lo = 1.0, hi = 0.0;
  for (int k = 0; k < 1000; ++k) {
    double u = a.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
}

TEST_CASE("built-in domains validate cleanly") {
  for (const auto& name : builtin_domain_names()) {
    CAPTURE(name);
    auto d = builtin_domain(name);
    CHECK(validate_domain(*d).empty());
  }
  CHECK_THROWS_AS(builtin_domain("nope"), ConfigError);
}

TEST_CASE("validation reports the offending table and key") {
  Domain d = build_tiger();
  d.transition[d.joint(2, 2)](0, 0) = 0.7;
  auto v = validate_domain(d);
  REQUIRE(v.size() == 1);
  CHECK(v[0].table == "transition");
  CHECK(format_violation(v[0]).find("L") != std::string::npos);

  Domain e = build_mm();
  e.observation[1][0](1, 0) = -0.1;
  CHECK_FALSE(validate_domain(e).empty());
}

TEST_CASE("domain text round-trips through serialization") {
  for (const auto& name : builtin_domain_names()) {
    CAPTURE(name);
    auto d = builtin_domain(name);
    Domain back = load_domain(serialize_domain(*d));
    CHECK(back == *d);
  }
}

TEST_CASE("domain parser rejects malformed input with a line number") {
  const std::string bad = "[name]\nx\n[states]\nA B\n[bogus]\n";
  try {
    parse_domain(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  std::string broken = serialize_domain(build_tiger());
  auto pos = broken.find("L L TL 1 0");
  REQUIRE(pos != std::string::npos);
  broken.replace(pos, 10, "L L TL 0.5 0.6");
  CHECK_THROWS_AS(load_domain(broken), ValidationError);
  CHECK_NOTHROW(parse_domain(broken));
}

TEST_CASE("noise-marginalized tables average over the other agent's actions") {
  auto t = nestplan::testing::tiger("tiger-growl-only");
  const Frame& fj = *t.j;
  for (int a = 0; a < fj.num_actions(); ++a) {
    Matrix tr = Matrix::Zero(2, 2), ob = Matrix::Zero(2, fj.num_observations());
    Vector r = Vector::Zero(2);
    for (int b = 0; b < fj.num_other_actions(); ++b) {
      tr += t.domain->transition[t.domain->joint(b, a)];
      ob += t.domain->observation[1][t.domain->joint(b, a)];
      for (int s = 0; s < 2; ++s) r[s] += t.domain->reward[1](t.domain->joint(b, a), s);
    }
    const double k = fj.num_other_actions();
    CHECK((fj.noisy_transition(a) - tr / k).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((fj.noisy_observation(a) - ob / k).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((fj.noisy_reward(a) - r / k).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("normalization rescales and fails on all-zero weights") {
  auto t = nestplan::testing::tiger();
  auto ps = nestplan::testing::level1_set(t, {{0, Belief{{0.5, 0.5}}}, {1, Belief{{0.2, 0.8}}}});
  ps.particles[0].weight = 3.0;
  ps.particles[1].weight = 1.0;
  auto n = normalize_weights(ps);
  CHECK(n.particles[0].weight == doctest::Approx(0.75));
  CHECK(n.is_normalized());
  for (auto& p : ps.particles) p.weight = 0.0;
  CHECK_THROWS_AS(normalize_weights(ps), ParticleDepletionError);
}

TEST_CASE("multinomial resampling matches the weights (chi-square)") {
  Vector w(4);
  w << 0.1, 0.2, 0.3, 0.4;
  Rng rng(7);
  const std::size_t n = 20000;
  auto picks = resample_indices(w, n, rng);
  std::vector<double> counts(4, 0.0);
  for (auto k : picks) counts[k] += 1.0;
  double chi2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double e = w[k] * n;
    chi2 += (counts[k] - e) * (counts[k] - e) / e;
  }
  // 3 degrees of freedom, 0.999 quantile.
  CHECK(chi2 < 16.27);
}

TEST_CASE("systematic resampling keeps each count within one of N*w") {
  Vector w(3);
  w << 0.5, 0.3, 0.2;
  Rng rng(3);
  auto picks = resample_indices(w, 10, rng, ResampleScheme::kSystematic);
  std::vector<int> counts(3, 0);
  for (auto k : picks) ++counts[k];
  for (int k = 0; k < 3; ++k) CHECK(std::abs(counts[k] - 10 * w[k]) < 1.0 + 1e-9);
}

TEST_CASE("resampling never picks zero-weight particles and restores uniform weights") {
  auto t = nestplan::testing::tiger();
  auto ps = nestplan::testing::level1_set(
      t, {{0, Belief{{0.5, 0.5}}}, {1, Belief{{0.5, 0.5}}}, {0, Belief{{0.9, 0.1}}}});
  ps.particles[1].weight = 0.0;
  Rng rng(11);
  auto out = resample_unbiased(ps, 500, rng);
  CHECK(out.size() == 500);
  for (const auto& p : out.particles) {
    CHECK(p.state == 0);
    CHECK(p.weight == doctest::Approx(1.0 / 500));
  }
  for (auto& p : ps.particles) p.weight = 0.0;
  CHECK_THROWS_AS(resample_unbiased(ps, 5, rng), ParticleDepletionError);
}

TEST_CASE("fingerprint ignores particle order but not content") {
  auto t = nestplan::testing::tiger();
  auto a = nestplan::testing::level1_set(t, {{0, Belief{{0.5, 0.5}}}, {1, Belief{{0.3, 0.7}}}});
  auto b = nestplan::testing::level1_set(t, {{1, Belief{{0.3, 0.7}}}, {0, Belief{{0.5, 0.5}}}});
  auto c = nestplan::testing::level1_set(t, {{1, Belief{{0.3, 0.7}}}, {0, Belief{{0.6, 0.4}}}});
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.fingerprint() != c.fingerprint());
}

TEST_CASE("level structure is checked") {
  auto t = nestplan::testing::tiger();
  auto ps = nestplan::testing::level1_set(t, {{0, Belief{{0.5, 0.5}}}});
  CHECK_NOTHROW(ps.check_levels());
  ParticleSet bad = ps;
  bad.level = 2;
  CHECK_THROWS_AS(bad.check_levels(), LevelMismatchError);
  ParticleSet nested;
  nested.level = 3;
  nested.owner = t.i;
  nested.other_frames = {t.j};
  nested.particles.push_back({0, 0, std::make_shared<const ParticleSet>(ps), 1.0});
  CHECK_THROWS_AS(nested.check_levels(), LevelMismatchError);
  nested.level = 2;
  CHECK_NOTHROW(nested.check_levels());
}

TEST_CASE("built-in priors validate and match their domains") {
  auto tiger = builtin_domain("tiger");
  auto mm = builtin_domain("mm");
  for (auto name : {"tiger-uniform", "tiger-informed", "tiger-level2"})
    CHECK_NOTHROW(builtin_prior(name, *tiger));
  for (auto name : {"mm-uniform", "mm-informed", "mm-level2"}) CHECK_NOTHROW(builtin_prior(name, *mm));
  CHECK_THROWS_AS(builtin_prior("mm-uniform", *tiger), ConfigError);
  CHECK(default_prior_name("tiger-growl-only", 1) == "tiger-uniform");
  CHECK(default_prior_name("tiger", 2) == "tiger-level2");
}

TEST_CASE("prior validation catches bad densities") {
  NestedPrior p;
  p.state_marginal = Vector::Constant(2, 0.5);
  p.densities = {SimplexDensity::uniform(), SimplexDensity::piecewise({0.0, 0.5, 1.0}, {1.0, 1.5})};
  CHECK_THROWS_AS(p.validate(2), ConfigError);
  p.densities[1] = SimplexDensity::piecewise({0.0, 0.5, 1.0}, {0.5, 1.5});
  CHECK_NOTHROW(p.validate(2));
  p.state_marginal = Vector::Constant(2, 0.6);
  CHECK_THROWS_AS(p.validate(2), ConfigError);
}

TEST_CASE("uniform tiger prior samples states and beliefs evenly") {
  auto t = nestplan::testing::tiger();
  auto ps = nestplan::testing::sample_prior(t, "tiger-uniform", 20000, 5);
  CHECK(ps.level == 1);
  CHECK(ps.is_normalized());
  double tl = 0.0, mean_p = 0.0, low = 0.0;
  for (const auto& p : ps.particles) {
    tl += p.state == 0;
    mean_p += p.belief()[0];
    low += p.belief()[0] < 0.25;
  }
  CHECK(tl / 20000 == doctest::Approx(0.5).epsilon(0.03));
  CHECK(mean_p / 20000 == doctest::Approx(0.5).epsilon(0.02));
  CHECK(low / 20000 == doctest::Approx(0.25).epsilon(0.04));
}

TEST_CASE("informed tiger prior puts 90% of j's belief mass on the true side") {
  auto t = nestplan::testing::tiger();
  auto ps = nestplan::testing::sample_prior(t, "tiger-informed", 20000, 6);
  double n0 = 0, right0 = 0, n1 = 0, right1 = 0;
  for (const auto& p : ps.particles) {
    if (p.state == 0) {
      n0 += 1;
      right0 += p.belief()[0] > 0.5;
    } else {
      n1 += 1;
      right1 += p.belief()[0] < 0.5;
    }
  }
  CHECK(right0 / n0 == doctest::Approx(0.9).epsilon(0.02));
  CHECK(right1 / n1 == doctest::Approx(0.9).epsilon(0.02));
}

TEST_CASE("level-2 prior nests level-1 sets") {
  auto t = nestplan::testing::tiger();
  auto ps = nestplan::testing::sample_prior(t, "tiger-level2", 30, 9);
  CHECK(ps.level == 2);
  CHECK(ps.owner->agent() == Agent::kI);
  CHECK_NOTHROW(ps.check_levels());
  for (const auto& p : ps.particles) {
    const ParticleSet& inner = p.nested_set();
    CHECK(inner.owner->agent() == Agent::kJ);
    CHECK(inner.size() == 30);
  }
}

TEST_CASE("prior files parse, reference earlier blocks and report line numbers") {
  auto d = builtin_domain("tiger");
  const std::string text = R"(# comment
[prior skew]
level 1
marginal 0.7 0.3
density TL piecewise 0 0.5 1 | 0.4 1.6
density TR uniform

[prior mix]
level 2
marginal 0.5 0.5
component 0.25 skew
component 0.75 tiger-uniform
)";
  auto priors = parse_priors(text, *d);
  REQUIRE(priors.count("skew") == 1);
  REQUIRE(priors.count("mix") == 1);
  CHECK(priors.at("skew")->state_marginal[0] == doctest::Approx(0.7));
  CHECK(priors.at("mix")->components.size() == 2);
  CHECK(priors.at("")->name == "mix");

  try {
    parse_priors("[prior x]\nlevel 1\nmarginal 0.5 0.5\ndensity TL uniform\nwhatever 1\n", *d);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  CHECK_THROWS_AS(parse_priors("[prior x]\nlevel 1\nmarginal 0.5 0.5\ndensity TL uniform\n", *d),
                  ParseError);
}
