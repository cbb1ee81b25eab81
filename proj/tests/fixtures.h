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

#ifndef NESTPLAN_TESTS_FIXTURES_H_
#define NESTPLAN_TESTS_FIXTURES_H_

#include <cmath>
#include <memory>
#include <vector>

#include "nestplan/domains.h"
#include "nestplan/particles.h"
#include "nestplan/prior.h"

namespace nestplan::testing {

struct TigerPair {
  std::shared_ptr<const Domain> domain;
  FramePtr i;
  FramePtr j;
};

inline TigerPair tiger(const std::string& name = "tiger", int horizon = 1, double gamma = 0.9) {
  auto d = builtin_domain(name);
  return {d, make_frame(Agent::kI, d, gamma, horizon), make_frame(Agent::kJ, d, gamma, horizon)};
}

// A level-1 set with one particle per (state, j belief) pair, equal weights.
inline ParticleSet level1_set(const TigerPair& t, const std::vector<std::pair<int, Belief>>& items) {
  ParticleSet ps;
  ps.level = 1;
  ps.owner = t.i;
  ps.other_frames = {t.j};
  ps.nominal_size = items.size();
  for (const auto& [s, b] : items)
    ps.particles.push_back({s, 0, b, 1.0 / static_cast<double>(items.size())});
  return ps;
}

inline ParticleSet sample_prior(const TigerPair& t, const std::string& prior, std::size_t n,
                                std::uint64_t seed) {
  Rng rng(seed);
  return sample_initial_particles(*builtin_prior(prior, *t.domain), n, t.i,
                                  FrameBook::single(t.i, t.j), rng);
}

}  // namespace nestplan::testing

#endif  // NESTPLAN_TESTS_FIXTURES_H_
