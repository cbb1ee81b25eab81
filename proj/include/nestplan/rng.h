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

#ifndef NESTPLAN_RNG_H_
#define NESTPLAN_RNG_H_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

#include <Eigen/Core>

namespace nestplan {

// SplitMix64 finalizer; used both to seed engines and to derive substreams.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// A 64-bit seedable random stream.
//
// Substreams are derived from the stream's *seed*, never from its current
// engine state, so derive(k...) gives the same child no matter how many
// draws the parent has made. Draw helpers avoid the std:: distributions,
// whose output is implementation-defined, to keep runs bit-reproducible
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  Rng derive(std::initializer_list<std::uint64_t> keys) const {
    std::uint64_t h = mix64(seed_ ^ 0x5851f42d4c957f2dULL);
    for (std::uint64_t k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    return Rng(h);
  }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

  // Standard exponential variate, for Dirichlet sampling.
  double exponential() { return -std::log1p(-uniform()); }

  // Index drawn proportionally to nonnegative weights (need not sum to 1).
  template <typename Derived>
  std::size_t categorical(const Eigen::DenseBase<Derived>& weights) {
    double total = weights.sum();
    double u = uniform() * total;
    double acc = 0.0;
    Eigen::Index last = 0;
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
      if (weights[k] <= 0.0) continue;
      last = k;
      acc += weights[k];
      if (u < acc) return static_cast<std::size_t>(k);
    }
    return static_cast<std::size_t>(last);
  }

  std::size_t categorical(std::span<const double> weights) {
    return categorical(Eigen::Map<const Eigen::VectorXd>(
        weights.data(), static_cast<Eigen::Index>(weights.size())));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace nestplan

#endif  // NESTPLAN_RNG_H_
