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

#ifndef NESTPLAN_HARNESS_H_
#define NESTPLAN_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nestplan/domain.h"
#include "nestplan/domains.h"
#include "nestplan/ipf.h"
#include "nestplan/prior.h"
#include "nestplan/solver.h"

namespace nestplan {

// One scripted filtering step: own action and own observation labels.
struct ScriptStep {
  std::string action;
  std::string observation;
};

struct ExperimentConfig {
  std::string domain = "tiger";  // built-in name or domain file
  int level = 1;
  std::string prior;             // built-in name or prior file; domain default if empty
  std::vector<std::size_t> particles{100};
  int grid = 0;                  // grid resolution; 0 picks a default, -1 disables
  int horizon = 1;               // planning horizon, or the frames' horizon when filtering
  double gamma = 0.9;
  RtsConfig rts;
  std::vector<int> rts_draws;    // profile: draw counts to sweep, 0 = RTS off
  int trials = 10;
  int runs = 100;
  int repetitions = 5;
  std::uint64_t master_seed = 1;
  std::vector<ScriptStep> script;  // default per domain when empty
  int steps = 0;                   // 0 = the script's length; longer scripts cycle
  IpfVariant variant = IpfVariant::kEnumerate;
  std::size_t node_budget = 0;     // planner node budget; 0 = unlimited
  UavConfig uav;

  // Throws ConfigError on any violated invariant.
  void validate() const;
};

// Domain, frames and prior shared by every driver.
struct Setup {
  std::shared_ptr<const Domain> domain;
  FramePtr i_frame;
  FramePtr j_frame;
  FrameBook frames;
  PriorPtr prior;
  int level = 1;

  const Frame& i() const { return *i_frame; }
  int grid_resolution(int requested) const;  // 0 when no grid baseline exists
};

Setup make_setup(const ExperimentConfig& cfg);

// Resolves a built-in domain name (with UAV settings) or a domain file.
std::shared_ptr<const Domain> resolve_domain(const std::string& name_or_path,
                                             const UavConfig& uav = {});

std::vector<ScriptStep> default_script(const std::string& domain_name);

// A state every joint action maps to itself with zero reward for both agents.
bool is_absorbing(const Domain& d, int state);

struct EpisodeRecord {
  std::uint64_t seed = 0;
  std::vector<int> states;  // s_0 ... s_T
  std::vector<int> i_actions;
  std::vector<int> j_actions;
  std::vector<int> i_observations;
  std::vector<int> j_observations;
  std::vector<double> rewards;  // undiscounted, per step
  double discounted_return = 0.0;
  std::size_t replans = 0;      // steps that fell outside a partial tree
  std::size_t random_fallbacks = 0;

  bool operator==(const EpisodeRecord&) const = default;
};

// i's policy source for simulate_episode.
struct EpisodePolicy {
  const PolicyNode* root = nullptr;  // null: act uniformly at random
  PlannerOptions replan;             // used when a branch is missing
};

// Samples the true state and j's model from i's prior, then plays `horizon`
// steps: i follows its tree (replanning from its tracked belief when an
// observation is missing from a partial tree), j follows its own solved
// model and updates its beliefs. Stops early on absorbing states.
EpisodeRecord simulate_episode(const Setup& setup, const EpisodePolicy& policy, int horizon,
                               ModelSolver& solver, Rng& rng);

struct FilterRow {
  int step = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double kl = 0.0;          // D(filtered || baseline)
  double kl_reverse = 0.0;  // D(baseline || filtered)
  double tv = 0.0;
  Vector marginal;
  bool depleted = false;
  double wall_ms = 0.0;
};

struct FilterSummaryRow {
  std::size_t n = 0;
  int step = 0;
  double mean_kl = 0.0;
  double std_kl = 0.0;
  double mean_tv = 0.0;
  double std_tv = 0.0;
  int runs = 0;
  int depletions = 0;
};

struct FilterReport {
  std::string baseline;  // "grid:<G>" or "ipf:<N>"
  std::vector<std::string> states;
  std::vector<FilterRow> rows;
  std::vector<FilterSummaryRow> summary;

  const FilterSummaryRow& at(std::size_t n, int step) const;
};

// Filtering convergence: for every particle count and trial, runs the
// scripted steps and compares each posterior to the grid baseline (level 1
// with a grid) or to the highest-N run of the same trial (otherwise).
FilterReport run_filter_experiment(const ExperimentConfig& cfg);

struct ProfileRow {
  std::size_t n = 0;
  int rts_draws = 0;  // 0 = RTS off, -1 = the configured schedule
  int trials = 0;
  int runs = 0;
  double mean_reward = 0.0;
  double std_reward = 0.0;
  double stderr_reward = 0.0;
  double random_mean = 0.0;
  double random_std = 0.0;
  double plan_ms_mean = 0.0;
  double plan_ms_std = 0.0;
  std::uint64_t model_solves = 0;
  std::size_t nodes = 0;
  std::size_t replans = 0;
};

struct ProfileReport {
  std::vector<ProfileRow> rows;
  const ProfileRow& at(std::size_t n, int rts_draws = 0) const;
};

// Performance profile: for every (particle count, RTS draw count), builds
// `trials` policies and evaluates each over `runs` episodes, alongside a
// uniform-random policy on the same episode seeds.
ProfileReport run_profile_experiment(const ExperimentConfig& cfg);

struct BenchRow {
  std::string section;  // "filter" or "plan"
  std::string method;
  std::size_t size = 0;  // particles (= grid resolution for filter rows)
  int horizon = 1;
  int repetitions = 0;
  bool limited = false;  // resource guard tripped
  double mean_ms = 0.0;
  double std_ms = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  const BenchRow& at(const std::string& section, const std::string& method, std::size_t size,
                     int horizon) const;
};

// Wall-clock comparison of the particle filter against both grid update
// forms at N = G, and of the planner with and without RTS. Each measurement
// discards one warm-up run.
// Planner rows run for every (horizon, plan particle count) pair.
BenchReport run_runtime_benchmark(const ExperimentConfig& cfg, const std::vector<int>& horizons,
                                  const std::vector<std::size_t>& plan_particles);

// CSV output. The first line is "# nestplan <version> <subcommand>
// <hardware> <master-seed>".
std::string hardware_string();
std::string csv_preamble(const std::string& subcommand, std::uint64_t master_seed);
// `both_kl` appends a kl_from_grid column with the reverse orientation.
void write_filter_csv(std::ostream& out, const FilterReport& r, std::uint64_t master_seed,
                      bool both_kl = false);
void write_filter_summary_csv(std::ostream& out, const FilterReport& r, std::uint64_t master_seed);
void write_profile_csv(std::ostream& out, const ProfileReport& r, std::uint64_t master_seed);
void write_bench_csv(std::ostream& out, const BenchReport& r, std::uint64_t master_seed);
void write_episode_csv(std::ostream& out, const Setup& setup,
                       const std::vector<EpisodeRecord>& episodes, std::uint64_t master_seed);

// Gnuplot script that plots a CSV written by the matching writer.
std::string plot_script(const std::string& subcommand, const std::string& csv_path);

}  // namespace nestplan

#endif  // NESTPLAN_HARNESS_H_
