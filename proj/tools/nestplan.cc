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

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "nestplan/analysis.h"
#include "nestplan/domain_io.h"
#include "nestplan/domains.h"
#include "nestplan/errors.h"
#include "nestplan/grid.h"
#include "nestplan/harness.h"
#include "nestplan/prior.h"
#include "nestplan/solver.h"

namespace {

using namespace nestplan;
using Clock = std::chrono::steady_clock;
using json = nlohmann::ordered_json;

// Flags shared by the experiment subcommands.
struct Options {
  std::string domain = "tiger";
  int level = 1;
  std::string prior;
  std::vector<std::size_t> particles{100};
  int grid = 0;
  std::string baseline;
  int horizon = 1;
  double gamma = 0.9;
  std::string rts = "off";
  std::vector<int> rts_draws;
  int trials = 10;
  int runs = 100;
  int repetitions = 5;
  std::uint64_t seed = 1;
  std::vector<std::string> actions;
  std::vector<std::string> observations;
  int steps = 0;
  std::string variant = "enum";
  std::size_t node_budget = 0;
  UavConfig uav;
  std::string out;
};

void add_model_flags(CLI::App* app, Options& o) {
  app->add_option("--domain", o.domain, "built-in domain name or domain file")->capture_default_str();
  app->add_option("--level", o.level, "nesting level of i's beliefs")->capture_default_str();
  app->add_option("--prior", o.prior, "built-in prior name or prior file (domain default if empty)");
  app->add_option("--gamma", o.gamma, "discount factor")->capture_default_str();
  app->add_option("--seed", o.seed, "master seed")->capture_default_str();
  app->add_option("--uav-accuracy", o.uav.obs_accuracy, "uav: probability of the true row")
      ->capture_default_str();
  app->add_option("--uav-alert", o.uav.target_alert, "uav: probability a target move executes")
      ->capture_default_str();
  app->add_option("--uav-spot", o.uav.spot_reward, "uav: reward for spotting the target")
      ->capture_default_str();
  app->add_option("--uav-step", o.uav.step_reward, "uav: reward per step")->capture_default_str();
}

void add_particle_flags(CLI::App* app, Options& o) {
  app->add_option("--particles", o.particles, "particle counts")->capture_default_str();
  app->add_option("--variant", o.variant, "propagation: enum or sample")
      ->check(CLI::IsMember({"enum", "sample"}))
      ->capture_default_str();
}

void add_planning_flags(CLI::App* app, Options& o) {
  app->add_option("--horizon", o.horizon, "planning horizon")->capture_default_str();
  app->add_option("--rts", o.rts, "observation sampling: off, tiger, N or depth:N,...")
      ->capture_default_str();
  app->add_option("--node-budget", o.node_budget, "planner node limit (0 = none)");
}

ExperimentConfig to_config(const Options& o) {
  ExperimentConfig cfg;
  cfg.domain = o.domain;
  cfg.level = o.level;
  cfg.prior = o.prior;
  cfg.particles = o.particles;
  cfg.grid = o.grid;
  if (!o.baseline.empty()) {
    if (o.baseline == "none" || o.baseline == "ipf") {
      cfg.grid = -1;
    } else if (o.baseline.rfind("grid:", 0) == 0) {
      try {
        cfg.grid = std::stoi(o.baseline.substr(5));
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("bad baseline '{}'", o.baseline));
      }
    } else {
      throw ConfigError(fmt::format("baseline must be grid:<G> or none, not '{}'", o.baseline));
    }
  }
  cfg.horizon = o.horizon;
  cfg.gamma = o.gamma;
  cfg.rts = o.rts == "tiger" ? RtsConfig::tiger_schedule() : RtsConfig::parse(o.rts);
  cfg.rts_draws = o.rts_draws;
  cfg.trials = o.trials;
  cfg.runs = o.runs;
  cfg.repetitions = o.repetitions;
  cfg.master_seed = o.seed;
  if (o.actions.size() != o.observations.size())
    throw ConfigError("--action and --obs must be given the same number of times");
  for (std::size_t k = 0; k < o.actions.size(); ++k) cfg.script.push_back({o.actions[k], o.observations[k]});
  cfg.steps = o.steps;
  cfg.variant = o.variant == "sample" ? IpfVariant::kSampleObservation : IpfVariant::kEnumerate;
  cfg.node_budget = o.node_budget;
  cfg.uav = o.uav;
  cfg.validate();
  return cfg;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
  return path.substr(0, dot) + suffix;
}

template <typename Writer>
void write_file(const std::string& path, Writer&& write) {
  std::ofstream f(path);
  if (!f) throw Error(fmt::format("cannot write '{}'", path));
  write(f);
  if (!f) throw Error(fmt::format("error writing '{}'", path));
}

void write_plot(const std::string& subcommand, const std::string& csv) {
  const std::string gp = with_suffix(csv, ".gp");
  write_file(gp, [&](std::ostream& f) { f << plot_script(subcommand, csv); });
  fmt::print("wrote {} and {}\n", csv, gp);
}

std::string distribution_text(const Vector& pi, const std::vector<std::string>& labels) {
  std::vector<std::string> parts;
  for (Eigen::Index a = 0; a < pi.size(); ++a)
    if (pi[a] > 0.0) parts.push_back(fmt::format("{}:{:.3g}", labels[static_cast<std::size_t>(a)], pi[a]));
  return fmt::format("{{{}}}", fmt::join(parts, " "));
}

void print_tree(const PolicyNode& n, const Domain& d, int depth, int max_depth, const std::string& indent) {
  const auto& acts = d.actions[0];
  const auto& obs = d.observations[0];
  fmt::print("value {:.6g} act {}\n", n.value, distribution_text(n.action, acts));
  if (depth >= max_depth || n.children.empty()) return;
  const int no = static_cast<int>(obs.size());
  for (int a = 0; a < static_cast<int>(acts.size()); ++a) {
    for (int o = 0; o < no; ++o) {
      const PolicyNode* c = n.child(a, o, no);
      if (!c) continue;
      fmt::print("{}{} / {} (w {:.4g}): ", indent, acts[static_cast<std::size_t>(a)],
                 obs[static_cast<std::size_t>(o)], n.branch_weights[no * a + o]);
      print_tree(*c, d, depth + 1, max_depth, indent + "  ");
    }
  }
}

json tree_json(const PolicyNode& n, const Domain& d) {
  const auto& acts = d.actions[0];
  const auto& obs = d.observations[0];
  json j;
  j["horizon"] = n.horizon;
  j["value"] = n.value;
  json pi = json::object(), q = json::object();
  for (std::size_t a = 0; a < acts.size(); ++a) {
    pi[acts[a]] = n.action[static_cast<Eigen::Index>(a)];
    if (n.q.size() > 0) q[acts[a]] = n.q[static_cast<Eigen::Index>(a)];
  }
  j["action"] = pi;
  j["q"] = q;
  json children = json::array();
  const int no = static_cast<int>(obs.size());
  for (int a = 0; a < static_cast<int>(acts.size()); ++a) {
    for (int o = 0; o < no; ++o) {
      const PolicyNode* c = n.child(a, o, no);
      if (!c) continue;
      children.push_back({{"action", acts[static_cast<std::size_t>(a)]},
                          {"observation", obs[static_cast<std::size_t>(o)]},
                          {"weight", n.branch_weights[no * a + o]},
                          {"node", tree_json(*c, d)}});
    }
  }
  j["children"] = children;
  return j;
}

PlannerOptions planner_options(const ExperimentConfig& cfg) {
  PlannerOptions opt;
  opt.rts = cfg.rts;
  opt.variant = cfg.variant;
  opt.max_nodes = cfg.node_budget;
  return opt;
}

struct Planned {
  Setup setup;
  PlanResult result;
  double ms = 0.0;
};

Planned build_plan(const ExperimentConfig& cfg, ModelSolver& solver, bool retain) {
  Planned p{make_setup(cfg), {}, 0.0};
  Rng init = Rng(cfg.master_seed).derive({cfg.particles.front(), 0});
  auto ps = sample_initial_particles(*p.setup.prior, cfg.particles.front(), p.setup.i_frame,
                                     p.setup.frames, init);
  PlannerOptions opt = planner_options(cfg);
  opt.retain_beliefs = retain;
  Rng rng = Rng(cfg.master_seed).derive({cfg.particles.front(), 1});
  const auto t0 = Clock::now();
  p.result = approx_policy(ps, cfg.horizon, opt, solver, rng);
  p.ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return p;
}

int run_domain_list() {
  for (const auto& n : builtin_domain_names()) fmt::print("{}\n", n);
  return 0;
}

int run_domain_export(const std::string& name, const Options& o, const std::string& out) {
  const std::string text = serialize_domain(*resolve_domain(name, o.uav));
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, [&](std::ostream& f) { f << text; });
  }
  return 0;
}

int run_domain_validate(const std::string& file) {
  Domain d;
  const auto& names = builtin_domain_names();
  if (std::find(names.begin(), names.end(), file) != names.end()) {
    d = *builtin_domain(file);
  } else {
    std::ifstream in(file);
    if (!in) throw Error(fmt::format("cannot open domain file '{}'", file));
    std::stringstream buf;
    buf << in.rdbuf();
    d = parse_domain(buf.str());
  }
  const auto violations = validate_domain(d);
  fmt::print("domain {}: {} states, {}/{} actions, {}/{} observations\n", d.name, d.num_states(),
             d.num_actions(Agent::kI), d.num_actions(Agent::kJ), d.num_observations(Agent::kI),
             d.num_observations(Agent::kJ));
  for (const auto& v : violations) fmt::print("  {}\n", format_violation(v));
  fmt::print("{}\n", violations.empty() ? "valid" : fmt::format("{} violation(s)", violations.size()));
  return violations.empty() ? 0 : 1;
}

int run_filter(const Options& o, const std::string& kl) {
  ExperimentConfig cfg = to_config(o);
  auto r = run_filter_experiment(cfg);
  const std::string out = o.out.empty() ? "filter.csv" : o.out;
  write_file(out, [&](std::ostream& f) { write_filter_csv(f, r, cfg.master_seed, kl == "both"); });
  const std::string summary = with_suffix(out, "_summary.csv");
  write_file(summary, [&](std::ostream& f) { write_filter_summary_csv(f, r, cfg.master_seed); });
  fmt::print("baseline {}\n{:>8} {:>5} {:>12} {:>12} {:>12} {:>5}\n", r.baseline, "N", "step", "mean_kl",
             "std_kl", "mean_tv", "depl");
  for (const auto& s : r.summary)
    fmt::print("{:>8} {:>5} {:>12.6g} {:>12.6g} {:>12.6g} {:>5}\n", s.n, s.step, s.mean_kl, s.std_kl,
               s.mean_tv, s.depletions);
  fmt::print("wrote {}\n", out);
  write_plot("filter", summary);
  return 0;
}

int run_plan(const Options& o, int show_depth, bool stats) {
  ExperimentConfig cfg = to_config(o);
  ModelSolver solver(cfg.master_seed);
  Planned p = build_plan(cfg, solver, false);
  const Domain& d = *p.setup.domain;
  fmt::print("level {} horizon {} N {}: ", cfg.level, cfg.horizon, cfg.particles.front());
  print_tree(*p.result.root, d, 0, show_depth, "  ");
  const std::string out = o.out.empty() ? "plan.json" : o.out;
  json doc = {{"domain", d.name},
              {"level", cfg.level},
              {"horizon", cfg.horizon},
              {"particles", cfg.particles.front()},
              {"seed", cfg.master_seed},
              {"tree", tree_json(*p.result.root, d)}};
  write_file(out, [&](std::ostream& f) { f << doc.dump(1) << '\n'; });
  fmt::print("wrote {}\n", out);
  if (stats) {
    const auto s = solver.stats();
    fmt::print("nodes {}\ndropped_branches {}\nnested_depletions {}\nmodel_solves {} (level0 {}, nested {})\n"
               "solver_requests {}\nplan_ms {:.3f}\n",
               p.result.stats.nodes, p.result.stats.dropped_branches, p.result.stats.nested_depletions,
               s.model_solves(), s.level0_solves, s.nested_solves, s.requests, p.ms);
  }
  return 0;
}

int run_simulate(const Options& o, int episodes, bool random) {
  ExperimentConfig cfg = to_config(o);
  ModelSolver solver(cfg.master_seed);
  Planned p = build_plan(cfg, solver, true);
  EpisodePolicy policy{random ? nullptr : p.result.root.get(), planner_options(cfg)};
  policy.replan.retain_beliefs = true;
  std::vector<EpisodeRecord> records;
  double sum = 0.0, sq = 0.0;
  for (int e = 0; e < episodes; ++e) {
    Rng rng = Rng(cfg.master_seed).derive({2, static_cast<std::uint64_t>(e)});
    records.push_back(simulate_episode(p.setup, policy, cfg.horizon, solver, rng));
    const double r = records.back().discounted_return;
    sum += r;
    sq += r * r;
  }
  const double mean = sum / episodes;
  const double sd = episodes > 1 ? std::sqrt(std::max(0.0, (sq - episodes * mean * mean) / (episodes - 1))) : 0.0;
  fmt::print("{} episodes, horizon {}: mean return {:.6g} (sd {:.6g})\n", episodes, cfg.horizon, mean, sd);
  if (!o.out.empty()) {
    write_file(o.out, [&](std::ostream& f) { write_episode_csv(f, p.setup, records, cfg.master_seed); });
    fmt::print("wrote {}\n", o.out);
  }
  return 0;
}

int run_profile(const Options& o) {
  ExperimentConfig cfg = to_config(o);
  auto r = run_profile_experiment(cfg);
  fmt::print("{:>8} {:>5} {:>12} {:>12} {:>12} {:>10}\n", "N", "rts", "mean", "stderr", "random", "plan_ms");
  for (const auto& row : r.rows)
    fmt::print("{:>8} {:>5} {:>12.6g} {:>12.6g} {:>12.6g} {:>10.4g}\n", row.n, row.rts_draws,
               row.mean_reward, row.stderr_reward, row.random_mean, row.plan_ms_mean);
  const std::string out = o.out.empty() ? "profile.csv" : o.out;
  write_file(out, [&](std::ostream& f) { write_profile_csv(f, r, cfg.master_seed); });
  write_plot("profile", out);
  return 0;
}

int run_bench(const Options& o, const std::vector<int>& horizons,
              const std::vector<std::size_t>& plan_particles) {
  ExperimentConfig cfg = to_config(o);
  auto r = run_runtime_benchmark(cfg, horizons, plan_particles);
  fmt::print("{:>7} {:>16} {:>7} {:>3} {:>12} {:>10}\n", "section", "method", "size", "h", "mean_ms", "std_ms");
  for (const auto& row : r.rows) {
    if (row.limited) {
      fmt::print("{:>7} {:>16} {:>7} {:>3} {:>12} {:>10}\n", row.section, row.method, row.size,
                 row.horizon, "*", "*");
    } else {
      fmt::print("{:>7} {:>16} {:>7} {:>3} {:>12.4f} {:>10.4f}\n", row.section, row.method, row.size,
                 row.horizon, row.mean_ms, row.std_ms);
    }
  }
  const std::string out = o.out.empty() ? "bench.csv" : o.out;
  write_file(out, [&](std::ostream& f) { write_bench_csv(f, r, cfg.master_seed); });
  write_plot("bench", out);
  return 0;
}

struct BoundOptions {
  std::vector<std::size_t> n{1000};
  double delta = 0.1;
  double rho = -1.0;
  double rmax = std::nan("");
  double rmin = std::nan("");
  double gamma = 0.9;
  int t = 2;
  std::string range = "finite";
  std::string domain = "tiger";
  bool csv = false;
};

int run_bound(const BoundOptions& b) {
  double rmax = b.rmax, rmin = b.rmin;
  if (std::isnan(rmax) || std::isnan(rmin)) {
    auto d = resolve_domain(b.domain);
    if (std::isnan(rmax)) rmax = d->max_reward(Agent::kI);
    if (std::isnan(rmin)) rmin = d->min_reward(Agent::kI);
  }
  double rho = b.rho;
  if (rho < 0.0) {
    rho = b.range == "discounted" ? discounted_value_range(rmax, rmin, b.gamma)
                                  : horizon_value_range(rmax, rmin, b.gamma, b.t);
  }
  if (b.csv) {
    std::cout << csv_preamble("bound", 0) << "N,delta,rho,gamma,t,r_max,r_min,epsilon,bound,trivial\n";
  } else {
    fmt::print("{:>8} {:>6} {:>10} {:>6} {:>3} {:>12} {:>12} {:>12}\n", "N", "delta", "rho", "gamma", "t",
               "epsilon", "E_t", "trivial");
  }
  for (std::size_t n : b.n) {
    const double eps = chernoff_epsilon(n, b.delta, rho);
    BoundInputs in{n, b.delta, rho, b.gamma, b.t, rmax, rmin};
    const HorizonBound hb = horizon_error_bound(in, eps);
    if (b.csv) {
      fmt::print("{},{},{:.10g},{},{},{},{},{:.10g},{:.10g},{:.10g}\n", n, b.delta, rho, b.gamma, b.t, rmax,
                 rmin, eps, hb.bound, hb.trivial);
    } else {
      fmt::print("{:>8} {:>6} {:>10.6g} {:>6} {:>3} {:>12.4f} {:>12.4f} {:>12.4f}\n", n, b.delta, rho,
                 b.gamma, b.t, eps, hb.bound, hb.trivial);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nestplan: nested interactive POMDP filtering and planning"};
  app.set_config("--config", "", "key-value config file mirroring the flags; flags override it");
  app.require_subcommand(1);
  Options o;

  auto* domain = app.add_subcommand("domain", "list, export or validate domains");
  domain->require_subcommand(1);
  domain->add_subcommand("list", "list built-in domains");
  auto* export_cmd = domain->add_subcommand("export", "write a domain in the text format");
  std::string export_name = "tiger", export_out;
  export_cmd->add_option("--name", export_name, "built-in domain")->capture_default_str();
  export_cmd->add_option("--out", export_out, "output file (stdout if empty)");
  add_model_flags(export_cmd, o);
  auto* validate_cmd = domain->add_subcommand("validate", "validate a domain file");
  std::string validate_file;
  validate_cmd->add_option("file", validate_file, "domain file or built-in name")->required();

  auto* filter = app.add_subcommand("filter", "filtering convergence against a baseline");
  add_model_flags(filter, o);
  add_particle_flags(filter, o);
  std::string kl = "filtered";
  filter->add_option("--action", o.actions, "scripted own actions (repeat per step)");
  filter->add_option("--obs", o.observations, "scripted own observations (repeat per step)");
  filter->add_option("--steps", o.steps, "steps to run; the script cycles (0 = its length)");
  filter->add_option("--trials", o.trials, "seeds per particle count")->capture_default_str();
  filter->add_option("--baseline", o.baseline, "grid:<G> or none (default grid when available)");
  filter->add_option("--grid", o.grid, "grid resolution (0 = default)");
  filter->add_option("--horizon", o.horizon, "j's planning horizon")->capture_default_str();
  filter->add_option("--kl", kl, "KL orientation: filtered (filtered||grid) or both")
      ->check(CLI::IsMember({"filtered", "both"}));
  filter->add_option("--out", o.out, "CSV path (default filter.csv)");

  auto* plan = app.add_subcommand("plan", "build a policy tree for i");
  add_model_flags(plan, o);
  add_particle_flags(plan, o);
  add_planning_flags(plan, o);
  int show_depth = 2;
  bool stats = false;
  plan->add_option("--show-depth", show_depth, "tree depth printed")->capture_default_str();
  plan->add_flag("--stats", stats, "print node counts and the model-solve counter");
  plan->add_option("--out", o.out, "JSON tree file (default plan.json)");

  auto* simulate = app.add_subcommand("simulate", "play episodes with a planned policy");
  add_model_flags(simulate, o);
  add_particle_flags(simulate, o);
  add_planning_flags(simulate, o);
  int episodes = 10;
  bool random = false;
  simulate->add_option("--episodes", episodes, "episodes to play")->capture_default_str();
  simulate->add_flag("--random", random, "act uniformly at random instead");
  simulate->add_option("--out", o.out, "episode CSV path");

  auto* profile = app.add_subcommand("profile", "performance profile over particle counts");
  add_model_flags(profile, o);
  add_particle_flags(profile, o);
  add_planning_flags(profile, o);
  profile->add_option("--rts-draws", o.rts_draws, "observation draw counts to sweep (0 = off)");
  profile->add_option("--trials", o.trials, "policies per configuration")->capture_default_str();
  profile->add_option("--runs", o.runs, "episodes per policy")->capture_default_str();
  profile->add_option("--out", o.out, "CSV path (default profile.csv)");

  auto* bench = app.add_subcommand("bench", "runtime comparison of filters and planners");
  add_model_flags(bench, o);
  add_particle_flags(bench, o);
  std::vector<int> horizons{2, 3};
  std::vector<std::size_t> plan_particles{50};
  bench->add_option("--rts", o.rts, "schedule for the rts rows (tiger schedule when off)");
  bench->add_option("--grid", o.grid, "grid resolution for the grid planner (0 = 100)");
  bench->add_option("--plan-horizons", horizons, "planner horizons")->capture_default_str();
  bench->add_option("--plan-particles", plan_particles, "planner particle counts")->capture_default_str();
  bench->add_option("--repetitions", o.repetitions, "timed repetitions")->capture_default_str();
  bench->add_option("--out", o.out, "CSV path (default bench.csv)");

  auto* bound = app.add_subcommand("bound", "sampling error bound calculator");
  BoundOptions b;
  bound->add_option("--n", b.n, "particle counts")->capture_default_str();
  bound->add_option("--delta", b.delta, "failure probability")->capture_default_str();
  bound->add_option("--rho", b.rho, "value range (derived from rewards if omitted)");
  bound->add_option("--rmax", b.rmax, "largest reward (domain's if omitted)");
  bound->add_option("--rmin", b.rmin, "smallest reward (domain's if omitted)");
  bound->add_option("--gamma", b.gamma, "discount factor")->capture_default_str();
  bound->add_option("--t", b.t, "horizon")->capture_default_str();
  bound->add_option("--range", b.range, "derived rho: finite or discounted")
      ->check(CLI::IsMember({"finite", "discounted"}))
      ->capture_default_str();
  bound->add_option("--domain", b.domain, "domain supplying R_max and R_min")->capture_default_str();
  bound->add_flag("--csv", b.csv, "machine-readable output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*domain) {
      if (domain->got_subcommand("list")) return run_domain_list();
      if (*export_cmd) return run_domain_export(export_name, o, export_out);
      return run_domain_validate(validate_file);
    }
    if (*filter) return run_filter(o, kl);
    if (*plan) return run_plan(o, show_depth, stats);
    if (*simulate) return run_simulate(o, episodes, random);
    if (*profile) return run_profile(o);
    if (*bench) return run_bench(o, horizons, plan_particles);
    if (*bound) return run_bound(b);
  } catch (const ParseError& e) {
    fmt::print(stderr, "parse error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
