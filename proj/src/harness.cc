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

#include "nestplan/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "nestplan/analysis.h"
#include "nestplan/belief.h"
#include "nestplan/domain_io.h"
#include "nestplan/errors.h"
#include "nestplan/grid.h"

#ifndef NESTPLAN_VERSION
#define NESTPLAN_VERSION "0.0.0"
#endif

namespace nestplan {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return {std::nan(""), std::nan("")};
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return m;
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  return fmt::format("{:.10g}", x);
}

std::vector<std::pair<int, int>> resolve_script(const ExperimentConfig& cfg, const Setup& st) {
  std::vector<ScriptStep> script = cfg.script.empty() ? default_script(st.domain->name) : cfg.script;
  const int steps = cfg.steps > 0 ? cfg.steps : static_cast<int>(script.size());
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k < steps; ++k) {
    const ScriptStep& s = script[static_cast<std::size_t>(k) % script.size()];
    out.emplace_back(st.domain->action_index(Agent::kI, s.action),
                     st.domain->observation_index(Agent::kI, s.observation));
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (level < 1) throw ConfigError("nesting level must be at least 1");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (runs < 1) throw ConfigError("runs must be at least 1");
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (particles.empty()) throw ConfigError("at least one particle count is required");
  for (auto n : particles) {
    if (n == 0) throw ConfigError("particle counts must be positive");
  }
  if (grid < -1) throw ConfigError("grid resolution must be -1 (off), 0 (default) or positive");
  if (steps < 0) throw ConfigError("step count must be nonnegative");
  for (int d : rts_draws) {
    if (d < 0) throw ConfigError("RTS draw counts must be nonnegative");
  }
}

int Setup::grid_resolution(int requested) const {
  if (level != 1 || requested < 0) return 0;
  const int ns = domain->num_states();
  if (ns > 3) return 0;
  if (requested > 0) return requested;
  return ns == 2 ? 200 : 30;
}

std::shared_ptr<const Domain> resolve_domain(const std::string& name_or_path, const UavConfig& uav) {
  if (name_or_path == "uav") return std::make_shared<const Domain>(build_uav(uav));
  const auto& names = builtin_domain_names();
  if (std::find(names.begin(), names.end(), name_or_path) != names.end())
    return builtin_domain(name_or_path);
  if (!std::filesystem::exists(name_or_path))
    throw ConfigError(fmt::format("'{}' is neither a built-in domain nor a file", name_or_path));
  return std::make_shared<const Domain>(load_domain_file(name_or_path));
}

Setup make_setup(const ExperimentConfig& cfg) {
  cfg.validate();
  Setup st;
  st.level = cfg.level;
  st.domain = resolve_domain(cfg.domain, cfg.uav);
  st.i_frame = make_frame(Agent::kI, st.domain, cfg.gamma, cfg.horizon);
  st.j_frame = make_frame(Agent::kJ, st.domain, cfg.gamma, cfg.horizon);
  st.frames = FrameBook::single(st.i_frame, st.j_frame);
  const std::string prior =
      cfg.prior.empty() ? default_prior_name(st.domain->name, cfg.level) : cfg.prior;
  st.prior = resolve_prior(prior, *st.domain);
  if (st.prior->level != cfg.level) {
    throw ConfigError(fmt::format("prior '{}' has level {} but level {} was requested",
                                  st.prior->name, st.prior->level, cfg.level));
  }
  return st;
}

std::vector<ScriptStep> default_script(const std::string& domain_name) {
  if (domain_name == "tiger" || domain_name == "tiger-growl-only")
    return {{"L", "GL,S"}, {"L", "GL,S"}, {"OR", "GL,S"}};
  if (domain_name == "mm")
    return {{"M", "not-defective"}, {"M", "not-defective"}, {"M", "not-defective"}};
  if (domain_name == "uav") return {{"listen", "CR"}, {"listen", "CR"}, {"listen", "TR"}};
  throw ConfigError(fmt::format("no default script for domain '{}'; give one explicitly",
                                domain_name));
}

bool is_absorbing(const Domain& d, int state) {
  for (int k = 0; k < d.num_joint_actions(); ++k) {
    if (std::abs(d.transition[k](state, state) - 1.0) > kTableTolerance) return false;
    if (d.reward[0](k, state) != 0.0 || d.reward[1](k, state) != 0.0) return false;
  }
  return true;
}

EpisodeRecord simulate_episode(const Setup& setup, const EpisodePolicy& policy, int horizon,
                               ModelSolver& solver, Rng& rng) {
  const Frame& me = setup.i();
  const Domain& dom = *setup.domain;
  EpisodeRecord rec;
  rec.seed = rng.seed();

  Rng init = rng.derive({0});
  ParticleSet start = sample_initial_particles(*setup.prior, 1, setup.i_frame, setup.frames, init);
  InteractiveParticle j = start.particles.front();
  const Frame& jf = *start.other_frames[static_cast<std::size_t>(j.frame)];
  int s = j.state;
  rec.states.push_back(s);

  const PolicyNode* node = policy.root;
  std::vector<PlanResult> replanned;
  double discount = 1.0;
  for (int t = 0; t < horizon; ++t) {
    Rng step = rng.derive({1, static_cast<std::uint64_t>(t)});
    const int h = horizon - t;
    int a;
    if (policy.root && node) {
      a = static_cast<int>(step.categorical(node->action));
    } else {
      if (policy.root) ++rec.random_fallbacks;
      a = static_cast<int>(step.below(static_cast<std::size_t>(me.num_actions())));
    }
    const int aj = static_cast<int>(step.categorical(solver.policy(j, jf, h)));
    const double r = me.reward(s, a, aj);
    rec.rewards.push_back(r);
    rec.discounted_return += discount * r;
    discount *= me.discount();

    const int s2 = static_cast<int>(step.categorical(me.transition(a, aj).row(s)));
    const int oi = static_cast<int>(step.categorical(me.observation(a, aj).row(s2)));
    const int oj = static_cast<int>(step.categorical(me.other_observation(a, aj).row(s2)));
    rec.i_actions.push_back(a);
    rec.j_actions.push_back(aj);
    rec.i_observations.push_back(oi);
    rec.j_observations.push_back(oj);

    // j revises its own model with its action and observation.
    if (!j.nested()) {
      try {
        j.model = level0_update(j.belief(), aj, oj, jf);
      } catch (const InconsistentObservationError&) {
        j.model = level0_predict(j.belief(), aj, jf);
      }
    } else {
      Rng sub = step.derive({2});
      IpfOptions opt;
      opt.other_horizon = h;
      try {
        j.model = std::make_shared<const ParticleSet>(
            ipf_step(j.nested_set(), aj, oj, solver, sub, opt));
      } catch (const ParticleDepletionError&) {
      }
    }
    j.state = s2;

    if (policy.root && node && h > 1) {
      const PolicyNode* next = node->child(a, oi, me.num_observations());
      if (!next && node->belief) {
        Rng sub = step.derive({3});
        IpfOptions opt;
        opt.other_horizon = h;
        opt.variant = policy.replan.variant;
        try {
          ParticleSet b = ipf_step(*node->belief, a, oi, solver, sub, opt);
          PlannerOptions ro = policy.replan;
          ro.retain_beliefs = true;
          Rng plan_rng = step.derive({4});
          replanned.push_back(approx_policy(b, h - 1, ro, solver, plan_rng));
          next = replanned.back().root.get();
          ++rec.replans;
        } catch (const ParticleDepletionError&) {
        }
      }
      node = next;
    }
    s = s2;
    rec.states.push_back(s);
    if (is_absorbing(dom, s)) break;
  }
  return rec;
}

const FilterSummaryRow& FilterReport::at(std::size_t n, int step) const {
  for (const auto& r : summary) {
    if (r.n == n && r.step == step) return r;
  }
  throw Error(fmt::format("no filter summary for N={} step={}", n, step));
}

FilterReport run_filter_experiment(const ExperimentConfig& cfg) {
  const Setup st = make_setup(cfg);
  if (cfg.level > 2) throw ConfigError("filter experiments support levels 1 and 2");
  const auto script = resolve_script(cfg, st);
  const int steps = static_cast<int>(script.size());
  const int g = st.grid_resolution(cfg.grid);
  ModelSolver solver(cfg.master_seed);

  FilterReport report;
  report.states = st.domain->states;
  std::vector<std::size_t> ns = cfg.particles;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  std::vector<Matrix> grid_mass;
  std::unique_ptr<SimplexLattice> lattice;
  if (g > 0) {
    report.baseline = fmt::format("grid:{}", g);
    GridBelief gb = grid_from_prior(*st.prior, g, st.i_frame, st.frames);
    lattice = std::make_unique<SimplexLattice>(gb.lattice);
    for (auto [a, o] : script) {
      gb = grid_update_level1(gb, a, o, solver);
      grid_mass.push_back(gb.mass);
    }
  } else {
    report.baseline = fmt::format("ipf:{}", ns.back());
  }

  struct Run {
    std::vector<FilterRow> rows;
  };
  auto run = [&](std::size_t n, int trial) {
    Run out;
    Rng rng = Rng(cfg.master_seed).derive({n, static_cast<std::uint64_t>(trial)});
    Rng init = rng.derive({0});
    ParticleSet ps = sample_initial_particles(*st.prior, n, st.i_frame, st.frames, init);
    bool depleted = false;
    IpfOptions opt;
    opt.variant = cfg.variant;
    for (int k = 0; k < steps; ++k) {
      FilterRow row;
      row.step = k + 1;
      row.n = n;
      row.seed = rng.seed();
      if (!depleted) {
        Rng step = rng.derive({1, static_cast<std::uint64_t>(k)});
        const auto t0 = Clock::now();
        try {
          ps = ipf_step(ps, script[k].first, script[k].second, solver, step, opt);
        } catch (const ParticleDepletionError&) {
          depleted = true;
        }
        row.wall_ms = elapsed_ms(t0);
      }
      row.depleted = depleted;
      if (depleted) {
        row.kl = row.kl_reverse = row.tv = std::nan("");
        row.marginal = Vector::Constant(st.domain->num_states(), std::nan(""));
      } else {
        row.marginal = ps.physical_marginal();
        if (g > 0) {
          const Matrix hist = particle_histogram(ps, *lattice);
          row.kl = kl_divergence(hist, grid_mass[static_cast<std::size_t>(k)]);
          row.kl_reverse = kl_divergence(grid_mass[static_cast<std::size_t>(k)], hist);
          row.tv = total_variation(hist, grid_mass[static_cast<std::size_t>(k)]);
        }
      }
      out.rows.push_back(std::move(row));
    }
    return out;
  };

  // Highest-N runs first: they are the reference when there is no grid.
  std::map<std::size_t, std::vector<Run>> runs;
  for (auto it = ns.rbegin(); it != ns.rend(); ++it) {
    auto& bucket = runs[*it];
    for (int t = 0; t < cfg.trials; ++t) bucket.push_back(run(*it, t));
  }
  if (g == 0) {
    const auto& ref = runs[ns.back()];
    for (auto& [n, bucket] : runs) {
      for (int t = 0; t < cfg.trials; ++t) {
        for (int k = 0; k < steps; ++k) {
          FilterRow& row = bucket[static_cast<std::size_t>(t)].rows[static_cast<std::size_t>(k)];
          const FilterRow& r0 = ref[static_cast<std::size_t>(t)].rows[static_cast<std::size_t>(k)];
          if (row.depleted || r0.depleted) {
            row.kl = row.kl_reverse = row.tv = std::nan("");
            continue;
          }
          row.kl = kl_divergence(row.marginal, r0.marginal);
          row.kl_reverse = kl_divergence(r0.marginal, row.marginal);
          row.tv = total_variation(Matrix(row.marginal), Matrix(r0.marginal));
        }
      }
    }
  }

  for (std::size_t n : ns) {
    const auto& bucket = runs[n];
    for (int t = 0; t < cfg.trials; ++t) {
      for (const auto& row : bucket[static_cast<std::size_t>(t)].rows) report.rows.push_back(row);
    }
    for (int k = 0; k < steps; ++k) {
      std::vector<double> kl, tv;
      FilterSummaryRow s;
      s.n = n;
      s.step = k + 1;
      for (int t = 0; t < cfg.trials; ++t) {
        const FilterRow& row = bucket[static_cast<std::size_t>(t)].rows[static_cast<std::size_t>(k)];
        ++s.runs;
        if (row.depleted || std::isnan(row.kl)) {
          s.depletions += row.depleted ? 1 : 0;
          continue;
        }
        kl.push_back(row.kl);
        tv.push_back(row.tv);
      }
      const Moments mk = moments(kl), mt = moments(tv);
      s.mean_kl = mk.mean;
      s.std_kl = mk.sd;
      s.mean_tv = mt.mean;
      s.std_tv = mt.sd;
      report.summary.push_back(s);
    }
  }
  return report;
}

const ProfileRow& ProfileReport::at(std::size_t n, int rts_draws) const {
  for (const auto& r : rows) {
    if (r.n == n && r.rts_draws == rts_draws) return r;
  }
  throw Error(fmt::format("no profile row for N={} rts={}", n, rts_draws));
}

ProfileReport run_profile_experiment(const ExperimentConfig& cfg) {
  const Setup st = make_setup(cfg);
  std::vector<int> draws = cfg.rts_draws;
  if (draws.empty()) draws.push_back(cfg.rts.enabled ? -1 : 0);

  ProfileReport report;
  for (std::size_t n : cfg.particles) {
    for (int d : draws) {
      PlannerOptions popt;
      popt.variant = cfg.variant;
      popt.max_nodes = cfg.node_budget;
      if (d == -1) {
        popt.rts = cfg.rts;
      } else if (d > 0) {
        popt.rts.enabled = true;
        popt.rts.draws = d;
      }
      popt.retain_beliefs = popt.rts.enabled;

      ModelSolver solver(cfg.master_seed);
      std::vector<double> totals, random_totals, plan_ms;
      ProfileRow row;
      row.n = n;
      row.rts_draws = d;
      row.trials = cfg.trials;
      row.runs = cfg.runs;
      for (int trial = 0; trial < cfg.trials; ++trial) {
        Rng trial_rng = Rng(cfg.master_seed)
                            .derive({n, static_cast<std::uint64_t>(d + 1),
                                     static_cast<std::uint64_t>(trial)});
        Rng init = trial_rng.derive({0});
        ParticleSet ps = sample_initial_particles(*st.prior, n, st.i_frame, st.frames, init);
        Rng plan_rng = trial_rng.derive({1});
        const auto t0 = Clock::now();
        PlanResult plan = approx_policy(ps, cfg.horizon, popt, solver, plan_rng);
        plan_ms.push_back(elapsed_ms(t0));
        row.nodes += plan.stats.nodes;

        EpisodePolicy policy{plan.root.get(), popt};
        EpisodePolicy random{nullptr, popt};
        for (int r = 0; r < cfg.runs; ++r) {
          Rng ep = trial_rng.derive({2, static_cast<std::uint64_t>(r)});
          Rng ep_random = ep;
          EpisodeRecord rec = simulate_episode(st, policy, cfg.horizon, solver, ep);
          totals.push_back(rec.discounted_return);
          row.replans += rec.replans;
          random_totals.push_back(simulate_episode(st, random, cfg.horizon, solver, ep_random).discounted_return);
        }
      }
      const Moments m = moments(totals), mr = moments(random_totals), mt = moments(plan_ms);
      row.mean_reward = m.mean;
      row.std_reward = m.sd;
      row.stderr_reward = m.sd / std::sqrt(static_cast<double>(totals.size()));
      row.random_mean = mr.mean;
      row.random_std = mr.sd;
      row.plan_ms_mean = mt.mean;
      row.plan_ms_std = mt.sd;
      row.model_solves = solver.stats().model_solves();
      report.rows.push_back(row);
    }
  }
  return report;
}

const BenchRow& BenchReport::at(const std::string& section, const std::string& method,
                                std::size_t size, int horizon) const {
  for (const auto& r : rows) {
    if (r.section == section && r.method == method && r.size == size && r.horizon == horizon) return r;
  }
  throw Error(fmt::format("no benchmark row {}/{} size={} horizon={}", section, method, size, horizon));
}

BenchReport run_runtime_benchmark(const ExperimentConfig& cfg, const std::vector<int>& horizons,
                                  const std::vector<std::size_t>& plan_particles) {
  const Setup st = make_setup(cfg);
  const auto script = resolve_script(cfg, st);
  const auto [a, o] = script.front();
  BenchReport report;

  auto measure = [&](BenchRow row, const auto& fn) {
    row.repetitions = cfg.repetitions;
    try {
      fn();  // warm-up, discarded
      std::vector<double> ms;
      for (int k = 0; k < cfg.repetitions; ++k) {
        const auto t0 = Clock::now();
        fn();
        ms.push_back(elapsed_ms(t0));
      }
      const Moments m = moments(ms);
      row.mean_ms = m.mean;
      row.std_ms = m.sd;
    } catch (const ResourceLimitError&) {
      row.limited = true;
    }
    report.rows.push_back(row);
  };

  for (std::size_t n : cfg.particles) {
    Rng init = Rng(cfg.master_seed).derive({n, 0});
    const ParticleSet ps = sample_initial_particles(*st.prior, n, st.i_frame, st.frames, init);
    measure(BenchRow{"filter", "ipf", n, 1}, [&] {
      ModelSolver solver(cfg.master_seed);
      Rng rng = Rng(cfg.master_seed).derive({n, 1});
      IpfOptions opt;
      opt.variant = cfg.variant;
      (void)ipf_step(ps, a, o, solver, rng, opt);
    });
    if (st.grid_resolution(static_cast<int>(n)) > 0) {
      std::unique_ptr<GridBelief> gb;
      try {
        gb = std::make_unique<GridBelief>(
            grid_from_prior(*st.prior, static_cast<int>(n), st.i_frame, st.frames));
      } catch (const ResourceLimitError&) {
      }
      for (auto [name, method] : {std::pair{"grid-scatter", GridMethod::kScatter},
                                  std::pair{"grid-quadrature", GridMethod::kQuadrature}}) {
        measure(BenchRow{"filter", name, n, 1}, [&, method = method] {
          if (!gb) throw ResourceLimitError("grid does not fit");
          ModelSolver solver(cfg.master_seed);
          GridUpdateOptions opt;
          opt.method = method;
          (void)grid_update_level1(*gb, a, o, solver, opt);
        });
      }
    }
  }

  for (int h : horizons) {
    for (std::size_t n : plan_particles) {
      Rng init = Rng(cfg.master_seed).derive({n, 2});
      const ParticleSet ps = sample_initial_particles(*st.prior, n, st.i_frame, st.frames, init);
      PlannerOptions full;
      full.variant = cfg.variant;
      full.max_nodes = cfg.node_budget;
      PlannerOptions rts = full;
      rts.rts = cfg.rts.enabled ? cfg.rts : RtsConfig::tiger_schedule();
      for (const auto& [name, opt] : {std::pair{"no-rts", full}, std::pair{"rts", rts}}) {
        measure(BenchRow{"plan", name, n, h}, [&, opt = opt] {
          ModelSolver solver(cfg.master_seed);
          Rng rng = Rng(cfg.master_seed).derive({n, 3, static_cast<std::uint64_t>(h)});
          (void)approx_policy(ps, h, opt, solver, rng);
        });
      }
    }
    const int g = st.grid_resolution(cfg.grid > 0 ? cfg.grid : 100);
    if (g > 0) {
      measure(BenchRow{"plan", "grid", static_cast<std::size_t>(g), h}, [&] {
        ModelSolver solver(cfg.master_seed);
        GridBelief gb = grid_from_prior(*st.prior, g, st.i_frame, st.frames);
        GridPlanOptions gopt;
        if (cfg.node_budget) gopt.max_nodes = cfg.node_budget;
        (void)grid_plan_level1(gb, h, solver, gopt);
      });
    }
  }
  return report;
}

std::string hardware_string() {
  std::ifstream in("/proc/cpuinfo");
  std::string line, model = "unknown-cpu";
  int cpus = 0;
  while (std::getline(in, line)) {
    if (line.rfind("processor", 0) == 0) ++cpus;
    if (line.rfind("model name", 0) == 0 && model == "unknown-cpu") {
      auto colon = line.find(':');
      if (colon != std::string::npos) model = line.substr(colon + 1);
    }
  }
  std::string out;
  for (char c : model) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty() && out.back() != '_') out += '_';
    } else {
      out += c;
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return fmt::format("{}_x{}", out, std::max(cpus, 1));
}

std::string csv_preamble(const std::string& subcommand, std::uint64_t master_seed) {
  return fmt::format("# nestplan {} {} {} {}\n", NESTPLAN_VERSION, subcommand, hardware_string(),
                     master_seed);
}

void write_filter_csv(std::ostream& out, const FilterReport& r, std::uint64_t master_seed,
                      bool both_kl) {
  out << csv_preamble("filter", master_seed);
  out << "step,N,seed,kl_to_grid,tv_to_grid";
  for (const auto& s : r.states) out << ",p_" << s;
  out << ",depletion_flag,wall_time_ms" << (both_kl ? ",kl_from_grid\n" : "\n");
  for (const auto& row : r.rows) {
    out << fmt::format("{},{},{},{},{}", row.step, row.n, row.seed, num(row.kl), num(row.tv));
    for (Eigen::Index k = 0; k < row.marginal.size(); ++k) out << ',' << num(row.marginal[k]);
    out << fmt::format(",{},{}", row.depleted ? 1 : 0, num(row.wall_ms));
    out << (both_kl ? "," + num(row.kl_reverse) + "\n" : std::string("\n"));
  }
}

void write_filter_summary_csv(std::ostream& out, const FilterReport& r, std::uint64_t master_seed) {
  out << csv_preamble("filter", master_seed);
  out << "N,step,baseline,mean_kl,std_kl,mean_tv,std_tv,runs,depletions\n";
  for (const auto& s : r.summary) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", s.n, s.step, r.baseline, num(s.mean_kl),
                       num(s.std_kl), num(s.mean_tv), num(s.std_tv), s.runs, s.depletions);
  }
}

void write_profile_csv(std::ostream& out, const ProfileReport& r, std::uint64_t master_seed) {
  out << csv_preamble("profile", master_seed);
  out << "N,rts,trials,runs,mean_reward,std_reward,stderr_reward,random_mean,random_std,"
         "model_solves,nodes,replans,plan_ms_mean,plan_ms_std\n";
  for (const auto& row : r.rows) {
    const std::string rts = row.rts_draws == 0 ? "off"
                            : row.rts_draws < 0 ? "schedule"
                                                : std::to_string(row.rts_draws);
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", row.n, rts, row.trials,
                       row.runs, num(row.mean_reward), num(row.std_reward),
                       num(row.stderr_reward), num(row.random_mean), num(row.random_std),
                       row.model_solves, row.nodes, row.replans, num(row.plan_ms_mean),
                       num(row.plan_ms_std));
  }
}

void write_bench_csv(std::ostream& out, const BenchReport& r, std::uint64_t master_seed) {
  out << csv_preamble("bench", master_seed);
  out << "section,method,size,horizon,repetitions,mean_ms,std_ms\n";
  for (const auto& row : r.rows) {
    out << fmt::format("{},{},{},{},{},{},{}\n", row.section, row.method, row.size, row.horizon,
                       row.repetitions, row.limited ? "*" : num(row.mean_ms),
                       row.limited ? "*" : num(row.std_ms));
  }
}

void write_episode_csv(std::ostream& out, const Setup& setup,
                       const std::vector<EpisodeRecord>& episodes, std::uint64_t master_seed) {
  const Domain& d = *setup.domain;
  out << csv_preamble("simulate", master_seed);
  out << "episode,seed,step,state,i_action,j_action,i_obs,j_obs,reward,discounted_return,replans\n";
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const auto& rec = episodes[e];
    for (std::size_t t = 0; t < rec.rewards.size(); ++t) {
      out << fmt::format("{},{},{},{},{},{},\"{}\",\"{}\",{},{},{}\n", e, rec.seed, t + 1,
                         d.states[static_cast<std::size_t>(rec.states[t])],
                         d.actions[0][static_cast<std::size_t>(rec.i_actions[t])],
                         d.actions[1][static_cast<std::size_t>(rec.j_actions[t])],
                         d.observations[0][static_cast<std::size_t>(rec.i_observations[t])],
                         d.observations[1][static_cast<std::size_t>(rec.j_observations[t])],
                         num(rec.rewards[t]), num(rec.discounted_return), rec.replans);
    }
  }
}

std::string plot_script(const std::string& subcommand, const std::string& csv_path) {
  std::ostringstream s;
  s << "# gnuplot script for " << csv_path << "\n"
    << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << "set terminal pngcairo size 900,600\n"
    << "set output '" << csv_path << ".png'\n";
  if (subcommand == "filter") {
    s << "set logscale x\nset xlabel 'particles'\nset ylabel 'KL (nats)'\n"
      << "plot '" << csv_path << "' using 1:4:5 with yerrorlines\n";
  } else if (subcommand == "profile") {
    s << "set logscale x\nset xlabel 'particles'\nset ylabel 'mean reward'\n"
      << "plot '" << csv_path << "' using 1:5:7 with yerrorlines title 'planner', \\\n"
      << "     '' using 1:8 with lines title 'random'\n";
  } else {
    s << "set style data histograms\nset ylabel 'ms'\n"
      << "plot '" << csv_path << "' using 6:xtic(2)\n";
  }
  return s.str();
}

}  // namespace nestplan
