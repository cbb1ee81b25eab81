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

#include "nestplan/prior.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "nestplan/errors.h"

namespace nestplan {
namespace {

Belief flat_dirichlet(int n, Rng& rng) {
  Belief b(n);
  for (int k = 0; k < n; ++k) b[k] = rng.exponential();
  return b / b.sum();
}

void check_distribution(const Vector& v, double tol, const std::string& what) {
  if (v.size() == 0) throw ConfigError(what + " is empty");
  if ((v.array() < 0.0).any()) throw ConfigError(what + " has a negative entry");
  if (std::abs(v.sum() - 1.0) > tol)
    throw ConfigError(fmt::format("{} sums to {} instead of 1", what, v.sum()));
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

double number(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used == tok.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(line, fmt::format("bad number '{}'", tok));
}

SimplexDensity parse_density(const std::vector<std::string>& t, std::size_t pos, int line,
                             int num_states) {
  if (pos >= t.size()) throw ParseError(line, "missing density kind");
  const std::string& kind = t[pos++];
  if (kind == "uniform") return SimplexDensity::uniform();
  if (kind == "piecewise") {
    std::vector<double> edges, dens;
    bool after_bar = false;
    for (; pos < t.size(); ++pos) {
      if (t[pos] == "|") {
        after_bar = true;
        continue;
      }
      (after_bar ? dens : edges).push_back(number(t[pos], line));
    }
    if (!after_bar) throw ParseError(line, "piecewise density needs '<edges> | <densities>'");
    return SimplexDensity::piecewise(std::move(edges), std::move(dens));
  }
  if (kind == "points") {
    SimplexDensity d;
    d.kind = SimplexDensity::Kind::kPointMass;
    std::vector<double> group;
    auto flush = [&] {
      if (static_cast<int>(group.size()) != num_states + 1)
        throw ParseError(line, fmt::format("point needs a weight and {} probabilities", num_states));
      d.point_weights.push_back(group[0]);
      d.points.push_back(Eigen::Map<const Vector>(group.data() + 1, num_states));
      group.clear();
    };
    for (; pos < t.size(); ++pos) {
      if (t[pos] == ";") {
        flush();
        continue;
      }
      group.push_back(number(t[pos], line));
    }
    flush();
    return d;
  }
  throw ParseError(line, fmt::format("unknown density kind '{}'", kind));
}

PriorPtr level1_prior(std::string name, Vector marginal,
                      const std::vector<SimplexDensity>& per_state) {
  auto p = std::make_shared<NestedPrior>();
  p->name = std::move(name);
  p->level = 1;
  p->state_marginal = std::move(marginal);
  p->densities = per_state;
  return p;
}

PriorPtr mixture_prior(std::string name, Vector marginal, std::vector<double> weights,
                       std::vector<PriorPtr> components) {
  auto p = std::make_shared<NestedPrior>();
  p->name = std::move(name);
  p->level = components.front()->level + 1;
  p->state_marginal = std::move(marginal);
  p->component_weights = std::move(weights);
  p->components = std::move(components);
  return p;
}

}  // namespace

SimplexDensity SimplexDensity::piecewise(std::vector<double> edges, std::vector<double> densities) {
  SimplexDensity d;
  d.kind = Kind::kPiecewise;
  d.edges = std::move(edges);
  d.densities = std::move(densities);
  return d;
}

SimplexDensity SimplexDensity::point_mass(Belief at) {
  SimplexDensity d;
  d.kind = Kind::kPointMass;
  d.points.push_back(std::move(at));
  d.point_weights.push_back(1.0);
  return d;
}

Belief SimplexDensity::sample(int num_states, Rng& rng) const {
  switch (kind) {
    case Kind::kUniform:
      if (num_states == 2) {
        double p = rng.uniform();
        return Belief{{p, 1.0 - p}};
      }
      return flat_dirichlet(num_states, rng);
    case Kind::kPiecewise: {
      Vector mass(static_cast<Eigen::Index>(densities.size()));
      for (std::size_t k = 0; k < densities.size(); ++k)
        mass[static_cast<Eigen::Index>(k)] = densities[k] * (edges[k + 1] - edges[k]);
      std::size_t bin = rng.categorical(mass);
      double p = edges[bin] + rng.uniform() * (edges[bin + 1] - edges[bin]);
      Belief b(num_states);
      b[0] = p;
      if (num_states > 1) b.tail(num_states - 1) = (1.0 - p) * flat_dirichlet(num_states - 1, rng);
      return b;
    }
    case Kind::kPointMass: {
      std::size_t k = points.size() == 1 ? 0 : rng.categorical(std::span<const double>(point_weights));
      return points[k];
    }
  }
  return {};
}

void NestedPrior::validate(int num_states) const {
  const std::string who = fmt::format("prior '{}'", name);
  if (level < 0) throw ConfigError(who + ": negative level");
  if (state_marginal.size() != num_states)
    throw ConfigError(fmt::format("{}: marginal has {} entries for {} states", who,
                                  state_marginal.size(), num_states));
  check_distribution(state_marginal, kInternalTolerance, who + " state marginal");
  if (level == 0) return;
  check_distribution(frame_weights, kInternalTolerance, who + " frame weights");
  if (level == 1) {
    if (static_cast<int>(densities.size()) != num_states * num_frames())
      throw ConfigError(fmt::format("{}: need one density per (state, frame)", who));
    for (const auto& d : densities) {
      switch (d.kind) {
        case SimplexDensity::Kind::kUniform:
          break;
        case SimplexDensity::Kind::kPiecewise: {
          if (d.edges.size() < 2 || d.densities.size() != d.edges.size() - 1)
            throw ConfigError(who + ": piecewise density needs m+1 edges for m bins");
          if (d.edges.front() != 0.0 || d.edges.back() != 1.0)
            throw ConfigError(who + ": piecewise edges must start at 0 and end at 1");
          double integral = 0.0;
          for (std::size_t k = 0; k + 1 < d.edges.size(); ++k) {
            if (!(d.edges[k + 1] > d.edges[k]))
              throw ConfigError(who + ": piecewise edges must increase strictly");
            if (d.densities[k] < 0.0) throw ConfigError(who + ": negative density");
            integral += d.densities[k] * (d.edges[k + 1] - d.edges[k]);
          }
          if (std::abs(integral - 1.0) > kTableTolerance)
            throw ConfigError(fmt::format("{}: piecewise density integrates to {}", who, integral));
          break;
        }
        case SimplexDensity::Kind::kPointMass: {
          Vector w = Eigen::Map<const Vector>(d.point_weights.data(),
                                              static_cast<Eigen::Index>(d.point_weights.size()));
          check_distribution(w, kInternalTolerance, who + " point weights");
          for (const auto& pt : d.points) {
            if (pt.size() != num_states) throw ConfigError(who + ": point has wrong dimension");
            check_distribution(pt, kInternalTolerance, who + " point belief");
          }
          break;
        }
      }
    }
    return;
  }
  if (components.empty() || components.size() != component_weights.size())
    throw ConfigError(who + ": mixture needs matching components and weights");
  Vector w = Eigen::Map<const Vector>(component_weights.data(),
                                      static_cast<Eigen::Index>(component_weights.size()));
  check_distribution(w, kInternalTolerance, who + " component weights");
  for (const auto& c : components) {
    if (c->level != level - 1)
      throw ConfigError(fmt::format("{}: component '{}' has level {}, expected {}", who, c->name,
                                    c->level, level - 1));
    c->validate(num_states);
  }
}

ParticleSet sample_initial_particles(const NestedPrior& prior, std::size_t n,
                                     const FramePtr& owner, const FrameBook& frames, Rng& rng) {
  if (n == 0) throw DegenerateInputError("cannot sample zero particles");
  if (prior.level < 1) throw DegenerateInputError("a level-0 prior has no interactive particles");
  const Agent me = owner->agent();
  const auto& theirs = frames.of(other(me));
  if (static_cast<int>(theirs.size()) < prior.num_frames())
    throw ConfigError(fmt::format("prior '{}' names {} frames but only {} are available",
                                  prior.name, prior.num_frames(), theirs.size()));
  const int ns = owner->num_states();

  ParticleSet ps;
  ps.level = prior.level;
  ps.owner = owner;
  ps.other_frames.assign(theirs.begin(), theirs.begin() + prior.num_frames());
  ps.nominal_size = n;
  ps.particles.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    InteractiveParticle p;
    p.state = static_cast<int>(rng.categorical(prior.state_marginal));
    p.frame = prior.num_frames() == 1 ? 0 : static_cast<int>(rng.categorical(prior.frame_weights));
    p.weight = w;
    if (prior.level == 1) {
      p.model = prior.density(p.state, p.frame).sample(ns, rng);
    } else {
      std::size_t c = prior.components.size() == 1
                          ? 0
                          : rng.categorical(std::span<const double>(prior.component_weights));
      Rng sub = rng.derive({static_cast<std::uint64_t>(prior.level), k});
      p.model = std::make_shared<const ParticleSet>(sample_initial_particles(
          *prior.components[c], n, ps.other_frames[p.frame], frames, sub));
    }
    ps.particles.push_back(std::move(p));
  }
  return ps;
}

std::map<std::string, PriorPtr> parse_priors(std::string_view text, const Domain& domain) {
  std::map<std::string, PriorPtr> out;
  std::shared_ptr<NestedPrior> cur;
  std::vector<std::pair<int, std::vector<std::string>>> density_lines;
  const int ns = domain.num_states();

  auto finish = [&](int line) {
    if (!cur) return;
    if (cur->level == 1) {
      cur->densities.assign(static_cast<std::size_t>(ns * cur->num_frames()), SimplexDensity{});
      std::vector<bool> seen(cur->densities.size(), false);
      for (const auto& [ln, t] : density_lines) {
        std::size_t pos = 2;
        int frame = -1;
        if (t.size() > 3 && t[2] == "frame") {
          frame = static_cast<int>(number(t[3], ln));
          pos = 4;
        }
        SimplexDensity d = parse_density(t, pos, ln, ns);
        for (int s = 0; s < ns; ++s) {
          if (t[1] != "*" && domain.states[s] != t[1]) continue;
          for (int f = 0; f < cur->num_frames(); ++f) {
            if (frame >= 0 && f != frame) continue;
            auto idx = static_cast<std::size_t>(s * cur->num_frames() + f);
            cur->densities[idx] = d;
            seen[idx] = true;
          }
        }
        if (t[1] != "*" && std::find(domain.states.begin(), domain.states.end(), t[1]) ==
                               domain.states.end()) {
          throw ParseError(ln, fmt::format("unknown state '{}'", t[1]));
        }
      }
      if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw ParseError(line, fmt::format("prior '{}' lacks a density for some (state, frame)",
                                           cur->name));
    }
    try {
      cur->validate(ns);
    } catch (const ConfigError& e) {
      throw ParseError(line, e.what());
    }
    out[cur->name] = cur;
    out[""] = cur;
    cur.reset();
    density_lines.clear();
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto t = tokens_of(raw);
    if (t.empty()) continue;
    if (t[0] == "[prior") {
      finish(line_no);
      if (t.size() != 2 || t[1].empty() || t[1].back() != ']')
        throw ParseError(line_no, "expected '[prior <name>]'");
      cur = std::make_shared<NestedPrior>();
      cur->name = t[1].substr(0, t[1].size() - 1);
      continue;
    }
    if (!cur) throw ParseError(line_no, "content before the first [prior] block");
    const std::string& key = t[0];
    if (key == "level") {
      cur->level = static_cast<int>(number(t.at(1), line_no));
    } else if (key == "marginal") {
      cur->state_marginal.resize(static_cast<Eigen::Index>(t.size() - 1));
      for (std::size_t k = 1; k < t.size(); ++k)
        cur->state_marginal[static_cast<Eigen::Index>(k - 1)] = number(t[k], line_no);
    } else if (key == "frames") {
      cur->frame_weights.resize(static_cast<Eigen::Index>(t.size() - 1));
      for (std::size_t k = 1; k < t.size(); ++k)
        cur->frame_weights[static_cast<Eigen::Index>(k - 1)] = number(t[k], line_no);
    } else if (key == "density") {
      if (t.size() < 3) throw ParseError(line_no, "density needs a state and a kind");
      density_lines.emplace_back(line_no, t);
    } else if (key == "component") {
      if (t.size() != 3) throw ParseError(line_no, "expected 'component <weight> <name>'");
      PriorPtr c;
      if (auto it = out.find(t[2]); it != out.end() && !t[2].empty()) {
        c = it->second;
      } else {
        try {
          c = builtin_prior(t[2], domain);
        } catch (const ConfigError&) {
          throw ParseError(line_no, fmt::format("unknown prior '{}'", t[2]));
        }
      }
      cur->component_weights.push_back(number(t[1], line_no));
      cur->components.push_back(c);
    } else {
      throw ParseError(line_no, fmt::format("unknown prior key '{}'", key));
    }
  }
  finish(line_no);
  if (out.empty()) throw ParseError(line_no, "no [prior] blocks");
  return out;
}

PriorPtr builtin_prior(const std::string& name, const Domain& domain) {
  const int ns = domain.num_states();
  auto uniform_marginal = [&] { return Vector::Constant(ns, 1.0 / ns).eval(); };
  auto uniform_densities = [&] { return std::vector<SimplexDensity>(static_cast<std::size_t>(ns)); };
  // The other agent most likely knows the true state: mass concentrated on
  // p(first state) > 0.5 when the state is the first one, below otherwise.
  auto informed_densities = [&] {
    std::vector<SimplexDensity> d;
    for (int s = 0; s < ns; ++s) {
      d.push_back(s == 0 ? SimplexDensity::piecewise({0.0, 0.5, 1.0}, {0.2, 1.8})
                         : SimplexDensity::piecewise({0.0, 0.5, 1.0}, {1.8, 0.2}));
    }
    return d;
  };
  auto require_states = [&](int n) {
    if (ns != n)
      throw ConfigError(fmt::format("prior '{}' needs a {}-state domain, '{}' has {}", name, n,
                                    domain.name, ns));
  };

  PriorPtr p;
  if (name == "tiger-uniform") {
    require_states(2);
    p = level1_prior(name, uniform_marginal(), uniform_densities());
  } else if (name == "tiger-informed") {
    require_states(2);
    p = level1_prior(name, uniform_marginal(), informed_densities());
  } else if (name == "tiger-level2") {
    p = mixture_prior(name, Vector::Constant(2, 0.5), {0.5, 0.5},
                      {builtin_prior("tiger-uniform", domain), builtin_prior("tiger-informed", domain)});
  } else if (name == "mm-uniform") {
    require_states(3);
    p = level1_prior(name, uniform_marginal(), uniform_densities());
  } else if (name == "mm-informed") {
    require_states(3);
    p = level1_prior(name, uniform_marginal(), informed_densities());
  } else if (name == "mm-level2") {
    p = mixture_prior(name, Vector::Constant(3, 1.0 / 3.0), {0.5, 0.5},
                      {builtin_prior("mm-uniform", domain), builtin_prior("mm-informed", domain)});
  } else if (name == "uav-uniform") {
    require_states(36);
    p = level1_prior(name, uniform_marginal(), uniform_densities());
  } else {
    throw ConfigError(fmt::format("unknown built-in prior '{}'", name));
  }
  p->validate(ns);
  return p;
}

std::vector<std::string> builtin_prior_names() {
  return {"tiger-uniform", "tiger-informed", "tiger-level2", "mm-uniform",
          "mm-informed",   "mm-level2",      "uav-uniform"};
}

PriorPtr resolve_prior(const std::string& name_or_path, const Domain& domain) {
  for (const auto& n : builtin_prior_names()) {
    if (n == name_or_path) return builtin_prior(n, domain);
  }
  if (!std::filesystem::exists(name_or_path))
    throw ConfigError(fmt::format("'{}' is neither a built-in prior nor a file", name_or_path));
  std::ifstream in(name_or_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_priors(buf.str(), domain).at("");
}

std::string default_prior_name(const std::string& domain_name, int level) {
  std::string base = domain_name == "tiger-growl-only" ? "tiger" : domain_name;
  if (level >= 2) return base + "-level2";
  return base + "-uniform";
}

}  // namespace nestplan
