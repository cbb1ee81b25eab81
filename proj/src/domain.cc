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

#include "nestplan/domain.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nestplan/errors.h"

namespace nestplan {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int find_label(const std::vector<std::string>& labels, std::string_view label,
               std::string_view what) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error(fmt::format("unknown {} '{}'", what, label));
  return static_cast<int>(it - labels.begin());
}

std::string joint_key(const Domain& d, int joint) {
  int nj = d.num_actions(Agent::kJ);
  return fmt::format("<{},{}>", d.actions[0][joint / nj], d.actions[1][joint % nj]);
}

void check_stochastic_rows(const Matrix& m, const std::string& table, const std::string& prefix,
                           const std::vector<std::string>& row_labels,
                           std::vector<Violation>& out) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::string key = fmt::format("{} {}", prefix, row_labels[r]);
    if (m.row(r).hasNaN()) {
      out.push_back({table, key, "missing row"});
      continue;
    }
    if ((m.row(r).array() < 0.0).any() || (m.row(r).array() > 1.0).any()) {
      out.push_back({table, key, "entry outside [0,1]"});
      continue;
    }
    double sum = m.row(r).sum();
    if (std::abs(sum - 1.0) > kTableTolerance) {
      out.push_back({table, key, fmt::format("row sums to {} instead of 1", sum)});
    }
  }
}

}  // namespace

Domain Domain::with_labels(std::string name, std::vector<std::string> states,
                           std::array<std::vector<std::string>, 2> actions,
                           std::array<std::vector<std::string>, 2> observations) {
  Domain d;
  d.name = std::move(name);
  d.states = std::move(states);
  d.actions = std::move(actions);
  d.observations = std::move(observations);
  const auto ns = static_cast<Eigen::Index>(d.states.size());
  const int nja = d.num_joint_actions();
  d.transition.assign(nja, Matrix::Constant(ns, ns, kNaN));
  for (Agent a : {Agent::kI, Agent::kJ}) {
    d.observation[index(a)].assign(nja, Matrix::Constant(ns, d.num_observations(a), kNaN));
    d.reward[index(a)] = Matrix::Constant(nja, ns, kNaN);
  }
  return d;
}

int Domain::state_index(std::string_view label) const {
  return find_label(states, label, "state");
}

int Domain::action_index(Agent a, std::string_view label) const {
  return find_label(actions[index(a)], label, fmt::format("action of {}", agent_name(a)));
}

int Domain::observation_index(Agent a, std::string_view label) const {
  return find_label(observations[index(a)], label,
                    fmt::format("observation of {}", agent_name(a)));
}

bool Domain::operator==(const Domain& rhs) const {
  if (name != rhs.name || states != rhs.states || actions != rhs.actions ||
      observations != rhs.observations || transition.size() != rhs.transition.size()) {
    return false;
  }
  for (std::size_t k = 0; k < transition.size(); ++k) {
    if (transition[k] != rhs.transition[k]) return false;
    for (int a = 0; a < 2; ++a) {
      if (observation[a][k] != rhs.observation[a][k]) return false;
    }
  }
  return reward[0] == rhs.reward[0] && reward[1] == rhs.reward[1];
}

std::vector<Violation> validate_domain(const Domain& d) {
  std::vector<Violation> out;
  if (d.states.empty()) out.push_back({"states", "", "no states"});
  for (Agent a : {Agent::kI, Agent::kJ}) {
    if (d.actions[index(a)].empty())
      out.push_back({fmt::format("actions {}", agent_name(a)), "", "no actions"});
    if (d.observations[index(a)].empty())
      out.push_back({fmt::format("observations {}", agent_name(a)), "", "no observations"});
  }
  if (!out.empty()) return out;

  const int nja = d.num_joint_actions();
  if (static_cast<int>(d.transition.size()) != nja) {
    out.push_back({"transition", "", "wrong number of joint actions"});
    return out;
  }
  for (int ja = 0; ja < nja; ++ja) {
    check_stochastic_rows(d.transition[ja], "transition", joint_key(d, ja), d.states, out);
  }
  for (Agent a : {Agent::kI, Agent::kJ}) {
    std::string table = fmt::format("observation {}", agent_name(a));
    for (int ja = 0; ja < nja; ++ja) {
      check_stochastic_rows(d.observation[index(a)][ja], table, joint_key(d, ja), d.states,
                            out);
    }
    const Matrix& r = d.reward[index(a)];
    for (int ja = 0; ja < nja; ++ja) {
      for (int s = 0; s < d.num_states(); ++s) {
        if (!std::isfinite(r(ja, s))) {
          out.push_back({fmt::format("reward {}", agent_name(a)),
                         fmt::format("{} {}", joint_key(d, ja), d.states[s]), "missing entry"});
        }
      }
    }
  }
  return out;
}

std::string format_violation(const Violation& v) {
  return fmt::format("[{}] {}: {}", v.table, v.key, v.what);
}

Frame::Frame(Agent agent, std::shared_ptr<const Domain> domain, double discount, int horizon)
    : agent_(agent), domain_(std::move(domain)), discount_(discount), horizon_(horizon) {
  if (!domain_) throw ConfigError("frame requires a domain");
  if (!(discount_ >= 0.0 && discount_ < 1.0))
    throw ConfigError(fmt::format("discount {} outside [0,1)", discount_));
  if (horizon_ < 1) throw ConfigError(fmt::format("horizon {} < 1", horizon_));

  const int na = num_actions();
  const int no = num_other_actions();
  const double p_other = 1.0 / no;
  for (int a = 0; a < na; ++a) {
    Matrix t = Matrix::Zero(num_states(), num_states());
    Matrix o = Matrix::Zero(num_states(), num_observations());
    Vector r = Vector::Zero(num_states());
    for (int b = 0; b < no; ++b) {
      t += p_other * transition(a, b);
      o += p_other * observation(a, b);
      for (int s = 0; s < num_states(); ++s) r[s] += p_other * reward(s, a, b);
    }
    noisy_transition_.push_back(std::move(t));
    noisy_observation_.push_back(std::move(o));
    noisy_reward_.push_back(std::move(r));
  }
}

FramePtr make_frame(Agent agent, std::shared_ptr<const Domain> domain, double discount,
                    int horizon) {
  return std::make_shared<const Frame>(agent, std::move(domain), discount, horizon);
}

}  // namespace nestplan
