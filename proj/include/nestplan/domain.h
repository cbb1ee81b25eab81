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

#ifndef NESTPLAN_DOMAIN_H_
#define NESTPLAN_DOMAIN_H_

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace nestplan {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A level-0 belief: a probability vector over physical states.
using Belief = Vector;

// Distribution over one agent's own actions.
using ActionDistribution = Vector;

enum class Agent : int { kI = 0, kJ = 1 };

constexpr Agent other(Agent a) { return a == Agent::kI ? Agent::kJ : Agent::kI; }
constexpr int index(Agent a) { return static_cast<int>(a); }
constexpr const char* agent_name(Agent a) { return a == Agent::kI ? "i" : "j"; }

inline constexpr double kTableTolerance = 1e-6;
inline constexpr double kInternalTolerance = 1e-9;

// Two-agent physical model: states, per-agent actions and observations, and
// the joint-action transition, observation and reward tables.
//
// Joint actions are indexed a_i * |A_j| + a_j. Transition matrices are
// row-stochastic with rows indexed by the current state. Observation
// matrices have rows indexed by the *next* state and columns by that agent's
// observations. Unset entries are NaN, which validate_domain reports as
// missing rows.
struct Domain {
  std::string name;
  std::vector<std::string> states;
  std::array<std::vector<std::string>, 2> actions;
  std::array<std::vector<std::string>, 2> observations;
  std::vector<Matrix> transition;
  std::array<std::vector<Matrix>, 2> observation;
  // Rows are joint actions, columns states.
  std::array<Matrix, 2> reward;

  // Allocates NaN-filled tables for the given label sets.
  static Domain with_labels(std::string name, std::vector<std::string> states,
                            std::array<std::vector<std::string>, 2> actions,
                            std::array<std::vector<std::string>, 2> observations);

  int num_states() const { return static_cast<int>(states.size()); }
  int num_actions(Agent a) const { return static_cast<int>(actions[index(a)].size()); }
  int num_observations(Agent a) const {
    return static_cast<int>(observations[index(a)].size());
  }
  int num_joint_actions() const { return num_actions(Agent::kI) * num_actions(Agent::kJ); }
  int joint(int a_i, int a_j) const { return a_i * num_actions(Agent::kJ) + a_j; }
  // Joint index when agent k plays `own` and the other agent plays `theirs`.
  int joint_for(Agent k, int own, int theirs) const {
    return k == Agent::kI ? joint(own, theirs) : joint(theirs, own);
  }

  int state_index(std::string_view label) const;
  int action_index(Agent a, std::string_view label) const;
  int observation_index(Agent a, std::string_view label) const;

  double min_reward(Agent a) const { return reward[index(a)].minCoeff(); }
  double max_reward(Agent a) const { return reward[index(a)].maxCoeff(); }

  bool operator==(const Domain& rhs) const;
};

struct Violation {
  std::string table;
  std::string key;
  std::string what;
};

// Checks stochasticity, entry ranges and completeness of every table.
// Returns an empty list iff the domain is well formed.
std::vector<Violation> validate_domain(const Domain& d);

std::string format_violation(const Violation& v);

// One agent's model parameters other than its beliefs. Immutable; the
// noise-marginalized tables used by level-0 reasoning (the other agent's
// action taken as uniform noise) are computed once at construction.
class Frame {
 public:
  Frame(Agent agent, std::shared_ptr<const Domain> domain, double discount, int horizon);

  Agent agent() const { return agent_; }
  const Domain& domain() const { return *domain_; }
  const std::shared_ptr<const Domain>& domain_ptr() const { return domain_; }
  double discount() const { return discount_; }
  int horizon() const { return horizon_; }

  int num_states() const { return domain_->num_states(); }
  int num_actions() const { return domain_->num_actions(agent_); }
  int num_other_actions() const { return domain_->num_actions(other(agent_)); }
  int num_observations() const { return domain_->num_observations(agent_); }
  int num_other_observations() const { return domain_->num_observations(other(agent_)); }

  int joint(int own, int theirs) const { return domain_->joint_for(agent_, own, theirs); }
  const Matrix& transition(int own, int theirs) const {
    return domain_->transition[joint(own, theirs)];
  }
  const Matrix& observation(int own, int theirs) const {
    return domain_->observation[index(agent_)][joint(own, theirs)];
  }
  const Matrix& other_observation(int own, int theirs) const {
    return domain_->observation[index(other(agent_))][joint(own, theirs)];
  }
  double reward(int state, int own, int theirs) const {
    return domain_->reward[index(agent_)](joint(own, theirs), state);
  }

  const Matrix& noisy_transition(int own) const { return noisy_transition_[own]; }
  const Matrix& noisy_observation(int own) const { return noisy_observation_[own]; }
  // Expected reward per state with the other's action uniform.
  const Vector& noisy_reward(int own) const { return noisy_reward_[own]; }

  double min_reward() const { return domain_->min_reward(agent_); }
  double max_reward() const { return domain_->max_reward(agent_); }

 private:
  Agent agent_;
  std::shared_ptr<const Domain> domain_;
  double discount_;
  int horizon_;
  std::vector<Matrix> noisy_transition_;
  std::vector<Matrix> noisy_observation_;
  std::vector<Vector> noisy_reward_;
};

using FramePtr = std::shared_ptr<const Frame>;

FramePtr make_frame(Agent agent, std::shared_ptr<const Domain> domain, double discount,
                    int horizon);

}  // namespace nestplan

#endif  // NESTPLAN_DOMAIN_H_
