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

#ifndef NESTPLAN_DOMAINS_H_
#define NESTPLAN_DOMAINS_H_

#include <memory>
#include <string>
#include <vector>

#include "nestplan/domain.h"

namespace nestplan {

// Two-agent tiger: states TL/TR, actions OL/OR/L, observations <growl,creak>.
Domain build_tiger();

// Tiger with j's creak dimension marginalized out, so j observes GL or GR.
Domain build_tiger_growl_only();

// Two-agent machine maintenance: 0/1/2 failed components, actions M/E/I/R.
Domain build_mm();

struct UavConfig {
  // Probability the reported row is the true one; the rest is split evenly.
  double obs_accuracy = 0.8;
  // Chance that a target's move actually executes on a given step.
  double target_alert = 0.1;
  double spot_reward = 1.0;
  double step_reward = 0.0;
};

// UAV reconnaissance on a 3x3 theater with columns abstracted to
// {side, center}: 6 locations per agent, 36 states. Co-located states are
// absorbing with zero reward; the target's reward is the negation of i's.
Domain build_uav(const UavConfig& cfg = {});

// Built-in domains by name: tiger, tiger-growl-only, mm, uav.
std::shared_ptr<const Domain> builtin_domain(const std::string& name);
const std::vector<std::string>& builtin_domain_names();

}  // namespace nestplan

#endif  // NESTPLAN_DOMAINS_H_
