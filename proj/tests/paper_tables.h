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

#ifndef NESTPLAN_TESTS_PAPER_TABLES_H_
#define NESTPLAN_TESTS_PAPER_TABLES_H_

#include <string>
#include <vector>

#include "nestplan/domain.h"

namespace nestplan::testing {

// One published table entry, addressed by labels.
struct Entry {
  enum Kind { kTransition, kObservationI, kObservationJ, kRewardI, kRewardJ } kind;
  const char* a_i;
  const char* a_j;
  const char* state;
  const char* column;  // next state or observation; unused for rewards
  double value;
};

// Multiagent tiger, written out from the published table.
inline const std::vector<Entry>& tiger_entries() {
  static const std::vector<Entry> kEntries = {
      {Entry::kTransition, "OL", "L", "TL", "TL", 0.5},
      {Entry::kTransition, "OR", "OL", "TR", "TL", 0.5},
      {Entry::kTransition, "L", "OR", "TL", "TR", 0.5},
      {Entry::kTransition, "L", "OL", "TR", "TR", 0.5},
      {Entry::kTransition, "L", "L", "TL", "TL", 1.0},
      {Entry::kTransition, "L", "L", "TL", "TR", 0.0},
      {Entry::kTransition, "L", "L", "TR", "TR", 1.0},
      {Entry::kRewardI, "OR", "OR", "TL", "", 10},
      {Entry::kRewardI, "OR", "OR", "TR", "", -100},
      {Entry::kRewardI, "OL", "OL", "TL", "", -100},
      {Entry::kRewardI, "OR", "OL", "TL", "", 10},
      {Entry::kRewardI, "OL", "OR", "TR", "", 10},
      {Entry::kRewardI, "L", "L", "TR", "", -1},
      {Entry::kRewardI, "L", "OR", "TL", "", -1},
      {Entry::kRewardI, "OR", "L", "TL", "", 10},
      {Entry::kRewardI, "OL", "L", "TL", "", -100},
      {Entry::kRewardJ, "OR", "OL", "TL", "", -100},
      {Entry::kRewardJ, "OL", "OR", "TL", "", 10},
      {Entry::kRewardJ, "L", "OR", "TL", "", 10},
      {Entry::kRewardJ, "L", "OR", "TR", "", -100},
      {Entry::kRewardJ, "OR", "L", "TL", "", -1},
      {Entry::kRewardJ, "L", "OL", "TL", "", -100},
      {Entry::kObservationI, "L", "L", "TL", "GL,S", 0.765},
      {Entry::kObservationI, "L", "L", "TL", "GL,CL", 0.0425},
      {Entry::kObservationI, "L", "L", "TR", "GR,S", 0.765},
      {Entry::kObservationI, "L", "L", "TR", "GL,S", 0.135},
      {Entry::kObservationI, "L", "OL", "TL", "GL,CL", 0.765},
      {Entry::kObservationI, "L", "OL", "TR", "GR,CL", 0.765},
      {Entry::kObservationI, "L", "OR", "TL", "GL,CR", 0.765},
      {Entry::kObservationI, "L", "OR", "TR", "GL,CR", 0.135},
      {Entry::kObservationI, "OL", "L", "TR", "GR,CR", 1.0 / 6},
      {Entry::kObservationI, "OR", "OR", "TL", "GL,S", 1.0 / 6},
      {Entry::kObservationJ, "L", "L", "TL", "GL,S", 0.765},
      {Entry::kObservationJ, "OL", "L", "TL", "GL,CL", 0.765},
      {Entry::kObservationJ, "OR", "L", "TR", "GR,CR", 0.765},
      {Entry::kObservationJ, "OR", "L", "TL", "GR,S", 0.0075},
      {Entry::kObservationJ, "L", "OL", "TL", "GL,S", 1.0 / 6},
  };
  return kEntries;
}

// Multiagent machine maintenance, written out from the published table.
inline const std::vector<Entry>& mm_entries() {
  static const std::vector<Entry> kEntries = {
      {Entry::kTransition, "M", "M", "0-fail", "0-fail", 0.81},
      {Entry::kTransition, "M", "E", "0-fail", "1-fail", 0.18},
      {Entry::kTransition, "E", "E", "0-fail", "2-fail", 0.01},
      {Entry::kTransition, "E", "M", "1-fail", "1-fail", 0.9},
      {Entry::kTransition, "M", "M", "1-fail", "2-fail", 0.1},
      {Entry::kTransition, "E", "M", "2-fail", "2-fail", 1.0},
      {Entry::kTransition, "M", "I", "1-fail", "0-fail", 0.95},
      {Entry::kTransition, "E", "R", "2-fail", "2-fail", 0.05},
      {Entry::kTransition, "I", "M", "0-fail", "0-fail", 1.0},
      {Entry::kTransition, "R", "E", "1-fail", "1-fail", 0.05},
      {Entry::kTransition, "R", "I", "2-fail", "0-fail", 0.95},
      {Entry::kObservationI, "M", "E", "2-fail", "defective", 0.5},
      {Entry::kObservationI, "M", "R", "0-fail", "not-defective", 0.95},
      {Entry::kObservationI, "E", "M", "0-fail", "not-defective", 0.75},
      {Entry::kObservationI, "E", "M", "1-fail", "not-defective", 0.5},
      {Entry::kObservationI, "E", "E", "2-fail", "defective", 0.75},
      {Entry::kObservationI, "E", "I", "1-fail", "defective", 0.05},
      {Entry::kObservationI, "R", "M", "2-fail", "not-defective", 0.95},
      {Entry::kObservationJ, "E", "M", "1-fail", "defective", 0.5},
      {Entry::kObservationJ, "I", "M", "0-fail", "not-defective", 0.95},
      {Entry::kObservationJ, "M", "E", "0-fail", "defective", 0.25},
      {Entry::kObservationJ, "E", "E", "2-fail", "defective", 0.75},
      {Entry::kObservationJ, "R", "E", "1-fail", "not-defective", 0.95},
      {Entry::kObservationJ, "M", "R", "2-fail", "defective", 0.05},
      {Entry::kRewardI, "M", "M", "0-fail", "", 1.805},
      {Entry::kRewardI, "M", "M", "2-fail", "", 0.5},
      {Entry::kRewardI, "M", "E", "1-fail", "", 0.7},
      {Entry::kRewardI, "M", "I", "0-fail", "", 0.4025},
      {Entry::kRewardI, "M", "R", "0-fail", "", -1.0975},
      {Entry::kRewardI, "E", "E", "1-fail", "", 0.45},
      {Entry::kRewardI, "E", "I", "2-fail", "", -2.5},
      {Entry::kRewardI, "E", "R", "0-fail", "", -1.3475},
      {Entry::kRewardI, "I", "I", "1-fail", "", -3.0},
      {Entry::kRewardI, "I", "R", "2-fail", "", -4.5},
      {Entry::kRewardI, "R", "R", "1-fail", "", -4},
      {Entry::kRewardJ, "E", "M", "0-fail", "", 1.555},
      {Entry::kRewardJ, "R", "E", "2-fail", "", -2.0},
      {Entry::kRewardJ, "I", "M", "1-fail", "", -1.025},
  };
  return kEntries;
}

// Looks an entry up in a built domain.
inline double lookup(const Domain& d, const Entry& e) {
  const int ja = d.joint(d.action_index(Agent::kI, e.a_i), d.action_index(Agent::kJ, e.a_j));
  const int s = d.state_index(e.state);
  switch (e.kind) {
    case Entry::kTransition:
      return d.transition[ja](s, d.state_index(e.column));
    case Entry::kObservationI:
      return d.observation[0][ja](s, d.observation_index(Agent::kI, e.column));
    case Entry::kObservationJ:
      return d.observation[1][ja](s, d.observation_index(Agent::kJ, e.column));
    case Entry::kRewardI:
      return d.reward[0](ja, s);
    case Entry::kRewardJ:
      return d.reward[1](ja, s);
  }
  return 0.0;
}

inline std::string describe(const Entry& e) {
  static const char* kNames[] = {"T", "O_i", "O_j", "R_i", "R_j"};
  return std::string(kNames[e.kind]) + "(<" + e.a_i + "," + e.a_j + "> " + e.state +
         (e.column[0] ? std::string(" -> ") + e.column : std::string()) + ")";
}

}  // namespace nestplan::testing

#endif  // NESTPLAN_TESTS_PAPER_TABLES_H_
