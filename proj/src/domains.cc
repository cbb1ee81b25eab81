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

#include "nestplan/domains.h"

#include <algorithm>
#include <array>
#include <sstream>

#include <fmt/format.h>

#include "nestplan/domain_io.h"
#include "nestplan/errors.h"

namespace nestplan {
namespace {

constexpr const char* kTigerHead = R"(
[name]
tiger
[states]
TL TR
[actions i]
OL OR L
[actions j]
OL OR L
[observations i]
GL,CL GL,CR GL,S GR,CL GR,CR GR,S
[transition]
OL *  *   0.5 0.5
OR *  *   0.5 0.5
*  OL *   0.5 0.5
*  OR *   0.5 0.5
L  L  TL  1.0 0
L  L  TR  0   1.0
[observation i]
L  L  TL  0.85*0.05 0.85*0.05 0.85*0.9  0.15*0.05 0.15*0.05 0.15*0.9
L  L  TR  0.15*0.05 0.15*0.05 0.15*0.9  0.85*0.05 0.85*0.05 0.85*0.9
L  OL TL  0.85*0.9  0.85*0.05 0.85*0.05 0.15*0.9  0.15*0.05 0.15*0.05
L  OL TR  0.15*0.9  0.15*0.05 0.15*0.05 0.85*0.9  0.85*0.05 0.85*0.05
L  OR TL  0.85*0.05 0.85*0.9  0.85*0.05 0.15*0.05 0.15*0.9  0.15*0.05
L  OR TR  0.15*0.05 0.15*0.9  0.15*0.05 0.85*0.05 0.85*0.9  0.85*0.05
OL *  *   1/6 1/6 1/6 1/6 1/6 1/6
OR *  *   1/6 1/6 1/6 1/6 1/6 1/6
[reward i]
OR OR TL 10
OR OR TR -100
OL OL TL -100
OL OL TR 10
OR OL TL 10
OR OL TR -100
OL OR TL -100
OL OR TR 10
L  L  *  -1
L  OR *  -1
OR L  TL 10
OR L  TR -100
L  OL *  -1
OL L  TL -100
OL L  TR 10
[reward j]
OR OR TL 10
OR OR TR -100
OL OL TL -100
OL OL TR 10
OR OL TL -100
OR OL TR 10
OL OR TL 10
OL OR TR -100
L  L  *  -1
L  OR TL 10
L  OR TR -100
OR L  *  -1
L  OL TL -100
L  OL TR 10
OL L  *  -1
)";

constexpr const char* kTigerObservationJ = R"(
[observations j]
GL,CL GL,CR GL,S GR,CL GR,CR GR,S
[observation j]
L  L  TL  0.85*0.05 0.85*0.05 0.85*0.9  0.15*0.05 0.15*0.05 0.15*0.9
L  L  TR  0.15*0.05 0.15*0.05 0.15*0.9  0.85*0.05 0.85*0.05 0.85*0.9
OL L  TL  0.85*0.9  0.85*0.05 0.85*0.05 0.15*0.9  0.15*0.05 0.15*0.05
OL L  TR  0.15*0.9  0.15*0.05 0.15*0.05 0.85*0.9  0.85*0.05 0.85*0.05
OR L  TL  0.85*0.05 0.85*0.9  0.85*0.05 0.15*0.05 0.15*0.9  0.15*0.05
OR L  TR  0.15*0.05 0.15*0.9  0.15*0.05 0.85*0.05 0.85*0.9  0.85*0.05
*  OL *   1/6 1/6 1/6 1/6 1/6 1/6
*  OR *   1/6 1/6 1/6 1/6 1/6 1/6
)";

// j hears only the growl; creaks are summed out of the table above.
constexpr const char* kTigerGrowlOnlyObservationJ = R"(
[observations j]
GL GR
[observation j]
L/OL/OR L  TL  0.85 0.15
L/OL/OR L  TR  0.15 0.85
*       OL *   0.5  0.5
*       OR *   0.5  0.5
)";

constexpr const char* kMachineMaintenance = R"(
[name]
mm
[states]
0-fail 1-fail 2-fail
[actions i]
M E I R
[actions j]
M E I R
[observations i]
not-defective defective
[observations j]
not-defective defective
[transition]
M/E M/E 0-fail  0.81 0.18 0.01
M/E M/E 1-fail  0.0  0.9  0.1
M/E M/E 2-fail  0.0  0.0  1.0
M   I/R 0-fail  1.0  0.0  0.0
M   I/R 1-fail  0.95 0.05 0.0
M   I/R 2-fail  0.95 0.0  0.05
E   I/R 0-fail  1.0  0.0  0.0
E   I/R 1-fail  0.95 0.05 0.0
E   I/R 2-fail  0.95 0.0  0.05
I/R *   0-fail  1.0  0.0  0.0
I/R *   1-fail  0.95 0.05 0.0
I/R *   2-fail  0.95 0.0  0.05
[observation i]
M   M/E *       0.5  0.5
M   I/R *       0.95 0.05
E   M/E 0-fail  0.75 0.25
E   M/E 1-fail  0.5  0.5
E   M/E 2-fail  0.25 0.75
E   I/R *       0.95 0.05
I/R *   *       0.95 0.05
[observation j]
M/E M   *       0.5  0.5
I/R M   *       0.95 0.05
M/E E   0-fail  0.75 0.25
M/E E   1-fail  0.5  0.5
M/E E   2-fail  0.25 0.75
I/R E   *       0.95 0.05
*   I/R *       0.95 0.05
[reward i]
M M 0-fail 1.805
M M 1-fail 0.95
M M 2-fail 0.5
M E 0-fail 1.555
M E 1-fail 0.7
M E 2-fail 0.25
M I 0-fail 0.4025
M I 1-fail -1.025
M I 2-fail -2.25
M R 0-fail -1.0975
M R 1-fail -1.525
M R 2-fail -1.75
E M 0-fail 1.555
E M 1-fail 0.7
E M 2-fail 0.25
E E 0-fail 1.305
E E 1-fail 0.45
E E 2-fail 0.0
E I 0-fail 0.1525
E I 1-fail -1.275
E I 2-fail -2.5
E R 0-fail -1.3475
E R 1-fail -1.775
E R 2-fail -2.0
I M 0-fail 0.4025
I M 1-fail -1.025
I M 2-fail -2.25
I E 0-fail 0.1525
I E 1-fail -1.275
I E 2-fail -2.5
I I 0-fail -1.0
I I 1-fail -3.00
I I 2-fail -5.00
I R 0-fail -2.5
I R 1-fail -3.5
I R 2-fail -4.5
R M 0-fail -1.0975
R M 1-fail -1.525
R M 2-fail -1.75
R E 0-fail -1.3475
R E 1-fail -1.775
R E 2-fail -2.0
R I 0-fail -2.5
R I 1-fail -3.5
R I 2-fail -4.5
R R *      -4
)";

// The game is cooperative: both agents receive the same payoff.
std::string mm_text() {
  std::string text = kMachineMaintenance;
  auto pos = text.find("[reward i]");
  return text + "[reward j]" + text.substr(pos + std::string("[reward i]").size());
}

constexpr int kUavLocations = 6;  // 3 rows x {side, center}
constexpr std::array<const char*, 5> kUavActions = {"move_N", "move_S", "move_E", "move_W",
                                                    "listen"};

int uav_row(int loc) { return loc / 2; }
int uav_col(int loc) { return loc % 2; }

// Deterministic move on the abstract lattice. East and west both toggle
// between a side column and the center; north and south clip at the edges.
int uav_move(int loc, int action) {
  int r = uav_row(loc), c = uav_col(loc);
  switch (action) {
    case 0: r = std::max(0, r - 1); break;
    case 1: r = std::min(2, r + 1); break;
    case 2:
    case 3: c = 1 - c; break;
    default: break;
  }
  return r * 2 + c;
}

std::string uav_location_label(int loc) {
  static constexpr std::array<const char*, 3> kRows = {"top", "mid", "bot"};
  return fmt::format("{}-{}", kRows[uav_row(loc)], uav_col(loc) == 0 ? "side" : "center");
}

}  // namespace

Domain build_tiger() {
  return load_domain(std::string(kTigerHead) + kTigerObservationJ);
}

Domain build_tiger_growl_only() {
  Domain d = load_domain(std::string(kTigerHead) + kTigerGrowlOnlyObservationJ);
  d.name = "tiger-growl-only";
  return d;
}

Domain build_mm() { return load_domain(mm_text()); }

Domain build_uav(const UavConfig& cfg) {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(cfg.obs_accuracy) || !in_unit(cfg.target_alert)) {
    throw ConfigError(fmt::format("uav probabilities must lie in [0,1] (obs {}, alert {})",
                                  cfg.obs_accuracy, cfg.target_alert));
  }
  std::vector<std::string> states;
  for (int u = 0; u < kUavLocations; ++u)
    for (int t = 0; t < kUavLocations; ++t)
      states.push_back(fmt::format("u:{}|t:{}", uav_location_label(u), uav_location_label(t)));
  std::vector<std::string> acts(kUavActions.begin(), kUavActions.end());
  std::vector<std::string> rows = {"TR", "CR", "BR"};

  Domain d = Domain::with_labels("uav", states, {acts, acts}, {rows, rows});
  const int na = static_cast<int>(acts.size());
  const int listen = na - 1;
  auto state_of = [](int u, int t) { return u * kUavLocations + t; };
  const double wrong = (1.0 - cfg.obs_accuracy) / 2.0;

  for (int au = 0; au < na; ++au) {
    for (int at = 0; at < na; ++at) {
      const int ja = d.joint(au, at);
      Matrix& trans = d.transition[ja];
      trans.setZero();
      for (int u = 0; u < kUavLocations; ++u) {
        for (int t = 0; t < kUavLocations; ++t) {
          const int s = state_of(u, t);
          if (u == t) {
            trans(s, s) = 1.0;
            d.reward[0](ja, s) = 0.0;
            d.reward[1](ja, s) = 0.0;
            continue;
          }
          const int u2 = uav_move(u, au);
          double p_spot = 0.0;
          if (at == listen) {
            trans(s, state_of(u2, t)) += 1.0;
            p_spot = (u2 == t) ? 1.0 : 0.0;
          } else {
            const int t2 = uav_move(t, at);
            trans(s, state_of(u2, t2)) += cfg.target_alert;
            trans(s, state_of(u2, t)) += 1.0 - cfg.target_alert;
            p_spot = cfg.target_alert * (u2 == t2) + (1.0 - cfg.target_alert) * (u2 == t);
          }
          const double r = cfg.spot_reward * p_spot + cfg.step_reward;
          d.reward[0](ja, s) = r;
          d.reward[1](ja, s) = -r;
        }
      }
      for (int u = 0; u < kUavLocations; ++u) {
        for (int t = 0; t < kUavLocations; ++t) {
          const int s = state_of(u, t);
          d.observation[0][ja].row(s).setConstant(wrong);
          d.observation[0][ja](s, uav_row(t)) = cfg.obs_accuracy;
          d.observation[1][ja].row(s).setConstant(wrong);
          d.observation[1][ja](s, uav_row(u)) = cfg.obs_accuracy;
        }
      }
    }
  }
  return d;
}

std::shared_ptr<const Domain> builtin_domain(const std::string& name) {
  if (name == "tiger") return std::make_shared<const Domain>(build_tiger());
  if (name == "tiger-growl-only") return std::make_shared<const Domain>(build_tiger_growl_only());
  if (name == "mm") return std::make_shared<const Domain>(build_mm());
  if (name == "uav") return std::make_shared<const Domain>(build_uav());
  throw ConfigError(fmt::format("unknown built-in domain '{}'", name));
}

const std::vector<std::string>& builtin_domain_names() {
  static const std::vector<std::string> kNames = {"tiger", "tiger-growl-only", "mm", "uav"};
  return kNames;
}

}  // namespace nestplan
