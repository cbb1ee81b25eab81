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

#include "nestplan/domain_io.h"

#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "nestplan/errors.h"

namespace nestplan {
namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& tok, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, fmt::format("bad number '{}'", tok));
  }
}

// Decimal, product of decimals, or a ratio of two decimals.
double parse_value(const std::string& tok, int line) {
  if (tok.find('*') != std::string::npos) {
    double v = 1.0;
    for (const auto& f : split_on(tok, '*')) v *= parse_number(f, line);
    return v;
  }
  if (auto slash = tok.find('/'); slash != std::string::npos) {
    return parse_number(tok.substr(0, slash), line) / parse_number(tok.substr(slash + 1), line);
  }
  return parse_number(tok, line);
}

struct KeySet {
  std::vector<int> members;
  bool explicit_key = true;
};

KeySet expand_key(const std::string& tok, const std::vector<std::string>& labels, int line,
                  std::string_view what) {
  KeySet k;
  if (tok == "*") {
    k.explicit_key = false;
    for (int n = 0; n < static_cast<int>(labels.size()); ++n) k.members.push_back(n);
    return k;
  }
  for (const auto& part : split_on(tok, '/')) {
    auto it = std::find(labels.begin(), labels.end(), part);
    if (it == labels.end()) throw ParseError(line, fmt::format("unknown {} '{}'", what, part));
    k.members.push_back(static_cast<int>(it - labels.begin()));
  }
  return k;
}

enum class Section {
  kNone, kName, kStates, kActionsI, kActionsJ, kObservationsI, kObservationsJ,
  kTransition, kObservationI, kObservationJ, kRewardI, kRewardJ
};

std::optional<Section> section_from(const std::string& header) {
  static const std::pair<const char*, Section> kNames[] = {
      {"name", Section::kName},
      {"states", Section::kStates},
      {"actions i", Section::kActionsI},
      {"actions j", Section::kActionsJ},
      {"observations i", Section::kObservationsI},
      {"observations j", Section::kObservationsJ},
      {"transition", Section::kTransition},
      {"observation i", Section::kObservationI},
      {"observation j", Section::kObservationJ},
      {"reward i", Section::kRewardI},
      {"reward j", Section::kRewardJ},
  };
  for (const auto& [name, sec] : kNames) {
    if (header == name) return sec;
  }
  return std::nullopt;
}

struct TableRow {
  int line;
  std::vector<std::string> tokens;
};

}  // namespace

Domain parse_domain(std::string_view text) {
  std::string name;
  std::vector<std::string> states;
  std::array<std::vector<std::string>, 2> actions, observations;
  std::vector<TableRow> transition_rows;
  std::array<std::vector<TableRow>, 2> observation_rows, reward_rows;

  Section section = Section::kNone;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = raw.find_last_not_of(" \t\r");
    std::string line = raw.substr(first, last - first + 1);

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      std::string header = line.substr(1, line.size() - 2);
      auto parts = split_ws(header);
      std::string normalized;
      for (const auto& p : parts) normalized += (normalized.empty() ? "" : " ") + p;
      auto sec = section_from(normalized);
      if (!sec) throw ParseError(line_no, fmt::format("unknown section [{}]", header));
      section = *sec;
      continue;
    }

    auto toks = split_ws(line);
    switch (section) {
      case Section::kNone:
        throw ParseError(line_no, "content before the first section");
      case Section::kName:
        if (toks.size() != 1) throw ParseError(line_no, "name must be a single identifier");
        name = toks[0];
        break;
      case Section::kStates:
        states.insert(states.end(), toks.begin(), toks.end());
        break;
      case Section::kActionsI:
        actions[0].insert(actions[0].end(), toks.begin(), toks.end());
        break;
      case Section::kActionsJ:
        actions[1].insert(actions[1].end(), toks.begin(), toks.end());
        break;
      case Section::kObservationsI:
        observations[0].insert(observations[0].end(), toks.begin(), toks.end());
        break;
      case Section::kObservationsJ:
        observations[1].insert(observations[1].end(), toks.begin(), toks.end());
        break;
      case Section::kTransition:
        transition_rows.push_back({line_no, toks});
        break;
      case Section::kObservationI:
        observation_rows[0].push_back({line_no, toks});
        break;
      case Section::kObservationJ:
        observation_rows[1].push_back({line_no, toks});
        break;
      case Section::kRewardI:
        reward_rows[0].push_back({line_no, toks});
        break;
      case Section::kRewardJ:
        reward_rows[1].push_back({line_no, toks});
        break;
    }
  }

  if (states.empty()) throw ParseError(line_no, "missing [states]");
  for (int a = 0; a < 2; ++a) {
    if (actions[a].empty())
      throw ParseError(line_no, fmt::format("missing [actions {}]", a == 0 ? "i" : "j"));
    if (observations[a].empty())
      throw ParseError(line_no, fmt::format("missing [observations {}]", a == 0 ? "i" : "j"));
  }

  Domain d = Domain::with_labels(name.empty() ? "unnamed" : name, std::move(states),
                                 std::move(actions), std::move(observations));
  const int ns = d.num_states();
  const int nja = d.num_joint_actions();

  // Specificity of the row that last wrote each cell; -1 = unset.
  auto apply_rows = [&](const std::vector<TableRow>& rows, int arity, auto&& write) {
    std::vector<int> spec(static_cast<std::size_t>(nja) * ns, -1);
    for (const auto& row : rows) {
      if (static_cast<int>(row.tokens.size()) != 3 + arity) {
        throw ParseError(row.line, fmt::format("expected 3 keys and {} values, found {} tokens",
                                               arity, row.tokens.size()));
      }
      KeySet ki = expand_key(row.tokens[0], d.actions[0], row.line, "action of i");
      KeySet kj = expand_key(row.tokens[1], d.actions[1], row.line, "action of j");
      KeySet ks = expand_key(row.tokens[2], d.states, row.line, "state");
      int specificity = int{ki.explicit_key} + int{kj.explicit_key} + int{ks.explicit_key};
      Vector values(arity);
      for (int v = 0; v < arity; ++v) values[v] = parse_value(row.tokens[3 + v], row.line);
      for (int ai : ki.members) {
        for (int aj : kj.members) {
          for (int s : ks.members) {
            int ja = d.joint(ai, aj);
            int& cell = spec[static_cast<std::size_t>(ja) * ns + s];
            if (specificity < cell) continue;
            cell = specificity;
            write(ja, s, values);
          }
        }
      }
    }
  };

  apply_rows(transition_rows, ns, [&](int ja, int s, const Vector& v) {
    d.transition[ja].row(s) = v.transpose();
  });
  for (Agent a : {Agent::kI, Agent::kJ}) {
    apply_rows(observation_rows[index(a)], d.num_observations(a),
               [&](int ja, int s, const Vector& v) {
                 d.observation[index(a)][ja].row(s) = v.transpose();
               });
    apply_rows(reward_rows[index(a)], 1,
               [&](int ja, int s, const Vector& v) { d.reward[index(a)](ja, s) = v[0]; });
  }
  return d;
}

Domain load_domain(std::string_view text) {
  Domain d = parse_domain(text);
  auto report = validate_domain(d);
  if (!report.empty()) {
    std::string msg = fmt::format("domain '{}' failed validation:", d.name);
    for (const auto& v : report) msg += "\n  " + format_violation(v);
    throw ValidationError(msg);
  }
  return d;
}

Domain load_domain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open domain file '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return load_domain(buf.str());
}

std::string serialize_domain(const Domain& d) {
  std::string out;
  auto line = [&](const std::string& s) {
    out += s;
    out += '\n';
  };
  auto labels = [](const std::vector<std::string>& v) { return fmt::format("{}", fmt::join(v, " ")); };

  line("[name]");
  line(d.name);
  line("[states]");
  line(labels(d.states));
  for (Agent a : {Agent::kI, Agent::kJ}) {
    line(fmt::format("[actions {}]", agent_name(a)));
    line(labels(d.actions[index(a)]));
  }
  for (Agent a : {Agent::kI, Agent::kJ}) {
    line(fmt::format("[observations {}]", agent_name(a)));
    line(labels(d.observations[index(a)]));
  }
  auto for_each_key = [&](auto&& emit) {
    for (int ai = 0; ai < d.num_actions(Agent::kI); ++ai)
      for (int aj = 0; aj < d.num_actions(Agent::kJ); ++aj)
        for (int s = 0; s < d.num_states(); ++s) emit(ai, aj, s, d.joint(ai, aj));
  };
  auto row_text = [](const auto& row) {
    std::string s;
    for (Eigen::Index k = 0; k < row.size(); ++k) s += fmt::format(" {}", row[k]);
    return s;
  };
  line("[transition]");
  for_each_key([&](int ai, int aj, int s, int ja) {
    line(fmt::format("{} {} {}{}", d.actions[0][ai], d.actions[1][aj], d.states[s],
                     row_text(d.transition[ja].row(s))));
  });
  for (Agent a : {Agent::kI, Agent::kJ}) {
    line(fmt::format("[observation {}]", agent_name(a)));
    for_each_key([&](int ai, int aj, int s, int ja) {
      line(fmt::format("{} {} {}{}", d.actions[0][ai], d.actions[1][aj], d.states[s],
                       row_text(d.observation[index(a)][ja].row(s))));
    });
  }
  for (Agent a : {Agent::kI, Agent::kJ}) {
    line(fmt::format("[reward {}]", agent_name(a)));
    for_each_key([&](int ai, int aj, int s, int ja) {
      line(fmt::format("{} {} {} {}", d.actions[0][ai], d.actions[1][aj], d.states[s],
                       d.reward[index(a)](ja, s)));
    });
  }
  return out;
}

}  // namespace nestplan
