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

#ifndef NESTPLAN_DOMAIN_IO_H_
#define NESTPLAN_DOMAIN_IO_H_

#include <string>
#include <string_view>

#include "nestplan/domain.h"

namespace nestplan {

// Domain files are line-oriented and sectioned:
//
//   [name]            one identifier
//   [states]          state labels
//   [actions i]       [actions j]
//   [observations i]  [observations j]
//   [transition]      <a_i> <a_j> <state> <p(s'_1)> ... <p(s'_n)>
//   [observation i]   <a_i> <a_j> <next state> <p(o_1)> ... <p(o_m)>
//   [observation j]
//   [reward i]        <a_i> <a_j> <state> <r>
//   [reward j]
//
// Row keys accept `*` (any) and `A/B/...` (any of the listed labels). When
// rows overlap, the one naming more key positions explicitly wins; ties go
// to the later row. Values may be written as decimals, products (0.85*0.05)
// or ratios (1/6). `#` starts a comment.

// Parses without validating; structural errors throw ParseError.
Domain parse_domain(std::string_view text);

// parse_domain followed by validate_domain; violations throw ValidationError
// naming every offending row.
Domain load_domain(std::string_view text);
Domain load_domain_file(const std::string& path);

// Canonical form: every (joint action, state) row written explicitly, values
// in shortest round-trip decimal.
std::string serialize_domain(const Domain& d);

}  // namespace nestplan

#endif  // NESTPLAN_DOMAIN_IO_H_
