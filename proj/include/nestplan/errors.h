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

#ifndef NESTPLAN_ERRORS_H_
#define NESTPLAN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace nestplan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Empty particle sets, N = 0, and similar inputs with nothing to work on.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Every importance weight came out zero: the observation is inconsistent
// with every particle.
class ParticleDepletionError : public Error {
 public:
  using Error::Error;
};

// An exact update produced zero posterior mass.
class InconsistentObservationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A configured node or memory budget would be exceeded.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

// Nesting levels of a particle set and its contents disagree.
class LevelMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace nestplan

#endif  // NESTPLAN_ERRORS_H_
