/*
 * Copyright 2026 The dlt-recovery Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dltr {

// Input outside an operation's domain: unknown state/symbol, malformed trace,
// zero pseudocount where a positive one is required.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NoAdmissiblePath : public DomainError {
 public:
  using DomainError::DomainError;
};

class UndefinedDistribution : public DomainError {
 public:
  using DomainError::DomainError;
};

// Stake would be infinite (trace probability 0).
class InfiniteStake : public DomainError {
 public:
  using DomainError::DomainError;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Text-format parse failure; line is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& what)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace dltr
