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

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dltr/utfm.hpp"

// Exhaustive path enumeration over every state sequence, pruning only
// branches whose probability is already exactly zero.
namespace dltr::oracle {

// Sum over accepting paths of initial * product of steps.
inline double acceptance(const Utfm& m, const std::vector<std::string>& x) {
  const auto sym = m.encode(x);
  const std::size_t S = m.num_states();
  double total = 0.0;
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t s, double p) {
    if (i == sym.size()) {
      if (m.accepting(s)) total += p;
      return;
    }
    for (std::size_t t = 0; t < S; ++t) {
      const double q = m.transition(s, sym[i], t);
      if (q > 0.0) walk(i + 1, t, p * q);
    }
  };
  for (std::size_t s = 0; s < S; ++s) {
    if (m.initial(s) > 0.0) walk(0, s, m.initial(s));
  }
  return total;
}

// Generative likelihood: the departing state emits, then transitions.
inline double likelihood(const Utfm& m, const std::vector<std::string>& x) {
  const auto sym = m.encode(x);
  const std::size_t S = m.num_states();
  double total = 0.0;
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t s, double p) {
    if (i == sym.size()) {
      total += p;
      return;
    }
    for (std::size_t t = 0; t < S; ++t) {
      const double q = m.emission(s, sym[i]) * m.transition(s, sym[i], t);
      if (q > 0.0) walk(i + 1, t, p * q);
    }
  };
  for (std::size_t s = 0; s < S; ++s) {
    if (m.initial(s) > 0.0) walk(0, s, m.initial(s));
  }
  return total;
}

struct Best {
  std::vector<std::size_t> path;
  double probability = 0.0;
  double runner_up = 0.0;  // best probability among all other paths
};

// Argmax over paths from the initial support (steps only, initial excluded),
// visiting paths in lexicographic order and keeping the first maximum.
inline std::optional<Best> argmax(const Utfm& m, const std::vector<std::string>& x, bool accepting_only) {
  const auto sym = m.encode(x);
  const std::size_t S = m.num_states();
  Best best;
  bool found = false;
  std::vector<std::size_t> path;
  std::function<void(std::size_t, double)> walk = [&](std::size_t i, double p) {
    const std::size_t s = path.back();
    if (i == sym.size()) {
      if (accepting_only && !m.accepting(s)) return;
      if (!found || p > best.probability) {
        if (found) best.runner_up = std::max(best.runner_up, best.probability);
        best.path = path;
        best.probability = p;
        found = true;
      } else {
        best.runner_up = std::max(best.runner_up, p);
      }
      return;
    }
    for (std::size_t t = 0; t < S; ++t) {
      const double q = m.transition(s, sym[i], t);
      if (q <= 0.0) continue;
      path.push_back(t);
      walk(i + 1, p * q);
      path.pop_back();
    }
  };
  for (std::size_t s = 0; s < S; ++s) {
    if (m.initial(s) <= 0.0) continue;
    path.assign(1, s);
    walk(0, 1.0);
  }
  if (!found) return std::nullopt;
  return best;
}

}  // namespace dltr::oracle
