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

#include <array>
#include <cstdint>
#include <string>

#include "dltr/utfm.hpp"

namespace dltr {

// Weight of each state visited by a trace, by phase. Operational states are
// weighted highest because they are active while the flight executes.
struct PositionWeights {
  std::array<std::uint64_t, 3> per_phase{1, 4, 2};

  std::uint64_t weight(Phase p) const { return per_phase[static_cast<std::size_t>(p)]; }
};

struct WeightSum {
  std::uint64_t weight_sum = 0;   // S
  std::uint64_t transitions = 0;  // N
};

struct StakeRecord {
  std::string role;
  double trace_log2_prob = 0.0;
  std::uint64_t weight_sum = 0;
  std::uint64_t transitions = 0;
  double ice = 0.0;
  std::uint64_t stake = 1;
};

// Shannon entropy in bits; zero-probability outcomes contribute nothing.
double trace_entropy(const ResolutionDistribution& dist);

// Throws DomainError unless the trace starts in a tactical state and ends in a
// strategic one.
WeightSum path_weight_sum(const Trace& trace, const PositionWeights& weights = {});

// -S * log2 t. Throws InfiniteStake for a zero-probability trace.
double information_cross_entropy(std::uint64_t weight_sum, double trace_log2_prob);
double information_cross_entropy(const Trace& trace, const PositionWeights& weights = {});

// max(1, floor(ice)).
std::uint64_t voting_stake(double ice);

StakeRecord make_stake_record(std::string role, const Trace& trace, const PositionWeights& weights = {});

}  // namespace dltr
