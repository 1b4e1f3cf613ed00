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


#include "dltr/stake.hpp"

#include <cmath>

#include "dltr/errors.hpp"

namespace dltr {

double trace_entropy(const ResolutionDistribution& dist) {
  double h = 0.0;
  for (const auto& [outcome, p] : dist) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;  // no negative zero
}

WeightSum path_weight_sum(const Trace& trace, const PositionWeights& weights) {
  if (trace.states.size() != trace.symbols.size() + 1) {
    throw DomainError("trace needs exactly one more state than symbols");
  }
  if (phase_of(trace.states.front()) != Phase::Tactical) {
    throw DomainError("trace must start in a tactical state");
  }
  if (phase_of(trace.states.back()) != Phase::Strategic) {
    throw DomainError("trace must end in a strategic (accept) state");
  }
  WeightSum out;
  for (auto s : trace.states) out.weight_sum += weights.weight(phase_of(s));
  out.transitions = trace.transitions();
  return out;
}

double information_cross_entropy(std::uint64_t weight_sum, double trace_log2_prob) {
  if (std::isnan(trace_log2_prob) || trace_log2_prob > 0.0) {
    throw DomainError("trace log2 probability must be <= 0");
  }
  if (std::isinf(trace_log2_prob)) throw InfiniteStake("zero-probability trace has unbounded stake");
  const double ice = -static_cast<double>(weight_sum) * trace_log2_prob;
  return ice == 0.0 ? 0.0 : ice;
}

double information_cross_entropy(const Trace& trace, const PositionWeights& weights) {
  return information_cross_entropy(path_weight_sum(trace, weights).weight_sum, trace.log2_probability);
}

std::uint64_t voting_stake(double ice) {
  if (!std::isfinite(ice) || ice < 0.0) throw DomainError("ice must be finite and non-negative");
  const double f = std::floor(ice);
  return f < 1.0 ? 1 : static_cast<std::uint64_t>(f);
}

StakeRecord make_stake_record(std::string role, const Trace& trace, const PositionWeights& weights) {
  const auto sum = path_weight_sum(trace, weights);
  StakeRecord r;
  r.role = std::move(role);
  r.trace_log2_prob = trace.log2_probability;
  r.weight_sum = sum.weight_sum;
  r.transitions = sum.transitions;
  r.ice = information_cross_entropy(sum.weight_sum, trace.log2_probability);
  r.stake = voting_stake(r.ice);
  return r;
}

}  // namespace dltr
