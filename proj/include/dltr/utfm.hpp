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
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dltr {

enum class Phase : std::uint8_t { Tactical = 0, Operational = 1, Strategic = 2 };

// The twelve UTFM states. Enumerator order is the canonical state index:
// phase-major (schedule, decision, outcome), then flight stage
// (turnaround, taxi-out, enroute, taxi-in).
enum class StateId : std::uint8_t { TAS, TOS, ES, TIS, TAD, TOD, ED, TID, TAO, TOO, EO, TIO };

inline constexpr std::size_t kStateCount = 12;
inline constexpr std::size_t kStagesPerPhase = 4;

inline constexpr std::array<StateId, kStateCount> kAllStates = {
    StateId::TAS, StateId::TOS, StateId::ES, StateId::TIS, StateId::TAD, StateId::TOD,
    StateId::ED,  StateId::TID, StateId::TAO, StateId::TOO, StateId::EO, StateId::TIO};

constexpr Phase phase_of(StateId s) {
  return static_cast<Phase>(static_cast<std::size_t>(s) / kStagesPerPhase);
}
constexpr std::size_t stage_of(StateId s) { return static_cast<std::size_t>(s) % kStagesPerPhase; }
constexpr StateId make_state(Phase p, std::size_t stage) {
  return static_cast<StateId>(static_cast<std::size_t>(p) * kStagesPerPhase + stage);
}

std::string_view state_name(StateId s);
std::optional<StateId> parse_state(std::string_view name);
std::string_view phase_name(Phase p);
std::optional<Phase> parse_phase(std::string_view name);

// Successors allowed by the default topology: self-loop, next flight stage in
// the same phase, same stage in the next phase, and from taxi-in to the
// turnaround state of the next phase.
std::vector<StateId> default_successors(StateId s);

// Probabilistic finite state machine in hidden-Markov form.
//
// transition(s, a, t) is Pr[s -a-> t]; a row whose entries are all zero is the
// empty successor set. emission(s, a) is the probability that state s emits
// symbol a when used generatively (training and corpus likelihood). The
// acceptor-style queries (trace_probability, acceptance_probability,
// viterbi_decode) read the input symbols as given and use transitions only.
class Utfm {
 public:
  Utfm() = default;
  Utfm(std::vector<StateId> states, std::vector<std::string> alphabet);

  std::size_t num_states() const { return states_.size(); }
  std::size_t num_symbols() const { return alphabet_.size(); }
  const std::vector<StateId>& states() const { return states_; }
  const std::vector<std::string>& alphabet() const { return alphabet_; }

  // Throw DomainError for states or symbols not in the model.
  std::size_t state_index(StateId s) const;
  std::size_t symbol_index(std::string_view symbol) const;
  std::vector<std::size_t> encode(std::span<const std::string> symbols) const;

  double initial(std::size_t s) const { return initial_[s]; }
  double transition(std::size_t s, std::size_t a, std::size_t t) const {
    return transitions_[(s * num_symbols() + a) * num_states() + t];
  }
  double emission(std::size_t s, std::size_t a) const { return emissions_[s * num_symbols() + a]; }
  bool accepting(std::size_t s) const { return accepting_[s]; }

  void set_initial(std::size_t s, double p) { initial_[s] = p; }
  void set_transition(std::size_t s, std::size_t a, std::size_t t, double p) {
    transitions_[(s * num_symbols() + a) * num_states() + t] = p;
  }
  void set_emission(std::size_t s, std::size_t a, double p) { emissions_[s * num_symbols() + a] = p; }
  void set_accepting(std::size_t s, bool v) { accepting_[s] = v; }

  friend bool operator==(const Utfm&, const Utfm&) = default;

 private:
  std::vector<StateId> states_;
  std::vector<std::string> alphabet_;
  std::vector<double> initial_;
  std::vector<double> transitions_;
  std::vector<double> emissions_;
  std::vector<bool> accepting_;
};

// All 12 states, initial mass on TAS, uniform over default_successors for every
// symbol, uniform emissions, strategic states accepting.
Utfm make_default_utfm(std::vector<std::string> alphabet);

// Same support as `model`; every distribution reset to uniform over its support
// and perturbed multiplicatively by seeded noise of the given magnitude.
// Emissions are reset over the whole alphabet.
Utfm perturbed_uniform(const Utfm& model, std::uint64_t seed, double magnitude = 1e-3);

struct Violation {
  std::string where;  // e.g. "TRANS TAS a", "INIT", "EMIT TOS", "ACCEPT"
  double deviation = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const Utfm& model);

// s0, x1, s1, ..., xk, sk
struct Trace {
  std::vector<StateId> states;
  std::vector<std::string> symbols;
  double log2_probability = 0.0;

  std::size_t transitions() const { return symbols.size(); }
  friend bool operator==(const Trace&, const Trace&) = default;
};

// Product of the step probabilities along the trace (the initial distribution
// is not a factor). 0 if any step leaves the successor set.
double trace_probability(const Utfm& model, const Trace& trace);
double trace_log2_probability(const Utfm& model, const Trace& trace);

// Sum over all traces for x that end in an accept state, each weighted by the
// initial probability of its first state.
double acceptance_probability(const Utfm& model, std::span<const std::string> x);
double acceptance_log2_probability(const Utfm& model, std::span<const std::string> x);

enum class PathEnd { Any, Accepting };

// Most probable trace for x among paths starting in the support of the initial
// distribution. Ties resolve to the lexicographically smallest sequence of
// state indices. Throws NoAdmissiblePath if every path has probability 0.
Trace viterbi_decode(const Utfm& model, std::span<const std::string> x, PathEnd end = PathEnd::Any);

using ResolutionDistribution = std::map<std::string, double>;

// Smoothed categorical estimate (n_i + c_i) / sum_j (n_j + c_j) over the union
// of keys in both maps.
ResolutionDistribution pseudocount_probability(const std::map<std::string, std::uint64_t>& observed,
                                               const std::map<std::string, std::uint64_t>& priors);

// (1 + c) / c: how much more likely a value seen once is than one never seen.
double prior_knowledge_factor(std::uint64_t c);

}  // namespace dltr
