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


#include "dltr/utfm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "dltr/errors.hpp"
#include "dltr/rng.hpp"

namespace dltr {

namespace {

constexpr double kSumTolerance = 1e-9;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

constexpr std::array<std::string_view, kStateCount> kStateNames = {
    "TAS", "TOS", "ES", "TIS", "TAD", "TOD", "ED", "TID", "TAO", "TOO", "EO", "TIO"};
constexpr std::array<std::string_view, 3> kPhaseNames = {"Tactical", "Operational", "Strategic"};

double log2_or_neg_inf(double p) { return p > 0.0 ? std::log2(p) : kNegInf; }

}  // namespace

std::string_view state_name(StateId s) { return kStateNames[static_cast<std::size_t>(s)]; }

std::optional<StateId> parse_state(std::string_view name) {
  for (std::size_t i = 0; i < kStateNames.size(); ++i) {
    if (kStateNames[i] == name) return static_cast<StateId>(i);
  }
  return std::nullopt;
}

std::string_view phase_name(Phase p) { return kPhaseNames[static_cast<std::size_t>(p)]; }

std::optional<Phase> parse_phase(std::string_view name) {
  for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
    if (kPhaseNames[i] == name) return static_cast<Phase>(i);
  }
  return std::nullopt;
}

std::vector<StateId> default_successors(StateId s) {
  const auto phase = static_cast<std::size_t>(phase_of(s));
  const auto stage = stage_of(s);
  std::vector<StateId> out{s};
  if (stage + 1 < kStagesPerPhase) out.push_back(make_state(phase_of(s), stage + 1));
  if (phase + 1 < 3) {
    const auto next = static_cast<Phase>(phase + 1);
    out.push_back(make_state(next, stage));
    if (stage + 1 == kStagesPerPhase) out.push_back(make_state(next, 0));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Utfm::Utfm(std::vector<StateId> states, std::vector<std::string> alphabet)
    : states_(std::move(states)),
      alphabet_(std::move(alphabet)),
      initial_(states_.size(), 0.0),
      transitions_(states_.size() * alphabet_.size() * states_.size(), 0.0),
      emissions_(states_.size() * alphabet_.size(), 0.0),
      accepting_(states_.size(), false) {
  if (std::set<StateId>(states_.begin(), states_.end()).size() != states_.size()) {
    throw DomainError("duplicate state in model");
  }
  if (alphabet_.empty()) throw DomainError("alphabet must be non-empty");
  if (std::set<std::string>(alphabet_.begin(), alphabet_.end()).size() != alphabet_.size()) {
    throw DomainError("duplicate symbol in alphabet");
  }
}

std::size_t Utfm::state_index(StateId s) const {
  auto it = std::find(states_.begin(), states_.end(), s);
  if (it == states_.end()) throw DomainError("state " + std::string(state_name(s)) + " not in model");
  return static_cast<std::size_t>(it - states_.begin());
}

std::size_t Utfm::symbol_index(std::string_view symbol) const {
  auto it = std::find(alphabet_.begin(), alphabet_.end(), symbol);
  if (it == alphabet_.end()) throw DomainError("unknown symbol '" + std::string(symbol) + "'");
  return static_cast<std::size_t>(it - alphabet_.begin());
}

std::vector<std::size_t> Utfm::encode(std::span<const std::string> symbols) const {
  std::vector<std::size_t> out;
  out.reserve(symbols.size());
  for (const auto& sym : symbols) out.push_back(symbol_index(sym));
  return out;
}

Utfm make_default_utfm(std::vector<std::string> alphabet) {
  Utfm m(std::vector<StateId>(kAllStates.begin(), kAllStates.end()), std::move(alphabet));
  m.set_initial(m.state_index(StateId::TAS), 1.0);
  for (std::size_t s = 0; s < m.num_states(); ++s) {
    const auto succ = default_successors(m.states()[s]);
    for (std::size_t a = 0; a < m.num_symbols(); ++a) {
      m.set_emission(s, a, 1.0 / static_cast<double>(m.num_symbols()));
      for (auto t : succ) m.set_transition(s, a, m.state_index(t), 1.0 / static_cast<double>(succ.size()));
    }
    m.set_accepting(s, phase_of(m.states()[s]) == Phase::Strategic);
  }
  return m;
}

Utfm perturbed_uniform(const Utfm& model, std::uint64_t seed, double magnitude) {
  Rng rng(seed);
  Utfm m = model;
  auto noisy = [&] { return 1.0 + magnitude * (2.0 * rng.unit() - 1.0); };

  const std::size_t S = m.num_states();
  const std::size_t A = m.num_symbols();
  {
    std::vector<double> w(S, 0.0);
    double total = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      if (model.initial(s) > 0.0) total += (w[s] = noisy());
    }
    for (std::size_t s = 0; s < S; ++s) m.set_initial(s, total > 0.0 ? w[s] / total : 0.0);
  }
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<double> e(A);
    double etotal = 0.0;
    for (std::size_t a = 0; a < A; ++a) etotal += (e[a] = noisy());
    for (std::size_t a = 0; a < A; ++a) m.set_emission(s, a, e[a] / etotal);

    for (std::size_t a = 0; a < A; ++a) {
      std::vector<double> w(S, 0.0);
      double total = 0.0;
      for (std::size_t t = 0; t < S; ++t) {
        if (model.transition(s, a, t) > 0.0) total += (w[t] = noisy());
      }
      for (std::size_t t = 0; t < S; ++t) m.set_transition(s, a, t, total > 0.0 ? w[t] / total : 0.0);
    }
  }
  return m;
}

ValidationReport validate(const Utfm& model) {
  ValidationReport report;
  const std::size_t S = model.num_states();
  const std::size_t A = model.num_symbols();
  auto add = [&](std::string where, double dev, std::string msg) {
    report.violations.push_back({std::move(where), dev, std::move(msg)});
  };
  auto check_range = [&](const std::string& where, double p) {
    if (!(p >= 0.0 && p <= 1.0)) add(where, p < 0.0 ? -p : p - 1.0, "probability outside [0, 1]");
  };

  if (S == 0) add("STATES", 0.0, "model has no states");
  if (A == 0) add("ALPHABET", 0.0, "alphabet is empty");

  double init_sum = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    check_range("INIT " + std::string(state_name(model.states()[s])), model.initial(s));
    init_sum += model.initial(s);
  }
  if (S > 0 && std::abs(init_sum - 1.0) > kSumTolerance) {
    add("INIT", std::abs(init_sum - 1.0), "initial distribution does not sum to 1");
  }

  for (std::size_t s = 0; s < S; ++s) {
    const std::string sname(state_name(model.states()[s]));
    double esum = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      check_range("EMIT " + sname + " " + model.alphabet()[a], model.emission(s, a));
      esum += model.emission(s, a);
    }
    if (A > 0 && std::abs(esum - 1.0) > kSumTolerance) {
      add("EMIT " + sname, std::abs(esum - 1.0), "emission distribution does not sum to 1");
    }
    for (std::size_t a = 0; a < A; ++a) {
      const std::string where = "TRANS " + sname + " " + model.alphabet()[a];
      double tsum = 0.0;
      for (std::size_t t = 0; t < S; ++t) {
        check_range(where + " " + std::string(state_name(model.states()[t])), model.transition(s, a, t));
        tsum += model.transition(s, a, t);
      }
      // An all-zero row is the empty successor set.
      if (tsum != 0.0 && std::abs(tsum - 1.0) > kSumTolerance) {
        add(where, std::abs(tsum - 1.0), "successor distribution does not sum to 1");
      }
    }
  }

  bool any_accept = false;
  for (std::size_t s = 0; s < S; ++s) any_accept = any_accept || model.accepting(s);
  if (!any_accept) add("ACCEPT", 0.0, "no accept state");
  return report;
}

double trace_log2_probability(const Utfm& model, const Trace& trace) {
  if (trace.states.size() != trace.symbols.size() + 1) {
    throw DomainError("trace needs exactly one more state than symbols");
  }
  std::vector<std::size_t> idx;
  idx.reserve(trace.states.size());
  for (auto s : trace.states) idx.push_back(model.state_index(s));
  const auto sym = model.encode(trace.symbols);

  double lp = 0.0;
  for (std::size_t i = 0; i < sym.size(); ++i) {
    lp += log2_or_neg_inf(model.transition(idx[i], sym[i], idx[i + 1]));
  }
  return lp;
}

double trace_probability(const Utfm& model, const Trace& trace) {
  if (trace.states.size() != trace.symbols.size() + 1) {
    throw DomainError("trace needs exactly one more state than symbols");
  }
  double p = 1.0;
  for (std::size_t i = 0; i < trace.symbols.size(); ++i) {
    p *= model.transition(model.state_index(trace.states[i]), model.symbol_index(trace.symbols[i]),
                          model.state_index(trace.states[i + 1]));
  }
  return p;
}

double acceptance_log2_probability(const Utfm& model, std::span<const std::string> x) {
  const auto sym = model.encode(x);
  const std::size_t S = model.num_states();
  std::vector<double> alpha(S), next(S);
  for (std::size_t s = 0; s < S; ++s) alpha[s] = model.initial(s);

  // Scaled forward pass; the log scale factors accumulate the magnitude.
  double log_scale = 0.0;
  for (auto a : sym) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      if (alpha[s] == 0.0) continue;
      for (std::size_t t = 0; t < S; ++t) next[t] += alpha[s] * model.transition(s, a, t);
    }
    double total = 0.0;
    for (double v : next) total += v;
    if (total <= 0.0) return kNegInf;
    for (double& v : next) v /= total;
    log_scale += std::log2(total);
    alpha.swap(next);
  }
  double accepted = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    if (model.accepting(s)) accepted += alpha[s];
  }
  return accepted > 0.0 ? log_scale + std::log2(accepted) : kNegInf;
}

double acceptance_probability(const Utfm& model, std::span<const std::string> x) {
  return std::exp2(acceptance_log2_probability(model, x));
}

Trace viterbi_decode(const Utfm& model, std::span<const std::string> x, PathEnd end) {
  if (x.empty()) throw DomainError("viterbi_decode needs a non-empty symbol sequence");
  const auto sym = model.encode(x);
  const std::size_t S = model.num_states();
  const std::size_t k = sym.size();

  // best[i][s]: best log2 probability of completing the path from state s
  // after i symbols. Decoding runs forward over these suffix scores so that
  // ties settle on the smallest state index at the earliest position.
  std::vector<std::vector<double>> best(k + 1, std::vector<double>(S, kNegInf));
  for (std::size_t s = 0; s < S; ++s) {
    best[k][s] = (end == PathEnd::Any || model.accepting(s)) ? 0.0 : kNegInf;
  }
  for (std::size_t i = k; i-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double m = kNegInf;
      for (std::size_t t = 0; t < S; ++t) {
        const double p = model.transition(s, sym[i], t);
        if (p <= 0.0 || best[i + 1][t] == kNegInf) continue;
        m = std::max(m, std::log2(p) + best[i + 1][t]);
      }
      best[i][s] = m;
    }
  }

  std::size_t cur = S;
  for (std::size_t s = 0; s < S; ++s) {
    if (model.initial(s) <= 0.0 || best[0][s] == kNegInf) continue;
    if (cur == S || best[0][s] > best[0][cur]) cur = s;
  }
  if (cur == S) throw NoAdmissiblePath("no admissible path for the input sequence");

  Trace trace;
  trace.log2_probability = best[0][cur];
  trace.states.push_back(model.states()[cur]);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t chosen = S;
    for (std::size_t t = 0; t < S; ++t) {
      const double p = model.transition(cur, sym[i], t);
      if (p <= 0.0 || best[i + 1][t] == kNegInf) continue;
      if (std::log2(p) + best[i + 1][t] == best[i][cur]) {
        chosen = t;
        break;
      }
    }
    cur = chosen;
    trace.symbols.push_back(x[i]);
    trace.states.push_back(model.states()[cur]);
  }
  return trace;
}

ResolutionDistribution pseudocount_probability(const std::map<std::string, std::uint64_t>& observed,
                                               const std::map<std::string, std::uint64_t>& priors) {
  ResolutionDistribution dist;
  long double total = 0.0L;
  for (const auto& [value, n] : observed) {
    dist[value] = 0.0;
    total += static_cast<long double>(n);
  }
  for (const auto& [value, c] : priors) {
    dist[value] = 0.0;
    total += static_cast<long double>(c);
  }
  if (total <= 0.0L) throw UndefinedDistribution("all observed and prior counts are zero");
  for (auto& [value, p] : dist) {
    long double count = 0.0L;
    if (auto it = observed.find(value); it != observed.end()) count += static_cast<long double>(it->second);
    if (auto it = priors.find(value); it != priors.end()) count += static_cast<long double>(it->second);
    p = static_cast<double>(count / total);
  }
  return dist;
}

double prior_knowledge_factor(std::uint64_t c) {
  if (c == 0) throw DomainError("prior knowledge factor undefined for a zero pseudocount");
  return (1.0 + static_cast<double>(c)) / static_cast<double>(c);
}

}  // namespace dltr
