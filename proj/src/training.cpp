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


#include "dltr/training.hpp"

#include <cmath>
#include <limits>

#include "dltr/errors.hpp"

namespace dltr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct ExpectedCounts {
  std::vector<double> initial, emission, transition;

  ExpectedCounts(std::size_t S, std::size_t A)
      : initial(S, 0.0), emission(S * A, 0.0), transition(S * A * S, 0.0) {}
};

// Scaled forward-backward for one sequence. Adds weighted expected counts when
// `counts` is non-null and returns log2 Pr[x].
double forward_backward(const Utfm& m, const std::vector<std::size_t>& x, double weight,
                        ExpectedCounts* counts) {
  const std::size_t S = m.num_states();
  const std::size_t A = m.num_symbols();
  const std::size_t k = x.size();

  std::vector<double> alpha((k + 1) * S, 0.0);
  std::vector<double> scale(k + 1, 1.0);
  for (std::size_t s = 0; s < S; ++s) alpha[s] = m.initial(s);

  double log2_like = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t a = x[i - 1];
    const double* prev = &alpha[(i - 1) * S];
    double* cur = &alpha[i * S];
    for (std::size_t s = 0; s < S; ++s) {
      const double w = prev[s] * m.emission(s, a);
      if (w == 0.0) continue;
      for (std::size_t t = 0; t < S; ++t) cur[t] += w * m.transition(s, a, t);
    }
    double total = 0.0;
    for (std::size_t t = 0; t < S; ++t) total += cur[t];
    if (!(total > 0.0)) return kNegInf;
    for (std::size_t t = 0; t < S; ++t) cur[t] /= total;
    scale[i] = total;
    log2_like += std::log2(total);
  }
  if (counts == nullptr) return log2_like;

  std::vector<double> beta((k + 1) * S, 0.0);
  for (std::size_t s = 0; s < S; ++s) beta[k * S + s] = 1.0;
  for (std::size_t i = k; i >= 1; --i) {
    const std::size_t a = x[i - 1];
    const double* prev = &alpha[(i - 1) * S];
    const double* next_beta = &beta[i * S];
    double* cur_beta = &beta[(i - 1) * S];
    for (std::size_t s = 0; s < S; ++s) {
      const double e = m.emission(s, a);
      if (e == 0.0) continue;
      double acc = 0.0;
      for (std::size_t t = 0; t < S; ++t) {
        const double step = e * m.transition(s, a, t) * next_beta[t] / scale[i];
        if (step == 0.0) continue;
        acc += step;
        const double xi = prev[s] * step;
        counts->transition[(s * A + a) * S + t] += weight * xi;
        counts->emission[s * A + a] += weight * xi;
      }
      cur_beta[s] = acc;
    }
  }
  for (std::size_t s = 0; s < S; ++s) counts->initial[s] += weight * alpha[s] * beta[s];
  return log2_like;
}

struct EStep {
  double log2_likelihood;
  ExpectedCounts counts;
};

EStep expectation(const Utfm& m, const std::vector<std::vector<std::size_t>>& seqs,
                  const TrainingCorpus& corpus) {
  EStep out{0.0, ExpectedCounts(m.num_states(), m.num_symbols())};
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const double ll = forward_backward(m, seqs[i], corpus.weight(i), &out.counts);
    out.log2_likelihood += corpus.weight(i) * ll;
  }
  return out;
}

// Sum of c * log2(theta) over the smoothed parameters of `m` whose support is
// taken from `support`.
double prior_term(const Utfm& m, const Utfm& support, const PseudocountConfig& priors) {
  const std::size_t S = m.num_states();
  const std::size_t A = m.num_symbols();
  double total = 0.0;
  auto add = [&](double c, double theta) {
    if (c > 0.0) total += c * (theta > 0.0 ? std::log2(theta) : kNegInf);
  };
  for (std::size_t s = 0; s < S; ++s) {
    const Phase ph = phase_of(m.states()[s]);
    const double c = static_cast<double>(priors.phase_count(ph));
    if (support.initial(s) > 0.0) add(c, m.initial(s));
    for (std::size_t a = 0; a < A; ++a) {
      add(static_cast<double>(priors.emission_count(ph, m.alphabet()[a])), m.emission(s, a));
      for (std::size_t t = 0; t < S; ++t) {
        if (support.transition(s, a, t) > 0.0) add(c, m.transition(s, a, t));
      }
    }
  }
  return total;
}

Utfm maximization(const Utfm& cur, const Utfm& support, const ExpectedCounts& n,
                  const PseudocountConfig& priors) {
  const std::size_t S = cur.num_states();
  const std::size_t A = cur.num_symbols();
  Utfm next = cur;

  {
    std::vector<double> w(S, 0.0);
    double total = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      if (support.initial(s) <= 0.0) continue;
      w[s] = n.initial[s] + static_cast<double>(priors.phase_count(phase_of(cur.states()[s])));
      total += w[s];
    }
    if (total > 0.0) {
      for (std::size_t s = 0; s < S; ++s) next.set_initial(s, w[s] / total);
    }
  }

  for (std::size_t s = 0; s < S; ++s) {
    const Phase ph = phase_of(cur.states()[s]);
    const double c = static_cast<double>(priors.phase_count(ph));

    std::vector<double> e(A, 0.0);
    double etotal = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      e[a] = n.emission[s * A + a] + static_cast<double>(priors.emission_count(ph, cur.alphabet()[a]));
      etotal += e[a];
    }
    if (etotal > 0.0) {
      for (std::size_t a = 0; a < A; ++a) next.set_emission(s, a, e[a] / etotal);
    }

    for (std::size_t a = 0; a < A; ++a) {
      std::vector<double> w(S, 0.0);
      double total = 0.0;
      for (std::size_t t = 0; t < S; ++t) {
        if (support.transition(s, a, t) <= 0.0) continue;
        w[t] = n.transition[(s * A + a) * S + t] + c;
        total += w[t];
      }
      // Rows with neither data nor prior mass keep their previous values.
      if (total > 0.0) {
        for (std::size_t t = 0; t < S; ++t) next.set_transition(s, a, t, w[t] / total);
      }
    }
  }
  return next;
}

std::vector<std::vector<std::size_t>> encode_corpus(const Utfm& model, const TrainingCorpus& corpus) {
  std::vector<std::vector<std::size_t>> seqs;
  seqs.reserve(corpus.sequences.size());
  for (const auto& seq : corpus.sequences) seqs.push_back(model.encode(seq));
  return seqs;
}

}  // namespace

std::uint64_t PseudocountConfig::emission_count(Phase p, const std::string& symbol) const {
  if (auto it = per_feature.find(symbol); it != per_feature.end()) return it->second;
  return phase_count(p);
}

bool PseudocountConfig::all_zero() const {
  for (auto c : per_phase) {
    if (c != 0) return false;
  }
  for (const auto& [k, c] : per_feature) {
    if (c != 0) return false;
  }
  return true;
}

double sequence_log2_likelihood(const Utfm& model, std::span<const std::string> x) {
  return forward_backward(model, model.encode(x), 1.0, nullptr);
}

double corpus_log2_likelihood(const Utfm& model, const TrainingCorpus& corpus) {
  double total = 0.0;
  for (std::size_t i = 0; i < corpus.sequences.size(); ++i) {
    total += corpus.weight(i) * sequence_log2_likelihood(model, corpus.sequences[i]);
  }
  return total;
}

double penalized_log2_likelihood(const Utfm& model, const TrainingCorpus& corpus,
                                 const PseudocountConfig& priors) {
  return corpus_log2_likelihood(model, corpus) + prior_term(model, model, priors);
}

TrainingResult baum_welch_train(const Utfm& model, const TrainingCorpus& corpus,
                                const PseudocountConfig& priors, double tol, int max_iter) {
  if (auto report = validate(model); !report.ok()) {
    throw DomainError("cannot train an invalid model: " + report.violations.front().where + ": " +
                      report.violations.front().message);
  }
  if (corpus.sequences.empty()) throw DomainError("training corpus is empty");
  if (!corpus.weights.empty() && corpus.weights.size() != corpus.sequences.size()) {
    throw DomainError("corpus weights do not match the number of sequences");
  }
  for (double w : corpus.weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("corpus weights must be positive and finite");
  }
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (max_iter < 1) throw DomainError("max_iter must be at least 1");

  const auto seqs = encode_corpus(model, corpus);
  const Utfm& support = model;

  TrainingResult result;
  result.model = model;
  auto estep = expectation(result.model, seqs, corpus);
  if (!std::isfinite(estep.log2_likelihood)) {
    throw NumericalFailure("corpus has zero likelihood under the initial model");
  }
  result.initial_log2_likelihood = estep.log2_likelihood;
  result.initial_log2_objective = estep.log2_likelihood + prior_term(result.model, support, priors);

  double previous = result.initial_log2_objective;
  for (int it = 1; it <= max_iter; ++it) {
    result.model = maximization(result.model, support, estep.counts, priors);
    estep = expectation(result.model, seqs, corpus);
    const double objective = estep.log2_likelihood + prior_term(result.model, support, priors);
    if (!std::isfinite(estep.log2_likelihood) || !std::isfinite(objective)) {
      throw NumericalFailure("non-finite likelihood at iteration " + std::to_string(it));
    }
    result.log.push_back({it, estep.log2_likelihood, objective});
    if (objective - previous < tol) {
      result.converged = true;
      break;
    }
    previous = objective;
  }
  return result;
}

}  // namespace dltr
