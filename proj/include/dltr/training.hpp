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
#include <map>
#include <string>
#include <vector>

#include "dltr/utfm.hpp"

namespace dltr {

// Prior counts added to expected counts in every M-step. The phase of the
// state that owns a distribution selects its count; a per-feature count keyed
// by symbol overrides the phase count for emissions of that symbol.
struct PseudocountConfig {
  std::array<std::uint64_t, 3> per_phase{};
  std::map<std::string, std::uint64_t> per_feature;

  std::uint64_t phase_count(Phase p) const { return per_phase[static_cast<std::size_t>(p)]; }
  std::uint64_t emission_count(Phase p, const std::string& symbol) const;
  bool all_zero() const;
};

struct TrainingCorpus {
  std::vector<std::vector<std::string>> sequences;
  std::vector<double> weights;  // empty means weight 1 for every sequence

  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
};

// log2 Pr[x] under the generative reading of the model: state s_{i-1} emits
// x_i, then moves along Pr[s_{i-1} -x_i-> s_i]. -inf when x is impossible.
double sequence_log2_likelihood(const Utfm& model, std::span<const std::string> x);
double corpus_log2_likelihood(const Utfm& model, const TrainingCorpus& corpus);

// Corpus log2-likelihood plus sum of c * log2(theta) over every smoothed
// parameter: the likelihood of the corpus extended with the pseudo-observations.
// This is what each EM step is guaranteed not to decrease; with all-zero
// priors it equals the corpus log2-likelihood.
double penalized_log2_likelihood(const Utfm& model, const TrainingCorpus& corpus,
                                 const PseudocountConfig& priors);

struct IterationRecord {
  int iteration = 0;
  double log2_likelihood = 0.0;
  double log2_objective = 0.0;
};

struct TrainingResult {
  Utfm model;
  double initial_log2_likelihood = 0.0;
  double initial_log2_objective = 0.0;
  std::vector<IterationRecord> log;
  bool converged = false;
};

// Baum-Welch with pseudocount smoothing. Starts from `model` as given and keeps
// its transition and initial supports (zero entries stay zero); emissions are
// smoothed over the whole alphabet. Stops when the objective improves by less
// than `tol` or after `max_iter` iterations.
TrainingResult baum_welch_train(const Utfm& model, const TrainingCorpus& corpus,
                                const PseudocountConfig& priors, double tol, int max_iter);

}  // namespace dltr
