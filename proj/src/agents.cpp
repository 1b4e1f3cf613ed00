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


#include "dltr/agents.hpp"

#include <algorithm>

#include "dltr/rng.hpp"

namespace dltr {

PseudocountConfig role_priors(const SimConfig& config, const std::string& role) {
  PseudocountConfig priors;
  priors.per_phase = config.pseudocounts.at(role);
  return priors;
}

AgentProfile calibrate_agent(const SimConfig& config, const std::string& role,
                             const std::vector<Disruption>& queue) {
  AgentProfile agent;
  agent.role = role;
  agent.priors = role_priors(config, role);

  const auto slot = static_cast<std::uint64_t>(std::find(kRoles.begin(), kRoles.end(), role) - kRoles.begin());
  const std::uint64_t seed = splitmix64(config.seed ^ splitmix64(0x75746d ^ slot));
  agent.model = perturbed_uniform(make_default_utfm(config.alphabet), seed);

  if (config.training_iterations > 0 && !queue.empty()) {
    TrainingCorpus corpus;
    const std::size_t n = std::min(queue.size(), kCalibrationSequences);
    for (std::size_t i = 0; i < n; ++i) corpus.sequences.push_back(queue[i].criteria());
    agent.model = baum_welch_train(agent.model, corpus, agent.priors, 1e-9, config.training_iterations).model;
  }

  std::vector<std::string> probe;
  if (queue.empty()) {
    probe.assign(3 * kCriteriaPerPhase, config.alphabet.front());
  } else {
    probe = queue.front().criteria();
  }
  agent.stake_trace = viterbi_decode(agent.model, probe, PathEnd::Accepting);
  agent.stake = make_stake_record(role, agent.stake_trace);
  return agent;
}

double disruption_entropy(const Utfm& model, const Disruption& d) {
  return information_cross_entropy(viterbi_decode(model, d.criteria(), PathEnd::Accepting));
}

}  // namespace dltr
