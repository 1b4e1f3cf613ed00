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

#include <cstdint>
#include <string>
#include <vector>

#include "dltr/scenario.hpp"
#include "dltr/stake.hpp"
#include "dltr/training.hpp"
#include "dltr/utfm.hpp"

namespace dltr {

// How many queued disruptions feed each role's Baum-Welch calibration.
inline constexpr std::size_t kCalibrationSequences = 50;

struct AgentProfile {
  std::string role;
  Utfm model;
  PseudocountConfig priors;
  Trace stake_trace;
  StakeRecord stake;
};

PseudocountConfig role_priors(const SimConfig& config, const std::string& role);

// Default topology, perturbed-uniform start, then `training_iterations` rounds
// of Baum-Welch over the role's queued criteria with the role's pseudocounts.
// Stake comes from the most probable accepting trace of the first queued
// disruption (a fixed probe sequence when the queue is empty).
AgentProfile calibrate_agent(const SimConfig& config, const std::string& role,
                             const std::vector<Disruption>& queue);

// Information cross entropy of the disruption's own most probable accepting
// trace: the reliability carried with its transaction.
double disruption_entropy(const Utfm& model, const Disruption& d);

}  // namespace dltr
