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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dltr/impact.hpp"

namespace dltr {

// The eleven AOCC functional roles in alphabetical order.
inline constexpr std::array<std::string_view, 11> kRoles = {
    "Customer Hold", "Dispatch CSC", "Flight Operations", "Fuel Management",
    "Ground Operations", "Inflight", "Maintenance", "NAS",
    "Security", "Technology", "Weather"};

bool is_role(std::string_view role);
// Per-role disruption queue sizes and tactical/operational/strategic
// pseudocounts of the reference scenario. Throw ConfigError for unknown roles.
std::uint64_t default_queue_size(std::string_view role);
std::array<std::uint64_t, 3> default_pseudocounts(std::string_view role);
std::vector<std::string> default_alphabet();
// The first n roles alphabetically.
std::vector<std::string> first_roles(std::size_t n);

enum class StakeMode { Utfm, Equal, Explicit };
enum class AdversaryBehavior { None, Fork, Withhold };

std::string_view stake_mode_name(StakeMode m);
std::string_view adversary_name(AdversaryBehavior b);

struct AdversaryConfig {
  AdversaryBehavior behavior = AdversaryBehavior::None;
  std::string role;

  friend bool operator==(const AdversaryConfig&, const AdversaryConfig&) = default;
};

struct SimConfig {
  std::vector<std::string> agents;
  std::uint64_t seed = 1;
  std::int64_t latency_min_ms = 10;
  std::int64_t latency_max_ms = 50;  // equal to min for a constant latency
  std::int64_t sync_interval_ms = 100;
  std::int64_t max_time_ms = 600'000;
  std::uint64_t tx_per_event = 5;
  std::uint64_t max_events = 0;  // 0 for no cap
  bool stop_at_first_consensus = false;
  int training_iterations = 3;

  std::map<std::string, std::uint64_t> queue_sizes;
  std::map<std::string, std::array<std::uint64_t, 3>> pseudocounts;
  std::vector<std::string> alphabet;

  StakeMode stake_mode = StakeMode::Utfm;
  std::map<std::string, std::uint64_t> explicit_stakes;
  AdversaryConfig adversary;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

// Config for `agents` with every table default filled in.
SimConfig default_sim_config(std::vector<std::string> agents);

// Throws ConfigError describing the first problem found.
void validate(const SimConfig& config);

struct CostModel {
  double passenger_value_per_hour = 47.0;

  friend bool operator==(const CostModel&, const CostModel&) = default;
};

struct Scenario {
  SimConfig sim;
  CostModel cost;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Sectioned key = value text:
//   [agents]        one role per line
//   [queues]        Role = count
//   [pseudocounts]  Role.tactical|operational|strategic = count
//   [alphabet]      symbols = a, b, c
//   [sim]           seed, latency_min_ms, latency_max_ms, sync_interval_ms,
//                   max_time_ms, tx_per_event, max_events, training_iterations,
//                   stake_mode (utfm|equal|explicit), stop_at_first_consensus
//   [stakes]        Role = stake (stake_mode = explicit)
//   [adversary]     behavior = none|fork|withhold, role = Role
//   [cost]          rate = dollars per passenger hour
// '#' starts a comment. Throws ParseError on malformed or unknown entries and
// ConfigError when the result fails validation.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);
std::string write_scenario(const Scenario& scenario);

struct Disruption {
  std::uint64_t flight_id = 0;
  std::string role;
  std::array<std::vector<std::string>, 3> input_criteria;  // tactical, operational, strategic
  std::uint64_t queue_position = 0;

  // Criteria of all three phases in order.
  std::vector<std::string> criteria() const;
  friend bool operator==(const Disruption&, const Disruption&) = default;
};

inline constexpr std::size_t kCriteriaPerPhase = 4;

using Queues = std::map<std::string, std::vector<Disruption>>;

// Deterministic synthetic queues. Flight ids are unique across all roles; each
// role draws its criteria from its own skewed per-phase symbol preferences.
Queues generate_queues(const std::map<std::string, std::uint64_t>& sizes,
                       const std::vector<std::string>& alphabet, std::uint64_t seed);
std::uint64_t total_disruptions(const Queues& queues);

struct ImpactRanges {
  std::int64_t tactical_min = -20, tactical_max = 61;
  std::int64_t turnaround_min = 1, turnaround_max = 41;
  std::int64_t block_min = 93, block_max = 339;
  std::int64_t strategic_min = -14, strategic_max = 40;
};

// Stand-in for the recovery-impact predictor: a keyed hash of
// (seed, role, flight id) mapped into the configured ranges.
RecoveryImpact predict_impact(const Disruption& d, std::uint64_t seed, const ImpactRanges& ranges = {});

// (sum of tactical + strategic delay minutes) / 60 * rate.
double passenger_cost(std::span<const RecoveryImpact> plan, const CostModel& model = {});

}  // namespace dltr
