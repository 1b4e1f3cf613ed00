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
#include <optional>
#include <string>
#include <vector>

#include "dltr/agents.hpp"
#include "dltr/hashgraph.hpp"
#include "dltr/scenario.hpp"

namespace dltr {

struct SimReport {
  std::vector<std::string> agents;
  std::vector<std::uint64_t> stakes;
  std::uint64_t events_created = 0;
  std::uint64_t transactions_queued = 0;
  std::uint64_t transactions_ordered = 0;  // minimum over honest replicas
  std::uint64_t rounds_decided = 0;        // minimum over honest replicas
  std::optional<std::int64_t> time_to_first_consensus_ms;
  std::vector<std::uint64_t> sync_counts;  // syncs initiated per agent
  std::uint64_t events_sent = 0;
  std::uint64_t redundant_events_sent = 0;
  std::uint64_t forks_detected = 0;
  std::int64_t end_time_ms = 0;
  std::string stop_reason;  // quiescent, max_time, max_events or first_consensus
  std::string order_digest;  // SHA-256 over the first honest replica's event order

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

// Stable multi-line key: value rendering.
std::string format_report(const SimReport& report);

struct SyncRecord {
  std::int64_t time_ms = 0;
  std::size_t from = 0;
  std::size_t to = 0;
  std::uint64_t events_sent = 0;
  EventId created{};
};

// SYNC <time-ms> <from> <to> <n-events-sent> <new-event-id>
std::string transcript_line(const SyncRecord& r);

struct SimResult {
  SimReport report;
  AddressBook book;
  std::vector<AgentProfile> agents;
  std::vector<Hashgraph> replicas;
  std::vector<bool> honest;
  std::vector<SyncRecord> syncs;
  Queues queues;
};

// Stake per agent under the configured stake mode.
std::vector<std::uint64_t> agent_stakes(const SimConfig& config, const std::vector<AgentProfile>& agents);

// Discrete-event gossip over simulated milliseconds. Every agent creates a
// genesis event at time 0, then syncs to a uniformly random other agent every
// sync interval (after a random initial offset). On delivery the receiver
// gets every event of the sender's snapshot it lacks, then creates an event
// whose other-parent is the sender's head and whose payload drains its queue.
// Stops at quiescence (every honest transaction ordered on every honest
// replica), at max_time_ms, at max_events, or at first consensus when asked.
SimResult run_simulation(const SimConfig& config);

// run_simulation with one adversarial agent. Throws ConfigError unless the
// adversary holds strictly less than a third of the stake.
SimResult inject_adversary(SimConfig config, AdversaryBehavior behavior, const std::string& role);

struct ScalingRow {
  std::size_t n_roles = 0;
  std::optional<std::int64_t> time_to_first_consensus_ms;
};

// One run per membership size, growing membership alphabetically.
std::vector<ScalingRow> scaling_experiment(const SimConfig& base, std::size_t min_roles = 4,
                                           std::size_t max_roles = 11);

}  // namespace dltr
