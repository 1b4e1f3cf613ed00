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

#include "dltr/hashgraph.hpp"

namespace dltr {

// One consensus-ordered disruption resolution.
struct ReportRow {
  std::uint64_t consensus_position = 0;
  bool famous_witness = false;  // fame of the carrying event
  std::uint64_t flight_id = 0;
  std::string role;
  RecoveryImpact impact;
  std::uint64_t stake = 0;  // voting stake of the creating agent
  std::int64_t consensus_timestamp_ms = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

inline constexpr const char* kReportHeader =
    "consensus_position,famous_witness,flight_id,role,tactical_delay_min,turnaround_min,"
    "block_time_min,strategic_delay_min,stake,consensus_timestamp_ms";

std::vector<ReportRow> report_rows(const Hashgraph& g);
std::string report_csv(const std::vector<ReportRow>& rows);

// Line-oriented DAG dump in insertion order:
//   MEMBER <index> <stake> <name>
//   EVENT <id> <creator> <self-parent|-> <other-parent|-> <timestamp> <round>
//         <witness 0|1> <fame F|N|U> <round-received|-> <consensus-ts|-> <position|->
std::string graph_export(const Hashgraph& g);

}  // namespace dltr
