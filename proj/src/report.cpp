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


#include "dltr/report.hpp"

#include <sstream>

namespace dltr {

std::vector<ReportRow> report_rows(const Hashgraph& g) {
  std::vector<ReportRow> rows;
  for (const auto& t : g.consensus_order()) {
    rows.push_back({t.position, t.famous_witness, t.tx.flight_id, t.tx.role, t.tx.impact, g.book().stake(t.creator),
                    t.consensus_timestamp});
  }
  return rows;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << kReportHeader << "\n";
  for (const auto& r : rows) {
    out << r.consensus_position << "," << (r.famous_witness ? "YES" : "NO") << "," << r.flight_id << "," << r.role
        << "," << r.impact.tactical_delay_min << "," << r.impact.turnaround_min << "," << r.impact.block_time_min
        << "," << r.impact.strategic_delay_min << "," << r.stake << "," << r.consensus_timestamp_ms << "\n";
  }
  return out.str();
}

std::string graph_export(const Hashgraph& g) {
  std::ostringstream out;
  const auto& book = g.book();
  for (MemberId m = 0; m < book.size(); ++m) out << "MEMBER " << m << " " << book.stake(m) << " " << book.name(m) << "\n";
  auto opt = [](const auto& v) { return v ? std::to_string(*v) : std::string("-"); };
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Event& e = g.event_at(i);
    const RoundInfo info = g.round_info(e.id);
    const char fame = info.fame == Fame::Famous ? 'F' : info.fame == Fame::NotFamous ? 'N' : 'U';
    out << "EVENT " << to_hex(e.id) << " " << e.creator << " " << (e.self_parent ? to_hex(*e.self_parent) : "-") << " "
        << (e.other_parent ? to_hex(*e.other_parent) : "-") << " " << e.claimed_timestamp << " " << info.round_created
        << " " << (info.is_witness ? 1 : 0) << " " << fame << " " << opt(info.round_received) << " "
        << opt(info.consensus_timestamp) << " " << opt(info.consensus_position) << "\n";
  }
  return out.str();
}

}  // namespace dltr
