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


#include "dltr/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "dltr/crypto.hpp"
#include "dltr/errors.hpp"
#include "dltr/rng.hpp"

namespace dltr {

namespace {

constexpr std::array<std::uint64_t, 11> kQueueSizes = {469, 175, 364, 49, 1684, 795, 336, 227, 30, 90, 127};

constexpr std::array<std::array<std::uint64_t, 3>, 11> kPseudocounts = {{
    {1906, 11289, 3222},
    {1988, 3160, 4792},
    {6365, 10580, 2682},
    {603, 1180, 228},
    {8146, 48827, 5748},
    {4751, 25423, 3505},
    {6985, 4901, 4648},
    {2221, 2774, 1184},
    {850, 955, 145},
    {869, 2206, 397},
    {1483, 597, 1065},
}};

constexpr std::array<std::string_view, 3> kPhaseKeys = {"tactical", "operational", "strategic"};

std::size_t role_index(std::string_view role) {
  for (std::size_t i = 0; i < kRoles.size(); ++i) {
    if (kRoles[i] == role) return i;
  }
  throw ConfigError("unknown functional role '" + std::string(role) + "'");
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_int(std::string_view v, std::size_t line, const std::string& field) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ParseError(line, field, field + ": expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view v, std::size_t line, const std::string& field) {
  std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(out)) {
    throw ParseError(line, field, field + ": expected a number, got '" + s + "'");
  }
  return out;
}

bool parse_bool(std::string_view v, std::size_t line, const std::string& field) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ParseError(line, field, field + ": expected true or false");
}

void require_role(std::string_view role, std::size_t line, const std::string& field) {
  if (!is_role(role)) throw ParseError(line, field, "unknown functional role '" + std::string(role) + "'");
}

}  // namespace

bool is_role(std::string_view role) {
  return std::find(kRoles.begin(), kRoles.end(), role) != kRoles.end();
}

std::uint64_t default_queue_size(std::string_view role) { return kQueueSizes[role_index(role)]; }

std::array<std::uint64_t, 3> default_pseudocounts(std::string_view role) {
  return kPseudocounts[role_index(role)];
}

std::vector<std::string> default_alphabet() { return {"absorb", "delay", "hold", "reroute", "swap", "cancel"}; }

std::vector<std::string> first_roles(std::size_t n) {
  if (n > kRoles.size()) throw ConfigError("only " + std::to_string(kRoles.size()) + " roles exist");
  return {kRoles.begin(), kRoles.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::string_view stake_mode_name(StakeMode m) {
  switch (m) {
    case StakeMode::Utfm: return "utfm";
    case StakeMode::Equal: return "equal";
    case StakeMode::Explicit: return "explicit";
  }
  return "utfm";
}

std::string_view adversary_name(AdversaryBehavior b) {
  switch (b) {
    case AdversaryBehavior::None: return "none";
    case AdversaryBehavior::Fork: return "fork";
    case AdversaryBehavior::Withhold: return "withhold";
  }
  return "none";
}

SimConfig default_sim_config(std::vector<std::string> agents) {
  SimConfig c;
  c.agents = std::move(agents);
  for (auto role : kRoles) {
    c.queue_sizes[std::string(role)] = default_queue_size(role);
    c.pseudocounts[std::string(role)] = default_pseudocounts(role);
  }
  c.alphabet = default_alphabet();
  return c;
}

void validate(const SimConfig& c) {
  if (c.agents.size() < 2) throw ConfigError("at least two agents are required");
  if (c.agents.size() > kRoles.size()) throw ConfigError("at most eleven agents are supported");
  std::set<std::string> seen;
  for (const auto& a : c.agents) {
    if (!is_role(a)) throw ConfigError("unknown functional role '" + a + "'");
    if (!seen.insert(a).second) throw ConfigError("duplicate agent '" + a + "'");
  }
  if (c.latency_min_ms < 0 || c.latency_max_ms < c.latency_min_ms) {
    throw ConfigError("latencies must satisfy 0 <= latency_min_ms <= latency_max_ms");
  }
  if (c.sync_interval_ms <= 0) throw ConfigError("sync_interval_ms must be positive");
  if (c.max_time_ms <= 0) throw ConfigError("max_time_ms must be positive");
  if (c.tx_per_event == 0) throw ConfigError("tx_per_event must be positive");
  if (c.training_iterations < 0) throw ConfigError("training_iterations must be non-negative");
  if (c.alphabet.empty()) throw ConfigError("alphabet is empty");
  std::set<std::string> symbols(c.alphabet.begin(), c.alphabet.end());
  if (symbols.size() != c.alphabet.size()) throw ConfigError("alphabet has duplicate symbols");
  for (const auto& [role, n] : c.queue_sizes) {
    if (!is_role(role)) throw ConfigError("queue for unknown role '" + role + "'");
  }
  for (const auto& [role, counts] : c.pseudocounts) {
    if (!is_role(role)) throw ConfigError("pseudocounts for unknown role '" + role + "'");
  }
  for (const auto& a : c.agents) {
    if (!c.queue_sizes.count(a)) throw ConfigError("no queue size for '" + a + "'");
    if (!c.pseudocounts.count(a)) throw ConfigError("no pseudocounts for '" + a + "'");
  }
  if (c.stake_mode == StakeMode::Explicit) {
    for (const auto& a : c.agents) {
      auto it = c.explicit_stakes.find(a);
      if (it == c.explicit_stakes.end() || it->second == 0) {
        throw ConfigError("explicit stake mode needs a positive stake for '" + a + "'");
      }
    }
  }
  if (c.adversary.behavior != AdversaryBehavior::None &&
      std::find(c.agents.begin(), c.agents.end(), c.adversary.role) == c.agents.end()) {
    throw ConfigError("adversary role '" + c.adversary.role + "' is not an agent");
  }
}

Scenario parse_scenario(std::string_view text) {
  Scenario sc;
  sc.sim = default_sim_config({});
  bool agents_given = false;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "section", "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> known = {"agents", "queues", "pseudocounts", "alphabet",
                                                  "sim",    "stakes", "adversary",    "cost"};
      if (!known.count(section)) throw ParseError(line_no, section, "unknown section [" + section + "]");
      if (section == "agents") {
        agents_given = true;
        sc.sim.agents.clear();
      }
      continue;
    }
    if (section.empty()) throw ParseError(line_no, "", "entry outside of any section");

    if (section == "agents") {
      require_role(line, line_no, "agents");
      sc.sim.agents.emplace_back(line);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, section, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string field = section + "." + key;
    if (key.empty()) throw ParseError(line_no, field, "empty key");

    if (section == "queues") {
      require_role(key, line_no, field);
      sc.sim.queue_sizes[key] = parse_int<std::uint64_t>(value, line_no, field);
    } else if (section == "stakes") {
      require_role(key, line_no, field);
      sc.sim.explicit_stakes[key] = parse_int<std::uint64_t>(value, line_no, field);
    } else if (section == "pseudocounts") {
      const auto dot = key.rfind('.');
      if (dot == std::string::npos) throw ParseError(line_no, field, "expected Role.phase = count");
      const std::string role = key.substr(0, dot);
      const std::string phase = key.substr(dot + 1);
      require_role(role, line_no, field);
      auto it = std::find(kPhaseKeys.begin(), kPhaseKeys.end(), phase);
      if (it == kPhaseKeys.end()) throw ParseError(line_no, field, "unknown phase '" + phase + "'");
      sc.sim.pseudocounts[role][static_cast<std::size_t>(it - kPhaseKeys.begin())] =
          parse_int<std::uint64_t>(value, line_no, field);
    } else if (section == "alphabet") {
      if (key != "symbols") throw ParseError(line_no, field, "unknown key '" + key + "'");
      sc.sim.alphabet.clear();
      std::size_t start = 0;
      while (start <= value.size()) {
        auto comma = value.find(',', start);
        if (comma == std::string_view::npos) comma = value.size();
        auto sym = trim(value.substr(start, comma - start));
        if (sym.empty()) throw ParseError(line_no, field, "empty symbol");
        sc.sim.alphabet.emplace_back(sym);
        start = comma + 1;
      }
    } else if (section == "sim") {
      auto& s = sc.sim;
      if (key == "seed") {
        s.seed = parse_int<std::uint64_t>(value, line_no, field);
      } else if (key == "latency_min_ms") {
        s.latency_min_ms = parse_int<std::int64_t>(value, line_no, field);
      } else if (key == "latency_max_ms") {
        s.latency_max_ms = parse_int<std::int64_t>(value, line_no, field);
      } else if (key == "sync_interval_ms") {
        s.sync_interval_ms = parse_int<std::int64_t>(value, line_no, field);
      } else if (key == "max_time_ms") {
        s.max_time_ms = parse_int<std::int64_t>(value, line_no, field);
      } else if (key == "tx_per_event") {
        s.tx_per_event = parse_int<std::uint64_t>(value, line_no, field);
      } else if (key == "max_events") {
        s.max_events = parse_int<std::uint64_t>(value, line_no, field);
      } else if (key == "training_iterations") {
        s.training_iterations = parse_int<int>(value, line_no, field);
      } else if (key == "stop_at_first_consensus") {
        s.stop_at_first_consensus = parse_bool(value, line_no, field);
      } else if (key == "stake_mode") {
        if (value == "utfm") {
          s.stake_mode = StakeMode::Utfm;
        } else if (value == "equal") {
          s.stake_mode = StakeMode::Equal;
        } else if (value == "explicit") {
          s.stake_mode = StakeMode::Explicit;
        } else {
          throw ParseError(line_no, field, "stake_mode must be utfm, equal or explicit");
        }
      } else {
        throw ParseError(line_no, field, "unknown key '" + key + "'");
      }
    } else if (section == "adversary") {
      if (key == "behavior") {
        if (value == "none") {
          sc.sim.adversary.behavior = AdversaryBehavior::None;
        } else if (value == "fork") {
          sc.sim.adversary.behavior = AdversaryBehavior::Fork;
        } else if (value == "withhold") {
          sc.sim.adversary.behavior = AdversaryBehavior::Withhold;
        } else {
          throw ParseError(line_no, field, "behavior must be none, fork or withhold");
        }
      } else if (key == "role") {
        require_role(value, line_no, field);
        sc.sim.adversary.role = std::string(value);
      } else {
        throw ParseError(line_no, field, "unknown key '" + key + "'");
      }
    } else if (section == "cost") {
      if (key != "rate") throw ParseError(line_no, field, "unknown key '" + key + "'");
      sc.cost.passenger_value_per_hour = parse_double(value, line_no, field);
    }
  }

  if (!agents_given) sc.sim.agents = first_roles(kRoles.size());
  validate(sc.sim);
  if (!(sc.cost.passenger_value_per_hour > 0.0)) throw ConfigError("cost rate must be positive");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "path", "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string write_scenario(const Scenario& sc) {
  const SimConfig& s = sc.sim;
  std::ostringstream out;
  out << "[agents]\n";
  for (const auto& a : s.agents) out << a << "\n";
  out << "\n[queues]\n";
  for (const auto& [role, n] : s.queue_sizes) out << role << " = " << n << "\n";
  out << "\n[pseudocounts]\n";
  for (const auto& [role, c] : s.pseudocounts) {
    for (std::size_t p = 0; p < 3; ++p) out << role << "." << kPhaseKeys[p] << " = " << c[p] << "\n";
  }
  out << "\n[alphabet]\nsymbols = ";
  for (std::size_t i = 0; i < s.alphabet.size(); ++i) out << (i ? ", " : "") << s.alphabet[i];
  out << "\n\n[sim]\n"
      << "seed = " << s.seed << "\n"
      << "latency_min_ms = " << s.latency_min_ms << "\n"
      << "latency_max_ms = " << s.latency_max_ms << "\n"
      << "sync_interval_ms = " << s.sync_interval_ms << "\n"
      << "max_time_ms = " << s.max_time_ms << "\n"
      << "tx_per_event = " << s.tx_per_event << "\n"
      << "max_events = " << s.max_events << "\n"
      << "training_iterations = " << s.training_iterations << "\n"
      << "stop_at_first_consensus = " << (s.stop_at_first_consensus ? "true" : "false") << "\n"
      << "stake_mode = " << stake_mode_name(s.stake_mode) << "\n";
  if (!s.explicit_stakes.empty()) {
    out << "\n[stakes]\n";
    for (const auto& [role, v] : s.explicit_stakes) out << role << " = " << v << "\n";
  }
  out << "\n[adversary]\nbehavior = " << adversary_name(s.adversary.behavior) << "\n";
  if (!s.adversary.role.empty()) out << "role = " << s.adversary.role << "\n";
  char rate[64];
  std::snprintf(rate, sizeof rate, "%.17g", sc.cost.passenger_value_per_hour);
  out << "\n[cost]\nrate = " << rate << "\n";
  return out.str();
}

std::vector<std::string> Disruption::criteria() const {
  std::vector<std::string> out;
  for (const auto& phase : input_criteria) out.insert(out.end(), phase.begin(), phase.end());
  return out;
}

Queues generate_queues(const std::map<std::string, std::uint64_t>& sizes, const std::vector<std::string>& alphabet,
                       std::uint64_t seed) {
  if (alphabet.empty()) throw ConfigError("alphabet is empty");
  std::uint64_t total = 0;
  for (const auto& [role, n] : sizes) {
    if (!is_role(role)) throw ConfigError("queue for unknown role '" + role + "'");
    total += n;
  }

  // Distinct flight ids: a seeded shuffle of a five-digit pool, widened when
  // the scenario is larger than the pool.
  const std::uint64_t pool_size = std::max<std::uint64_t>(99'999, total);
  Rng id_rng(splitmix64(seed ^ 0x666c69676874ULL));
  std::vector<std::uint64_t> pool(pool_size);
  std::iota(pool.begin(), pool.end(), 1);
  for (std::uint64_t i = 0; i < total; ++i) std::swap(pool[i], pool[i + id_rng.below(pool_size - i)]);

  Queues queues;
  std::uint64_t next_id = 0;
  for (const auto& [role, n] : sizes) {
    Rng rng(splitmix64(seed ^ splitmix64(role_index(role) + 1)));
    std::array<std::vector<std::uint64_t>, 3> prefs;
    for (auto& p : prefs) {
      for (std::size_t a = 0; a < alphabet.size(); ++a) p.push_back(1 + rng.below(8));
    }
    auto& queue = queues[role];
    queue.reserve(n);
    for (std::uint64_t q = 0; q < n; ++q) {
      Disruption d;
      d.flight_id = pool[next_id++];
      d.role = role;
      d.queue_position = q;
      for (std::size_t p = 0; p < 3; ++p) {
        const std::uint64_t mass = std::accumulate(prefs[p].begin(), prefs[p].end(), std::uint64_t{0});
        for (std::size_t k = 0; k < kCriteriaPerPhase; ++k) {
          std::uint64_t r = rng.below(mass);
          std::size_t a = 0;
          while (r >= prefs[p][a]) r -= prefs[p][a++];
          d.input_criteria[p].push_back(alphabet[a]);
        }
      }
      queue.push_back(std::move(d));
    }
  }
  return queues;
}

std::uint64_t total_disruptions(const Queues& queues) {
  std::uint64_t total = 0;
  for (const auto& [role, q] : queues) total += q.size();
  return total;
}

RecoveryImpact predict_impact(const Disruption& d, std::uint64_t seed, const ImpactRanges& r) {
  std::string key = "dltr-ptfm";
  put_u64(key, seed);
  put_u32(key, static_cast<std::uint32_t>(d.role.size()));
  key += d.role;
  put_u64(key, d.flight_id);
  const Hash32 h = sha256(key);
  auto draw = [&](std::size_t slot, std::int64_t lo, std::int64_t hi) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | h[slot * 8 + i];
    return lo + static_cast<std::int64_t>(v % static_cast<std::uint64_t>(hi - lo + 1));
  };
  return {draw(0, r.tactical_min, r.tactical_max), draw(1, r.turnaround_min, r.turnaround_max),
          draw(2, r.block_min, r.block_max), draw(3, r.strategic_min, r.strategic_max)};
}

double passenger_cost(std::span<const RecoveryImpact> plan, const CostModel& model) {
  if (plan.empty()) throw DomainError("recovery plan is empty");
  if (!(model.passenger_value_per_hour > 0.0)) throw ConfigError("cost rate must be positive");
  std::int64_t minutes = 0;
  for (const auto& i : plan) minutes += i.tactical_delay_min + i.strategic_delay_min;
  return static_cast<double>(minutes) / 60.0 * model.passenger_value_per_hour;
}

}  // namespace dltr
