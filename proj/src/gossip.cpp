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


#include "dltr/gossip.hpp"

#include <algorithm>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "dltr/errors.hpp"
#include "dltr/rng.hpp"

namespace dltr {

namespace {

struct Action {
  enum Kind { Sync, Deliver } kind;
  std::int64_t time;
  std::uint64_t seq;
  std::size_t from;
  std::size_t to;
  std::size_t snapshot;
  EventId sender_head;
};

struct Later {
  bool operator()(const Action& a, const Action& b) const {
    return a.time != b.time ? a.time > b.time : a.seq > b.seq;
  }
};

bool first_consensus(const Hashgraph& g) {
  if (g.last_decided_round() < 1) return false;
  for (const auto& w : g.famous_witnesses(1)) {
    if (!g.round_info(w).consensus_position) return false;
  }
  return true;
}

class Simulation {
 public:
  explicit Simulation(const SimConfig& config) : cfg_(config), rng_(splitmix64(config.seed)) {}

  SimResult run() {
    setup();
    for (std::size_t i = 0; i < n_; ++i) create_event(i, 0, std::nullopt);
    for (auto& g : out_.replicas) g.update_consensus();
    after_batch(0);
    for (std::size_t i = 0; i < n_; ++i) {
      schedule({Action::Sync, static_cast<std::int64_t>(rng_.below(cfg_.sync_interval_ms)), 0, i, i, 0, {}});
    }

    std::string reason = "max_time";
    std::int64_t now = 0;
    while (!agenda_.empty()) {
      Action a = agenda_.top();
      if (a.time > cfg_.max_time_ms) break;
      agenda_.pop();
      now = a.time;
      if (a.kind == Action::Sync) {
        start_sync(a);
      } else {
        deliver(a);
        after_batch(now);
      }
      if (quiescent()) {
        reason = "quiescent";
        break;
      }
      if (cfg_.stop_at_first_consensus && out_.report.time_to_first_consensus_ms) {
        reason = "first_consensus";
        break;
      }
      if (cfg_.max_events != 0 && out_.report.events_created >= cfg_.max_events) {
        reason = "max_events";
        break;
      }
    }
    if (reason == "max_time") now = std::max(now, cfg_.max_time_ms);
    finish(now, reason);
    return std::move(out_);
  }

 private:
  void setup() {
    validate(cfg_);
    n_ = cfg_.agents.size();
    if (n_ > kMaxMembers) throw ConfigError("too many agents");

    std::map<std::string, std::uint64_t> sizes;
    for (const auto& a : cfg_.agents) sizes[a] = cfg_.queue_sizes.at(a);
    out_.queues = generate_queues(sizes, cfg_.alphabet, cfg_.seed);
    spdlog::debug("generated {} disruptions for {} agents", total_disruptions(out_.queues), n_);

    for (const auto& role : cfg_.agents) {
      out_.agents.push_back(calibrate_agent(cfg_, role, out_.queues.at(role)));
    }
    const auto stakes = agent_stakes(cfg_, out_.agents);
    out_.book = AddressBook(cfg_.agents, stakes);

    out_.honest.assign(n_, true);
    adversary_ = n_;
    if (cfg_.adversary.behavior != AdversaryBehavior::None) {
      adversary_ = static_cast<std::size_t>(
          std::find(cfg_.agents.begin(), cfg_.agents.end(), cfg_.adversary.role) - cfg_.agents.begin());
      const std::uint64_t total = out_.book.total_stake();
      if (stakes[adversary_] >= total / 3 + (total % 3 != 0)) {
        throw ConfigError("adversary stake must be below one third of the total");
      }
      out_.honest[adversary_] = false;
    }

    keys_ = derive_member_keys(cfg_.seed, n_);
    out_.replicas.assign(n_, Hashgraph(out_.book, keys_));
    heads_.assign(n_, EventId{});
    started_.assign(n_, false);
    fork_tips_.assign(2, std::nullopt);
    ordered_cursor_.assign(n_, 0);
    honest_ordered_.assign(n_, 0);
    first_flags_.assign(n_, false);

    pending_.resize(n_);
    next_tx_.assign(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& agent = out_.agents[i];
      for (const auto& d : out_.queues.at(agent.role)) {
        pending_[i].push_back({agent.role, d.flight_id, d.queue_position, disruption_entropy(agent.model, d),
                               predict_impact(d, cfg_.seed)});
      }
      if (out_.honest[i]) honest_total_ += pending_[i].size();
      out_.report.transactions_queued += pending_[i].size();
    }
    out_.report.agents = cfg_.agents;
    out_.report.stakes = stakes;
    out_.report.sync_counts.assign(n_, 0);
  }

  void schedule(Action a) {
    a.seq = seq_++;
    agenda_.push(a);
  }

  EventId create_event(std::size_t i, std::int64_t t, std::optional<EventId> other_parent) {
    std::vector<Transaction> payload;
    while (payload.size() < cfg_.tx_per_event && next_tx_[i] < pending_[i].size()) {
      payload.push_back(pending_[i][next_tx_[i]++]);
    }
    std::optional<EventId> self_parent;
    std::size_t branch = 0;
    const bool forker = i == adversary_ && cfg_.adversary.behavior == AdversaryBehavior::Fork;
    if (forker && started_[i]) {
      branch = rng_.below(2);
      self_parent = fork_tips_[branch];
    } else if (started_[i]) {
      self_parent = heads_[i];
    }
    Event e = make_event(i, keys_[i], self_parent, other_parent, t, std::move(payload));
    const auto result = out_.replicas[i].insert(e);
    if (!result.accepted()) throw std::logic_error("own event rejected: " + result.reason);
    heads_[i] = e.id;
    if (forker) {
      fork_tips_[branch] = e.id;
      if (!started_[i]) fork_tips_[1] = e.id;
    }
    started_[i] = true;
    ++out_.report.events_created;
    return e.id;
  }

  void start_sync(const Action& a) {
    const std::size_t i = a.from;
    schedule({Action::Sync, a.time + cfg_.sync_interval_ms, 0, i, i, 0, {}});
    if (i == adversary_ && cfg_.adversary.behavior == AdversaryBehavior::Withhold) return;
    std::size_t peer = rng_.below(n_ - 1);
    if (peer >= i) ++peer;
    const std::int64_t latency = rng_.between(cfg_.latency_min_ms, cfg_.latency_max_ms);
    ++out_.report.sync_counts[i];
    schedule({Action::Deliver, a.time + latency, 0, i, peer, out_.replicas[i].size(), heads_[i]});
  }

  void deliver(const Action& a) {
    const Hashgraph& from = out_.replicas[a.from];
    Hashgraph& to = out_.replicas[a.to];
    std::uint64_t sent = 0;
    for (std::size_t k = 0; k < a.snapshot; ++k) {
      const Event& e = from.event_at(k);
      if (to.contains(e.id)) continue;
      ++sent;
      const auto result = to.insert(e);
      if (result.status == InsertStatus::Duplicate) {
        ++out_.report.redundant_events_sent;
      } else if (!result.accepted()) {
        throw std::logic_error("gossiped event rejected: " + result.reason);
      }
    }
    out_.report.events_sent += sent;
    const EventId created = create_event(a.to, a.time, a.sender_head);
    out_.replicas[a.to].update_consensus();
    audit_order(a.to);
    out_.syncs.push_back({a.time, a.from, a.to, sent, created});
  }

  void audit_order(std::size_t j) {
    const Hashgraph& g = out_.replicas[j];
    for (; ordered_cursor_[j] < g.ordered_event_count(); ++ordered_cursor_[j]) {
      const Event& e = g.ordered_event(ordered_cursor_[j]);
      if (out_.honest[e.creator]) honest_ordered_[j] += e.payload.size();
    }
  }

  void after_batch(std::int64_t now) {
    if (out_.report.time_to_first_consensus_ms) return;
    bool all = true;
    for (std::size_t j = 0; j < n_; ++j) {
      if (!out_.honest[j]) continue;
      if (!first_flags_[j]) first_flags_[j] = first_consensus(out_.replicas[j]);
      all = all && first_flags_[j];
    }
    if (all) out_.report.time_to_first_consensus_ms = now;
  }

  bool quiescent() const {
    for (std::size_t j = 0; j < n_; ++j) {
      if (!out_.honest[j]) continue;
      if (next_tx_[j] < pending_[j].size() || honest_ordered_[j] < honest_total_) return false;
    }
    return true;
  }

  void finish(std::int64_t now, const std::string& reason) {
    auto& r = out_.report;
    r.end_time_ms = now;
    r.stop_reason = reason;
    bool first = true;
    for (std::size_t j = 0; j < n_; ++j) {
      if (!out_.honest[j]) continue;
      const Hashgraph& g = out_.replicas[j];
      if (first) {
        std::string ids;
        for (std::size_t k = 0; k < g.ordered_event_count(); ++k) {
          const auto& id = g.ordered_event(k).id;
          ids.append(reinterpret_cast<const char*>(id.data()), id.size());
        }
        r.order_digest = to_hex(sha256(ids));
        r.forks_detected = g.forks().size();
        r.transactions_ordered = g.ordered_transaction_count();
        r.rounds_decided = g.last_decided_round();
        first = false;
      }
      r.transactions_ordered = std::min(r.transactions_ordered, g.ordered_transaction_count());
      r.rounds_decided = std::min(r.rounds_decided, g.last_decided_round());
    }
    spdlog::info("simulation stopped ({}) at {} ms: {} events, {} transactions ordered", reason, now,
                 r.events_created, r.transactions_ordered);
  }

  SimConfig cfg_;
  Rng rng_;
  std::size_t n_ = 0;
  std::size_t adversary_ = 0;
  SimResult out_;
  std::vector<Hash32> keys_;
  std::vector<EventId> heads_;
  std::vector<bool> started_;
  std::vector<std::optional<EventId>> fork_tips_;
  std::vector<std::vector<Transaction>> pending_;
  std::vector<std::size_t> next_tx_;
  std::vector<std::size_t> ordered_cursor_;
  std::vector<std::uint64_t> honest_ordered_;
  std::uint64_t honest_total_ = 0;
  std::vector<bool> first_flags_;
  std::priority_queue<Action, std::vector<Action>, Later> agenda_;
  std::uint64_t seq_ = 0;
};

}  // namespace

std::string format_report(const SimReport& r) {
  std::ostringstream out;
  auto join = [&](const auto& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    return s.str();
  };
  out << "agents: " << join(r.agents) << "\n"
      << "stakes: " << join(r.stakes) << "\n"
      << "events_created: " << r.events_created << "\n"
      << "transactions_queued: " << r.transactions_queued << "\n"
      << "transactions_ordered: " << r.transactions_ordered << "\n"
      << "rounds_decided: " << r.rounds_decided << "\n"
      << "time_to_first_consensus_ms: "
      << (r.time_to_first_consensus_ms ? std::to_string(*r.time_to_first_consensus_ms) : "-") << "\n"
      << "sync_counts: " << join(r.sync_counts) << "\n"
      << "events_sent: " << r.events_sent << "\n"
      << "redundant_events_sent: " << r.redundant_events_sent << "\n"
      << "forks_detected: " << r.forks_detected << "\n"
      << "end_time_ms: " << r.end_time_ms << "\n"
      << "stop_reason: " << r.stop_reason << "\n"
      << "order_digest: " << r.order_digest << "\n";
  return out.str();
}

std::string transcript_line(const SyncRecord& r) {
  std::ostringstream out;
  out << "SYNC " << r.time_ms << " " << r.from << " " << r.to << " " << r.events_sent << " " << to_hex(r.created);
  return out.str();
}

std::vector<std::uint64_t> agent_stakes(const SimConfig& config, const std::vector<AgentProfile>& agents) {
  std::vector<std::uint64_t> stakes;
  for (const auto& a : agents) {
    switch (config.stake_mode) {
      case StakeMode::Utfm: stakes.push_back(a.stake.stake); break;
      case StakeMode::Equal: stakes.push_back(1); break;
      case StakeMode::Explicit: stakes.push_back(config.explicit_stakes.at(a.role)); break;
    }
  }
  return stakes;
}

SimResult run_simulation(const SimConfig& config) { return Simulation(config).run(); }

SimResult inject_adversary(SimConfig config, AdversaryBehavior behavior, const std::string& role) {
  config.adversary = {behavior, role};
  return run_simulation(config);
}

std::vector<ScalingRow> scaling_experiment(const SimConfig& base, std::size_t min_roles, std::size_t max_roles) {
  if (min_roles < 2 || min_roles > max_roles || max_roles > kRoles.size()) {
    throw ConfigError("role range must satisfy 2 <= min <= max <= 11");
  }
  std::vector<ScalingRow> rows;
  for (std::size_t n = min_roles; n <= max_roles; ++n) {
    SimConfig c = base;
    c.agents = first_roles(n);
    c.stop_at_first_consensus = true;
    c.adversary = {};
    rows.push_back({n, run_simulation(c).report.time_to_first_consensus_ms});
  }
  return rows;
}

}  // namespace dltr
