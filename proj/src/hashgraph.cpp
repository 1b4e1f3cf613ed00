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


#include "dltr/hashgraph.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "dltr/errors.hpp"

namespace dltr {

AddressBook::AddressBook(std::vector<std::string> names, std::vector<std::uint64_t> stakes)
    : names_(std::move(names)), stakes_(std::move(stakes)) {
  if (names_.empty()) throw ConfigError("address book needs at least one member");
  if (names_.size() > kMaxMembers) throw ConfigError("address book supports at most 64 members");
  if (names_.size() != stakes_.size()) throw ConfigError("one stake per member required");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (stakes_[i] == 0) throw ConfigError("stake of " + names_[i] + " must be positive");
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) throw ConfigError("duplicate member " + names_[i]);
    }
    total_ += stakes_[i];
  }
}

AddressBook AddressBook::equal_stake(std::vector<std::string> names, std::uint64_t stake) {
  std::vector<std::uint64_t> stakes(names.size(), stake);
  return AddressBook(std::move(names), std::move(stakes));
}

std::size_t Hashgraph::IdHash::operator()(const EventId& id) const noexcept {
  std::size_t h;
  std::memcpy(&h, id.data(), sizeof h);
  return h;
}

Hashgraph::Hashgraph(AddressBook book, std::vector<Hash32> member_keys, ConsensusOptions options)
    : book_(std::move(book)), keys_(std::move(member_keys)), options_(options) {
  if (keys_.size() != book_.size()) throw ConfigError("one key per member required");
  if (options_.coin_period < 2) throw ConfigError("coin period must be at least 2");
  events_by_creator_.resize(book_.size());
}

std::uint32_t Hashgraph::index_of(const EventId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw DomainError("unknown event " + to_hex(id).substr(0, 16));
  return it->second;
}

bool Hashgraph::has_ancestor(std::uint32_t x, std::uint32_t y) const {
  if (y > x) return false;
  return (nodes_[x].ancestors[y / 64] >> (y % 64)) & 1u;
}

std::uint32_t Hashgraph::self_ancestor_at_height(std::uint32_t x, std::uint64_t height) const {
  std::uint64_t steps = nodes_[x].self_height - height;
  std::uint32_t cur = x;
  for (std::size_t j = 0; steps != 0; ++j, steps >>= 1) {
    if (steps & 1u) cur = nodes_[cur].self_jumps[j];
  }
  return cur;
}

bool Hashgraph::self_ancestor(std::uint32_t x, std::uint32_t y) const {
  const Node& a = nodes_[x];
  const Node& b = nodes_[y];
  if (a.ev.creator != b.ev.creator || a.self_height > b.self_height) return false;
  return self_ancestor_at_height(y, a.self_height) == x;
}

bool Hashgraph::sees_idx(std::uint32_t x, std::uint32_t y) const {
  return has_ancestor(x, y) && !((nodes_[x].forked_mask >> nodes_[y].ev.creator) & 1u);
}

bool Hashgraph::strongly_sees_idx(std::uint32_t x, std::uint32_t y) const {
  if (!sees_idx(x, y)) return false;
  const Node& n = nodes_[x];
  // Given x sees y, some event by creator c that x sees also sees y exactly
  // when c is not forked below x and c's latest event below x descends from y.
  std::uint64_t stake = 0;
  for (MemberId c = 0; c < book_.size(); ++c) {
    if ((n.forked_mask >> c) & 1u) continue;
    const std::uint32_t z = n.latest_by_creator[c];
    if (z != npos && has_ancestor(z, y)) stake += book_.stake(c);
  }
  return book_.is_supermajority(stake);
}

void Hashgraph::link_ancestry(Node& n, std::uint32_t idx) {
  const std::size_t members = book_.size();
  n.ancestors.assign(idx / 64 + 1, 0);
  n.latest_by_creator.assign(members, npos);
  const Node* sp = n.self_parent != npos ? &nodes_[n.self_parent] : nullptr;
  const Node* op = n.other_parent != npos ? &nodes_[n.other_parent] : nullptr;
  for (const Node* p : {sp, op}) {
    if (p == nullptr) continue;
    for (std::size_t w = 0; w < p->ancestors.size(); ++w) n.ancestors[w] |= p->ancestors[w];
    n.forked_mask |= p->forked_mask;
  }
  n.ancestors[idx / 64] |= std::uint64_t{1} << (idx % 64);

  for (MemberId c = 0; c < members; ++c) {
    const std::uint32_t a = sp ? sp->latest_by_creator[c] : npos;
    const std::uint32_t b = op ? op->latest_by_creator[c] : npos;
    std::uint32_t latest;
    if (a == npos || a == b) {
      latest = b;
    } else if (b == npos) {
      latest = a;
    } else if (self_ancestor(a, b)) {
      latest = b;
    } else if (self_ancestor(b, a)) {
      latest = a;
    } else {
      n.forked_mask |= std::uint64_t{1} << c;
      latest = nodes_[a].self_height >= nodes_[b].self_height ? a : b;
    }
    n.latest_by_creator[c] = latest;
  }

  const MemberId me = n.ev.creator;
  const std::uint32_t prev = n.latest_by_creator[me];
  if (prev != npos && !(n.self_parent != npos && (prev == n.self_parent || self_ancestor(prev, n.self_parent)))) {
    n.forked_mask |= std::uint64_t{1} << me;
  }
  n.latest_by_creator[me] = idx;

  if (sp) {
    n.self_height = sp->self_height + 1;
    n.self_jumps.push_back(n.self_parent);
    for (std::size_t j = 1;; ++j) {
      const Node& mid = nodes_[n.self_jumps[j - 1]];
      if (mid.self_jumps.size() < j) break;
      n.self_jumps.push_back(mid.self_jumps[j - 1]);
    }
  }
}

void Hashgraph::record_fork_if_any(std::uint32_t idx) {
  const Node& n = nodes_[idx];
  const auto& mine = events_by_creator_[n.ev.creator];
  // The self-ancestors of n are exactly self_height events of its creator;
  // any other event by the same creator forms a fork with n.
  if (mine.size() == n.self_height) return;
  for (auto it = mine.rbegin(); it != mine.rend(); ++it) {
    if (!self_ancestor(*it, idx)) {
      forks_.push_back({n.ev.creator, nodes_[*it].ev.id, n.ev.id});
      return;
    }
  }
}

void Hashgraph::assign_round_created(std::uint32_t idx) {
  Node& n = nodes_[idx];
  std::uint64_t r = 1;
  if (n.self_parent != npos) r = nodes_[n.self_parent].round;
  if (n.other_parent != npos) r = std::max(r, nodes_[n.other_parent].round);

  std::uint64_t stake = 0;
  std::uint64_t counted = 0;
  if (r <= witnesses_by_round_.size()) {
    for (std::uint32_t w : witnesses_by_round_[r - 1]) {
      const MemberId c = nodes_[w].ev.creator;
      if ((counted >> c) & 1u) continue;
      if (strongly_sees_idx(idx, w)) {
        counted |= std::uint64_t{1} << c;
        stake += book_.stake(c);
      }
    }
  }
  n.round = book_.is_supermajority(stake) ? r + 1 : r;
  n.witness = n.self_parent == npos || n.round > nodes_[n.self_parent].round;
  if (n.witness) {
    if (witnesses_by_round_.size() < n.round) witnesses_by_round_.resize(n.round);
    witnesses_by_round_[n.round - 1].push_back(idx);
  }
}

InsertResult Hashgraph::insert(const Event& e) {
  if (contains(e.id)) return {InsertStatus::Duplicate, "already present"};
  if (e.creator >= book_.size()) return {InsertStatus::Invalid, "creator not in address book"};
  if (compute_event_id(e) != e.id) return {InsertStatus::Invalid, "id does not match content hash"};
  if (!verify_event(e, keys_[e.creator])) return {InsertStatus::Invalid, "bad signature"};

  Node n;
  if (e.self_parent) {
    auto it = index_.find(*e.self_parent);
    if (it == index_.end()) return {InsertStatus::Orphan, "unknown self-parent"};
    n.self_parent = it->second;
    if (nodes_[n.self_parent].ev.creator != e.creator) {
      return {InsertStatus::Invalid, "self-parent has a different creator"};
    }
  }
  if (e.other_parent) {
    auto it = index_.find(*e.other_parent);
    if (it == index_.end()) return {InsertStatus::Orphan, "unknown other-parent"};
    n.other_parent = it->second;
    if (nodes_[n.other_parent].ev.creator == e.creator) {
      return {InsertStatus::Invalid, "other-parent has the same creator"};
    }
  }
  if (nodes_.size() >= npos) throw std::length_error("hashgraph is full");

  const auto idx = static_cast<std::uint32_t>(nodes_.size());
  n.ev = e;
  link_ancestry(n, idx);
  nodes_.push_back(std::move(n));
  index_.emplace(e.id, idx);
  record_fork_if_any(idx);
  events_by_creator_[e.creator].push_back(idx);
  assign_round_created(idx);
  unreceived_.push_back(idx);
  return {InsertStatus::Accepted, {}};
}

const std::vector<std::uint32_t>& Hashgraph::strongly_seen_prev(std::uint32_t y) {
  Node& n = nodes_[y];
  if (!n.prev_computed) {
    if (n.round >= 2) {
      for (std::uint32_t z : witnesses_by_round_[n.round - 2]) {
        if (strongly_sees_idx(y, z)) n.strongly_seen_prev.push_back(z);
      }
    }
    n.prev_computed = true;
  }
  return n.strongly_seen_prev;
}

bool Hashgraph::cast_vote(std::uint32_t y, std::uint32_t x) {
  const std::uint64_t d = nodes_[y].round - nodes_[x].round;
  auto& ballots = votes_[x];
  if (d == 1) {
    ballots[y] = sees_idx(y, x);
    return false;
  }

  std::uint64_t yes = 0;
  std::uint64_t no = 0;
  for (std::uint32_t z : strongly_seen_prev(y)) {
    auto it = ballots.find(z);
    if (it == ballots.end()) throw std::logic_error("missing prior-round vote");
    (it->second ? yes : no) += book_.stake(nodes_[z].ev.creator);
  }
  const bool v = yes >= no;
  const std::uint64_t t = v ? yes : no;

  if (d % options_.coin_period != 0) {
    ballots[y] = v;
    if (book_.is_supermajority(t)) {
      nodes_[x].fame = v ? Fame::Famous : Fame::NotFamous;
      return true;
    }
  } else if (book_.is_supermajority(t)) {
    ballots[y] = v;
  } else {
    // Middle bit of the voter's 256-bit signature.
    ballots[y] = (nodes_[y].ev.signature[16] >> 7) & 1u;
  }
  return false;
}

void Hashgraph::process_witness(std::uint32_t w) {
  const std::uint64_t round = nodes_[w].round;
  if (processed_by_round_.size() < round) processed_by_round_.resize(round);

  // As a voter on earlier, still undecided witnesses.
  for (std::uint64_t r = 1; r < round; ++r) {
    for (std::uint32_t x : processed_by_round_[r - 1]) {
      if (nodes_[x].fame == Fame::Undecided) cast_vote(w, x);
    }
  }
  // As a candidate judged by later witnesses already present.
  if (nodes_[w].fame == Fame::Undecided) {
    bool decided = false;
    for (std::uint64_t r = round + 1; r <= processed_by_round_.size() && !decided; ++r) {
      for (std::uint32_t y : processed_by_round_[r - 1]) {
        if (cast_vote(y, w)) {
          decided = true;
          break;
        }
      }
    }
  }
  processed_by_round_[round - 1].push_back(w);
}

void Hashgraph::elect_fame() {
  for (; fame_cursor_ < nodes_.size(); ++fame_cursor_) {
    if (nodes_[fame_cursor_].witness) process_witness(static_cast<std::uint32_t>(fame_cursor_));
  }
}

std::int64_t weighted_lower_median(std::vector<std::pair<std::int64_t, std::uint64_t>> samples) {
  if (samples.empty()) throw DomainError("weighted median of an empty basket");
  std::sort(samples.begin(), samples.end());
  std::uint64_t total = 0;
  for (const auto& [ts, weight] : samples) total += weight;
  if (total == 0) throw DomainError("weighted median with zero total weight");
  std::uint64_t idx = (total - 1) / 2;
  for (const auto& [ts, weight] : samples) {
    if (idx < weight) return ts;
    idx -= weight;
  }
  return samples.back().first;
}

void Hashgraph::finalize_round(std::uint64_t r) {
  std::vector<std::uint32_t> famous;
  for (std::uint32_t w : witnesses_by_round_[r - 1]) {
    if (nodes_[w].fame == Fame::Famous) famous.push_back(w);
  }
  if (famous_by_round_.size() < r) famous_by_round_.resize(r);
  famous_by_round_[r - 1] = famous;

  std::vector<std::uint32_t> unique;
  for (std::uint32_t w : famous) {
    const auto same = std::count_if(famous.begin(), famous.end(), [&](std::uint32_t o) {
      return nodes_[o].ev.creator == nodes_[w].ev.creator;
    });
    if (same == 1) unique.push_back(w);
  }
  // A round without unique famous witnesses receives nothing.
  if (unique.empty()) return;

  Hash32 whitening{};
  for (std::uint32_t w : unique) {
    for (std::size_t i = 0; i < whitening.size(); ++i) whitening[i] ^= nodes_[w].ev.signature[i];
  }

  std::vector<std::uint32_t> received;
  std::vector<std::uint32_t> pending;
  for (std::uint32_t x : unreceived_) {
    const bool all = nodes_[x].round <= r &&
                     std::all_of(unique.begin(), unique.end(), [&](std::uint32_t w) { return has_ancestor(w, x); });
    (all ? received : pending).push_back(x);
  }
  unreceived_.swap(pending);

  for (std::uint32_t x : received) {
    std::vector<std::pair<std::int64_t, std::uint64_t>> basket;
    for (std::uint32_t w : unique) {
      // Earliest self-ancestor of w that descends from x.
      std::uint32_t cur = w;
      for (std::size_t j = 32; j-- > 0;) {
        if (j < nodes_[cur].self_jumps.size() && has_ancestor(nodes_[cur].self_jumps[j], x)) {
          cur = nodes_[cur].self_jumps[j];
        }
      }
      basket.emplace_back(nodes_[cur].ev.claimed_timestamp, book_.stake(nodes_[w].ev.creator));
    }
    nodes_[x].round_received = r;
    nodes_[x].consensus_timestamp = weighted_lower_median(std::move(basket));
  }

  auto whitened = [&](std::uint32_t x) {
    Hash32 k = nodes_[x].ev.id;
    for (std::size_t i = 0; i < k.size(); ++i) k[i] ^= whitening[i];
    return k;
  };
  std::sort(received.begin(), received.end(), [&](std::uint32_t a, std::uint32_t b) {
    const auto ta = *nodes_[a].consensus_timestamp;
    const auto tb = *nodes_[b].consensus_timestamp;
    if (ta != tb) return ta < tb;
    return whitened(a) < whitened(b);
  });
  for (std::uint32_t x : received) {
    nodes_[x].position = order_.size();
    order_.push_back(x);
    ordered_tx_count_ += nodes_[x].ev.payload.size();
  }
}

void Hashgraph::assign_round_received() {
  while (next_round_ <= witnesses_by_round_.size()) {
    const auto& ws = witnesses_by_round_[next_round_ - 1];
    const bool decided = std::all_of(ws.begin(), ws.end(), [&](std::uint32_t w) {
      return nodes_[w].fame != Fame::Undecided;
    });
    if (!decided) break;
    finalize_round(next_round_);
    ++next_round_;
  }
}

void Hashgraph::update_consensus() {
  elect_fame();
  assign_round_received();
}

RoundInfo Hashgraph::round_info(const EventId& id) const {
  const Node& n = nodes_[index_of(id)];
  return {n.round, n.witness, n.fame, n.round_received, n.consensus_timestamp, n.position};
}

bool Hashgraph::is_ancestor(const EventId& x, const EventId& y) const {
  return has_ancestor(index_of(y), index_of(x));
}

bool Hashgraph::is_self_ancestor(const EventId& x, const EventId& y) const {
  return self_ancestor(index_of(x), index_of(y));
}

bool Hashgraph::sees(const EventId& x, const EventId& y) const { return sees_idx(index_of(x), index_of(y)); }

bool Hashgraph::strongly_sees(const EventId& x, const EventId& y) const {
  return strongly_sees_idx(index_of(x), index_of(y));
}

bool Hashgraph::forked_in_ancestry(const EventId& x, MemberId creator) const {
  return (nodes_[index_of(x)].forked_mask >> creator) & 1u;
}

std::vector<EventId> Hashgraph::witnesses(std::uint64_t round) const {
  std::vector<EventId> out;
  if (round == 0 || round > witnesses_by_round_.size()) return out;
  for (std::uint32_t w : witnesses_by_round_[round - 1]) out.push_back(nodes_[w].ev.id);
  return out;
}

std::vector<EventId> Hashgraph::famous_witnesses(std::uint64_t round) const {
  std::vector<EventId> out;
  if (round == 0 || round > famous_by_round_.size()) return out;
  for (std::uint32_t w : famous_by_round_[round - 1]) out.push_back(nodes_[w].ev.id);
  return out;
}

std::vector<EventId> Hashgraph::unique_famous_witnesses(std::uint64_t round) const {
  std::vector<EventId> out;
  if (round == 0 || round > famous_by_round_.size()) return out;
  const auto& famous = famous_by_round_[round - 1];
  for (std::uint32_t w : famous) {
    const auto same = std::count_if(famous.begin(), famous.end(), [&](std::uint32_t o) {
      return nodes_[o].ev.creator == nodes_[w].ev.creator;
    });
    if (same == 1) out.push_back(nodes_[w].ev.id);
  }
  return out;
}

std::vector<EventId> Hashgraph::consensus_events() const {
  std::vector<EventId> out;
  out.reserve(order_.size());
  for (std::uint32_t x : order_) out.push_back(nodes_[x].ev.id);
  return out;
}

std::vector<OrderedTransaction> Hashgraph::consensus_order() const {
  std::vector<OrderedTransaction> out;
  out.reserve(ordered_tx_count_);
  for (std::uint32_t x : order_) {
    const Node& n = nodes_[x];
    for (std::size_t i = 0; i < n.ev.payload.size(); ++i) {
      OrderedTransaction t;
      t.tx = n.ev.payload[i];
      t.position = out.size();
      t.event_position = *n.position;
      t.payload_index = i;
      t.event = n.ev.id;
      t.creator = n.ev.creator;
      t.round_received = *n.round_received;
      t.consensus_timestamp = *n.consensus_timestamp;
      t.famous_witness = n.witness && n.fame == Fame::Famous;
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::optional<bool> Hashgraph::vote(const EventId& voter, const EventId& candidate) const {
  auto it = votes_.find(index_of(candidate));
  if (it == votes_.end()) return std::nullopt;
  auto jt = it->second.find(index_of(voter));
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

ParentMap parent_map(const Hashgraph& g) {
  ParentMap out;
  out.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Event& e = g.event_at(i);
    out.emplace(to_hex(e.id), ParentEdges{e.self_parent, e.other_parent});
  }
  return out;
}

bool consistent(const ParentMap& p, const ParentMap& q) {
  // Both maps are closed under parents, so equal parent edges on every shared
  // event give equal ancestor sub-DAGs by induction. A shared event whose
  // parents are missing from the other side also breaks consistency.
  for (const auto& [id, edges] : p) {
    auto it = q.find(id);
    if (it == q.end()) continue;
    if (!(it->second == edges)) return false;
    for (const auto& parent : {edges.self_parent, edges.other_parent}) {
      if (parent && (!p.count(to_hex(*parent)) || !q.count(to_hex(*parent)))) return false;
    }
  }
  return true;
}

bool consistent(const Hashgraph& p, const Hashgraph& q) { return consistent(parent_map(p), parent_map(q)); }

}  // namespace dltr
