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
#include <unordered_map>
#include <vector>

#include "dltr/event.hpp"

namespace dltr {

// Fixed membership for a consensus epoch. Member ids are positions in the book.
class AddressBook {
 public:
  AddressBook() = default;
  AddressBook(std::vector<std::string> names, std::vector<std::uint64_t> stakes);

  static AddressBook equal_stake(std::vector<std::string> names, std::uint64_t stake = 1);

  std::size_t size() const { return names_.size(); }
  const std::string& name(MemberId m) const { return names_.at(m); }
  std::uint64_t stake(MemberId m) const { return stakes_.at(m); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::uint64_t>& stakes() const { return stakes_; }
  std::uint64_t total_stake() const { return total_; }

  // Strictly more than two thirds of the total stake.
  bool is_supermajority(std::uint64_t stake) const {
    __extension__ using Wide = unsigned __int128;
    return static_cast<Wide>(stake) * 3 > static_cast<Wide>(total_) * 2;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::uint64_t> stakes_;
  std::uint64_t total_ = 0;
};

inline constexpr std::size_t kMaxMembers = 64;

enum class Fame : std::uint8_t { Undecided, Famous, NotFamous };

struct RoundInfo {
  std::uint64_t round_created = 0;
  bool is_witness = false;
  Fame fame = Fame::Undecided;
  std::optional<std::uint64_t> round_received;
  std::optional<std::int64_t> consensus_timestamp;
  std::optional<std::uint64_t> consensus_position;
};

enum class InsertStatus { Accepted, Duplicate, Orphan, Invalid };

struct InsertResult {
  InsertStatus status = InsertStatus::Accepted;
  std::string reason;

  bool accepted() const { return status == InsertStatus::Accepted; }
};

// Two events by one creator, neither a self-ancestor of the other.
struct Fork {
  MemberId creator = 0;
  EventId first{};
  EventId second{};
};

struct OrderedTransaction {
  Transaction tx;
  std::uint64_t position = 0;        // consecutive over transactions
  std::uint64_t event_position = 0;  // position of the carrying event
  std::uint64_t payload_index = 0;
  EventId event{};
  MemberId creator = 0;
  std::uint64_t round_received = 0;
  std::int64_t consensus_timestamp = 0;
  bool famous_witness = false;
};

struct ConsensusOptions {
  // Every coin_period-th voting round an undecided election falls back to a
  // pseudo-random bit taken from the voter's signature.
  std::uint64_t coin_period = 10;
};

// One replica's hashgraph. Single writer: insert() and update_consensus() must
// not run concurrently with anything else on the same instance; const queries
// may run concurrently with each other.
//
// Rounds and witness flags are assigned on insertion. update_consensus()
// elects famous witnesses, then assigns round received, consensus timestamps
// and positions for every round whose witnesses are all decided. Positions,
// once assigned, never change.
class Hashgraph {
 public:
  Hashgraph(AddressBook book, std::vector<Hash32> member_keys, ConsensusOptions options = {});

  InsertResult insert(const Event& e);
  void update_consensus();
  void elect_fame();
  void assign_round_received();

  const AddressBook& book() const { return book_; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(const EventId& id) const { return index_.count(id) != 0; }
  const Event& event(const EventId& id) const { return nodes_[index_of(id)].ev; }
  // Events in insertion order, which is a topological order.
  const Event& event_at(std::size_t i) const { return nodes_.at(i).ev; }
  RoundInfo round_info(const EventId& id) const;

  // x is y, a parent of y, a parent of a parent of y, ...
  bool is_ancestor(const EventId& x, const EventId& y) const;
  // As is_ancestor, following self-parent edges only.
  bool is_self_ancestor(const EventId& x, const EventId& y) const;
  // y is an ancestor of x and x's ancestors hold no fork by y's creator.
  bool sees(const EventId& x, const EventId& y) const;
  // x sees y through events whose creators hold a supermajority of stake.
  bool strongly_sees(const EventId& x, const EventId& y) const;
  bool forked_in_ancestry(const EventId& x, MemberId creator) const;

  std::uint64_t max_round() const { return witnesses_by_round_.size(); }
  std::vector<EventId> witnesses(std::uint64_t round) const;
  // Highest round r such that every round <= r has been ordered.
  std::uint64_t last_decided_round() const { return next_round_ - 1; }
  // Famous witnesses of a decided round, in insertion order.
  std::vector<EventId> famous_witnesses(std::uint64_t round) const;
  std::vector<EventId> unique_famous_witnesses(std::uint64_t round) const;

  const std::vector<Fork>& forks() const { return forks_; }

  std::vector<EventId> consensus_events() const;
  std::vector<OrderedTransaction> consensus_order() const;
  std::uint64_t ordered_transaction_count() const { return ordered_tx_count_; }
  std::size_t ordered_event_count() const { return order_.size(); }
  const Event& ordered_event(std::size_t position) const { return nodes_[order_.at(position)].ev; }

  // Vote of `voter` on the fame of `candidate`, if it was computed.
  std::optional<bool> vote(const EventId& voter, const EventId& candidate) const;

 private:
  static constexpr std::uint32_t npos = UINT32_MAX;

  struct Node {
    Event ev;
    std::uint32_t self_parent = npos;
    std::uint32_t other_parent = npos;
    std::uint64_t self_height = 0;
    std::vector<std::uint64_t> ancestors;         // bitset over node indices, includes self
    std::vector<std::uint32_t> latest_by_creator;  // latest ancestor per creator
    std::uint64_t forked_mask = 0;                 // creators with a fork among ancestors
    std::vector<std::uint32_t> self_jumps;         // 2^j-th self-ancestor

    std::uint64_t round = 0;
    bool witness = false;
    Fame fame = Fame::Undecided;
    std::optional<std::uint64_t> round_received;
    std::optional<std::int64_t> consensus_timestamp;
    std::optional<std::uint64_t> position;

    std::vector<std::uint32_t> strongly_seen_prev;  // witnesses of round-1 strongly seen
    bool prev_computed = false;
  };

  std::uint32_t index_of(const EventId& id) const;
  bool has_ancestor(std::uint32_t x, std::uint32_t y) const;
  bool self_ancestor(std::uint32_t x, std::uint32_t y) const;
  bool sees_idx(std::uint32_t x, std::uint32_t y) const;
  bool strongly_sees_idx(std::uint32_t x, std::uint32_t y) const;
  std::uint32_t self_ancestor_at_height(std::uint32_t x, std::uint64_t height) const;

  void link_ancestry(Node& n, std::uint32_t idx);
  void assign_round_created(std::uint32_t idx);
  void record_fork_if_any(std::uint32_t idx);

  void process_witness(std::uint32_t w);
  const std::vector<std::uint32_t>& strongly_seen_prev(std::uint32_t y);
  // Computes vote(y, x); returns true if it decided x.
  bool cast_vote(std::uint32_t y, std::uint32_t x);
  void finalize_round(std::uint64_t r);

  AddressBook book_;
  std::vector<Hash32> keys_;
  ConsensusOptions options_;

  std::vector<Node> nodes_;
  struct IdHash {
    std::size_t operator()(const EventId& id) const noexcept;
  };
  std::unordered_map<EventId, std::uint32_t, IdHash> index_;
  std::vector<std::vector<std::uint32_t>> events_by_creator_;
  std::vector<std::vector<std::uint32_t>> witnesses_by_round_;  // round r at [r-1]
  std::vector<Fork> forks_;

  // Fame elections.
  std::size_t fame_cursor_ = 0;
  std::vector<std::vector<std::uint32_t>> processed_by_round_;
  std::unordered_map<std::uint32_t, std::unordered_map<std::uint32_t, bool>> votes_;  // candidate -> voter -> vote

  // Ordering.
  std::uint64_t next_round_ = 1;
  std::vector<std::vector<std::uint32_t>> famous_by_round_;
  std::vector<std::uint32_t> unreceived_;
  std::vector<std::uint32_t> order_;
  std::uint64_t ordered_tx_count_ = 0;
};

// Stake-weighted lower median: each timestamp counts stake-many times and the
// element at index floor((k-1)/2) of the sorted multiset is returned.
std::int64_t weighted_lower_median(std::vector<std::pair<std::int64_t, std::uint64_t>> samples);

// Parent edges of every event, keyed by id.
struct ParentEdges {
  std::optional<EventId> self_parent;
  std::optional<EventId> other_parent;
  friend bool operator==(const ParentEdges&, const ParentEdges&) = default;
};
// Keyed by hex event id.
using ParentMap = std::unordered_map<std::string, ParentEdges>;

ParentMap parent_map(const Hashgraph& g);

// Every event present in both graphs has the same ancestor sub-DAG in both.
bool consistent(const ParentMap& p, const ParentMap& q);
bool consistent(const Hashgraph& p, const Hashgraph& q);

}  // namespace dltr
