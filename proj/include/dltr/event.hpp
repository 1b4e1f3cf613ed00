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

#include "dltr/crypto.hpp"
#include "dltr/impact.hpp"

namespace dltr {

using EventId = Hash32;
using MemberId = std::uint64_t;

struct Transaction {
  std::string role;
  std::uint64_t flight_id = 0;
  std::uint64_t queue_position = 0;
  double stake_entropy = 0.0;  // reliability of the resolution, in bits
  RecoveryImpact impact;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

// role (u32 length + bytes), flight_id u64, queue_position u64,
// stake_entropy as IEEE-754 bits u64, then the four impact fields as i64;
// all big-endian.
std::string canonical_bytes(const Transaction& tx);

struct Event {
  MemberId creator = 0;
  std::optional<EventId> self_parent;
  std::optional<EventId> other_parent;
  std::int64_t claimed_timestamp = 0;  // simulated milliseconds
  std::vector<Transaction> payload;
  Hash32 signature{};
  EventId id{};
};

// creator (8), self-parent (32, zero if absent), other-parent (32, zero if
// absent), claimed timestamp (8), payload count (4), then each transaction as
// a u32 length followed by its canonical bytes. Integers are big-endian. The
// id and signature are not part of the encoding.
std::string canonical_encoding(const Event& e);

EventId compute_event_id(const Event& e);

// Keyed-hash signature over the canonical encoding.
Hash32 sign_event(const Event& e, const Hash32& key);
bool verify_event(const Event& e, const Hash32& key);

// Fills in id and signature.
Event make_event(MemberId creator, const Hash32& key, std::optional<EventId> self_parent,
                 std::optional<EventId> other_parent, std::int64_t claimed_timestamp,
                 std::vector<Transaction> payload);

// Simulated per-member key material.
Hash32 derive_member_key(std::uint64_t seed, MemberId member);
std::vector<Hash32> derive_member_keys(std::uint64_t seed, std::size_t members);

}  // namespace dltr
