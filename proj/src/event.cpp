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


#include "dltr/event.hpp"

#include <bit>
#include <cstring>

namespace dltr {

namespace {

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

void put_hash(std::string& out, const std::optional<EventId>& h) {
  if (h) {
    out.append(reinterpret_cast<const char*>(h->data()), h->size());
  } else {
    out.append(32, '\0');
  }
}

}  // namespace

std::string canonical_bytes(const Transaction& tx) {
  std::string out;
  put_u32(out, static_cast<std::uint32_t>(tx.role.size()));
  out += tx.role;
  put_u64(out, tx.flight_id);
  put_u64(out, tx.queue_position);
  put_u64(out, std::bit_cast<std::uint64_t>(tx.stake_entropy));
  put_i64(out, tx.impact.tactical_delay_min);
  put_i64(out, tx.impact.turnaround_min);
  put_i64(out, tx.impact.block_time_min);
  put_i64(out, tx.impact.strategic_delay_min);
  return out;
}

std::string canonical_encoding(const Event& e) {
  std::string out;
  put_u64(out, e.creator);
  put_hash(out, e.self_parent);
  put_hash(out, e.other_parent);
  put_i64(out, e.claimed_timestamp);
  put_u32(out, static_cast<std::uint32_t>(e.payload.size()));
  for (const auto& tx : e.payload) {
    const auto bytes = canonical_bytes(tx);
    put_u32(out, static_cast<std::uint32_t>(bytes.size()));
    out += bytes;
  }
  return out;
}

EventId compute_event_id(const Event& e) { return sha256(canonical_encoding(e)); }

Hash32 sign_event(const Event& e, const Hash32& key) { return hmac_sha256(key, as_bytes(canonical_encoding(e))); }

bool verify_event(const Event& e, const Hash32& key) { return sign_event(e, key) == e.signature; }

Event make_event(MemberId creator, const Hash32& key, std::optional<EventId> self_parent,
                 std::optional<EventId> other_parent, std::int64_t claimed_timestamp,
                 std::vector<Transaction> payload) {
  Event e;
  e.creator = creator;
  e.self_parent = self_parent;
  e.other_parent = other_parent;
  e.claimed_timestamp = claimed_timestamp;
  e.payload = std::move(payload);
  const auto enc = canonical_encoding(e);
  e.id = sha256(enc);
  e.signature = hmac_sha256(key, as_bytes(enc));
  return e;
}

Hash32 derive_member_key(std::uint64_t seed, MemberId member) {
  std::string material = "dltr-member-key";
  put_u64(material, seed);
  put_u64(material, member);
  return sha256(material);
}

std::vector<Hash32> derive_member_keys(std::uint64_t seed, std::size_t members) {
  std::vector<Hash32> keys;
  keys.reserve(members);
  for (std::size_t m = 0; m < members; ++m) keys.push_back(derive_member_key(seed, m));
  return keys;
}

}  // namespace dltr
