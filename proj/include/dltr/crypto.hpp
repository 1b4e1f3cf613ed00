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
#include <span>
#include <string>
#include <string_view>

namespace dltr {

using Hash32 = std::array<std::uint8_t, 32>;

Hash32 sha256(std::span<const std::uint8_t> data);
Hash32 sha256(std::string_view data);

// HMAC-SHA256; stands in for an event signature in the simulation.
Hash32 hmac_sha256(const Hash32& key, std::span<const std::uint8_t> data);

std::string to_hex(std::span<const std::uint8_t> bytes);
Hash32 hash_from_hex(std::string_view hex);

// Big-endian append helpers for canonical encodings.
void put_u32(std::string& out, std::uint32_t v);
void put_u64(std::string& out, std::uint64_t v);
inline void put_i64(std::string& out, std::int64_t v) { put_u64(out, static_cast<std::uint64_t>(v)); }

}  // namespace dltr
