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

namespace dltr {

// Recovery impact of one disruption resolution, in minutes. Negative delays
// mean the flight runs earlier than planned.
struct RecoveryImpact {
  std::int64_t tactical_delay_min = 0;
  std::int64_t turnaround_min = 0;
  std::int64_t block_time_min = 0;
  std::int64_t strategic_delay_min = 0;

  friend bool operator==(const RecoveryImpact&, const RecoveryImpact&) = default;
};

}  // namespace dltr
