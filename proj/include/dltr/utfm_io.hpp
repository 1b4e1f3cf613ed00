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

#include <filesystem>
#include <string>
#include <string_view>

#include "dltr/utfm.hpp"

namespace dltr {

// Line-oriented model format:
//
//   UTFM v1
//   STATE <name> <phase> [ACCEPT]
//   SYMBOL <symbol>
//   INIT <state> <prob>
//   TRANS <state> <symbol> <state> <prob>
//   EMIT <state> <symbol> <prob>
//
// Probabilities are written with 12 significant digits. SYMBOL lines fix the
// alphabet order; without them the alphabet is taken in order of first use.
// Blank lines and lines starting with '#' are ignored.
std::string write_utfm(const Utfm& model);

// Throws ParseError on malformed input or when the loaded model fails validate().
Utfm read_utfm(std::string_view text);

void save_utfm(const std::filesystem::path& path, const Utfm& model);
Utfm load_utfm(const std::filesystem::path& path);

}  // namespace dltr
