// Copyright 2026 The cxlplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CXLPLAN_TYPES_HPP_
#define CXLPLAN_TYPES_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace cxlplan {

// Where an operation executes. Host cores sit next to local memory, device
// cores sit next to the far (CXL-attached) memory.
enum class ComputeLoc : std::uint8_t { kHost = 0, kDevice = 1 };

// Which memory tier holds a tensor, seen from the host.
enum class Placement : std::uint8_t { kLocal = 0, kRemote = 1 };

using Bytes = std::uint64_t;

constexpr double kBytesPerGB = 1e9;

std::string_view to_string(ComputeLoc loc);
std::string_view to_string(Placement p);

// Case-insensitive; throws Error(kParseError) on anything else.
ComputeLoc parse_compute(std::string_view text);
Placement parse_placement(std::string_view text);

constexpr ComputeLoc flip(ComputeLoc c) {
  return c == ComputeLoc::kHost ? ComputeLoc::kDevice : ComputeLoc::kHost;
}
constexpr Placement flip(Placement p) {
  return p == Placement::kLocal ? Placement::kRemote : Placement::kLocal;
}

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

// Strict decimal parse of the whole string; throws Error(kParseError).
double parse_double(std::string_view text);
std::uint64_t parse_uint(std::string_view text);

// Whole-file helpers; throw Error(kIoError).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

}  // namespace cxlplan

#endif  // CXLPLAN_TYPES_HPP_
