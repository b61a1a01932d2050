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

#ifndef CXLPLAN_TEXT_TABLE_HPP_
#define CXLPLAN_TEXT_TABLE_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cxlplan {

struct DelimitedRow {
  std::size_t line = 0;  // 1-based line number in the source text
  std::vector<std::string> fields;
};

// Comma-separated rows with surrounding whitespace trimmed from each field.
// Blank lines and lines starting with '#' are skipped.
std::vector<DelimitedRow> parse_delimited(std::string_view text);

}  // namespace cxlplan

#endif  // CXLPLAN_TEXT_TABLE_HPP_
