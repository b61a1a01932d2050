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

#include "cxlplan/types.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cxlplan/error.hpp"

namespace cxlplan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kDanglingReference: return "DanglingReference";
    case ErrorCode::kDuplicateProducer: return "DuplicateProducer";
    case ErrorCode::kMissingProducer: return "MissingProducer";
    case ErrorCode::kKindMismatch: return "KindMismatch";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kInvalidShapeParams: return "InvalidShapeParams";
    case ErrorCode::kUnknownOp: return "UnknownOp";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIncompleteLUT: return "IncompleteLUT";
    case ErrorCode::kInvalidPlan: return "InvalidPlan";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

std::string_view to_string(ComputeLoc loc) {
  return loc == ComputeLoc::kHost ? "host" : "device";
}

std::string_view to_string(Placement p) {
  return p == Placement::kLocal ? "local" : "remote";
}

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

ComputeLoc parse_compute(std::string_view text) {
  const std::string t = lower(text);
  if (t == "host") return ComputeLoc::kHost;
  if (t == "device") return ComputeLoc::kDevice;
  throw Error(ErrorCode::kParseError,
              "expected host|device, got '" + std::string(text) + "'");
}

Placement parse_placement(std::string_view text) {
  const std::string t = lower(text);
  if (t == "local") return Placement::kLocal;
  if (t == "remote") return Placement::kRemote;
  throw Error(ErrorCode::kParseError,
              "expected local|remote, got '" + std::string(text) + "'");
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() ||
      !std::isfinite(value)) {
    throw Error(ErrorCode::kParseError,
                "not a decimal number: '" + std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_uint(std::string_view text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::kParseError,
                "not a non-negative integer: '" + std::string(text) + "'");
  }
  return value;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path);
}

}  // namespace cxlplan
