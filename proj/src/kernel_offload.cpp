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

#include "cxlplan/kernel_offload.hpp"

#include <set>

#include "cxlplan/error.hpp"
#include "cxlplan/text_table.hpp"

namespace cxlplan {

void KernelProfile::validate() const {
  if (!(t_baseline_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "kernel '" + kernel_id + "': t_baseline_s must be positive");
  }
  if (!(t_device_s >= 0.0) || !(alloc_s >= 0.0) || !(copy_s >= 0.0) ||
      !(reconstruct_s >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "kernel '" + kernel_id + "': times must be non-negative");
  }
  if (t_device_s + alloc_s + copy_s + reconstruct_s <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "kernel '" + kernel_id + "': offloaded time is zero");
  }
}

KernelProfile make_kernel_profile(std::string kernel_id, double t_baseline_s,
                                  double t_device_s, double alloc_s,
                                  Bytes copy_bytes, double reconstruct_s,
                                  const PlatformSpec& platform) {
  platform.validate();
  KernelProfile k;
  k.kernel_id = std::move(kernel_id);
  k.t_baseline_s = t_baseline_s;
  k.t_device_s = t_device_s;
  k.bytes_shared = copy_bytes;
  k.alloc_s = alloc_s + platform.offload_overhead.alloc_s;
  k.copy_s = static_cast<double>(copy_bytes) /
             (platform.offload_overhead.copy_bw_GBps * kBytesPerGB);
  k.reconstruct_s = reconstruct_s + platform.offload_overhead.reconstruct_s;
  k.validate();
  return k;
}

OffloadMetrics offload_metrics(const KernelProfile& k) {
  k.validate();
  OffloadMetrics m;
  m.t_overhead_s = k.alloc_s + k.copy_s + k.reconstruct_s;
  m.t_offload_total_s = k.t_device_s + m.t_overhead_s;
  m.saving = k.t_baseline_s / m.t_offload_total_s;
  m.overhead_fraction = m.t_overhead_s / m.t_offload_total_s;
  return m;
}

std::string_view to_string(OffloadDecision d) {
  return d == OffloadDecision::kOffload ? "offload" : "stay";
}

OffloadDecision offload_decision(const KernelProfile& k, double threshold,
                                 double overhead_cap) {
  if (!(threshold >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be >= 1");
  }
  if (!(overhead_cap > 0.0 && overhead_cap <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "overhead cap must be in (0, 1]");
  }
  const OffloadMetrics m = offload_metrics(k);
  return m.saving >= threshold && m.overhead_fraction <= overhead_cap
             ? OffloadDecision::kOffload
             : OffloadDecision::kStay;
}

std::vector<KernelProfile> kernel_profiles_from_csv(
    std::string_view text, const std::string& source,
    const PlatformSpec& platform) {
  static const std::vector<std::string> kHeader = {
      "kernel_id", "t_baseline_s", "t_device_s",
      "alloc_s",   "copy_bytes",   "reconstruct_s"};
  const auto rows = parse_delimited(text);
  if (rows.empty() || rows.front().fields != kHeader) {
    throw Error(ErrorCode::kParseError,
                source + ": row 1: expected header "
                         "kernel_id,t_baseline_s,t_device_s,alloc_s,"
                         "copy_bytes,reconstruct_s");
  }
  std::vector<KernelProfile> out;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    const std::string where = source + ": row " + std::to_string(rows[r].line);
    if (f.size() != kHeader.size()) {
      throw Error(ErrorCode::kParseError, where + ": expected 6 fields");
    }
    if (!seen.insert(f[0]).second) {
      throw Error(ErrorCode::kParseError, where + ": duplicate kernel " + f[0]);
    }
    try {
      out.push_back(make_kernel_profile(f[0], parse_double(f[1]),
                                        parse_double(f[2]), parse_double(f[3]),
                                        parse_uint(f[4]), parse_double(f[5]),
                                        platform));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, where + ": " + e.what());
    }
  }
  return out;
}

std::vector<KernelProfile> load_kernel_profiles(const std::string& path,
                                                const PlatformSpec& platform) {
  return kernel_profiles_from_csv(read_text_file(path), path, platform);
}

}  // namespace cxlplan
