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

#ifndef CXLPLAN_KERNEL_OFFLOAD_HPP_
#define CXLPLAN_KERNEL_OFFLOAD_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "cxlplan/platform.hpp"
#include "cxlplan/types.hpp"

namespace cxlplan {

// A standalone kernel run two ways: on host cores against far memory
// (baseline), and on device cores next to the data after its working set is
// made visible to the device.
struct KernelProfile {
  std::string kernel_id;
  double t_baseline_s = 0.0;
  double t_device_s = 0.0;
  Bytes bytes_shared = 0;
  double alloc_s = 0.0;
  double copy_s = 0.0;
  double reconstruct_s = 0.0;

  void validate() const;
};

// copy_s = copy_bytes / platform.offload_overhead.copy_bw_GBps. The
// platform's fixed alloc_s and reconstruct_s are added to the kernel's own.
KernelProfile make_kernel_profile(std::string kernel_id, double t_baseline_s,
                                  double t_device_s, double alloc_s,
                                  Bytes copy_bytes, double reconstruct_s,
                                  const PlatformSpec& platform);

struct OffloadMetrics {
  double t_overhead_s = 0.0;
  double t_offload_total_s = 0.0;
  double saving = 0.0;             // t_baseline / t_offload_total
  double overhead_fraction = 0.0;  // t_overhead / t_offload_total
};

OffloadMetrics offload_metrics(const KernelProfile& k);

enum class OffloadDecision : std::uint8_t { kOffload, kStay };

std::string_view to_string(OffloadDecision d);

// Offload iff saving >= threshold and overhead_fraction <= overhead_cap.
OffloadDecision offload_decision(const KernelProfile& k, double threshold = 1.0,
                                 double overhead_cap = 0.10);

// Rows `kernel_id,t_baseline_s,t_device_s,alloc_s,copy_bytes,reconstruct_s`.
std::vector<KernelProfile> kernel_profiles_from_csv(std::string_view text,
                                                    const std::string& source,
                                                    const PlatformSpec& platform);
std::vector<KernelProfile> load_kernel_profiles(const std::string& path,
                                                const PlatformSpec& platform);

}  // namespace cxlplan

#endif  // CXLPLAN_KERNEL_OFFLOAD_HPP_
