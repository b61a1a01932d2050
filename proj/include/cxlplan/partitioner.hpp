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

#ifndef CXLPLAN_PARTITIONER_HPP_
#define CXLPLAN_PARTITIONER_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cxlplan/graph.hpp"
#include "cxlplan/platform.hpp"
#include "cxlplan/types.hpp"

namespace cxlplan {

// Weighted sum of normalized latency and normalized host-resident bytes.
// alpha = 1 is pure latency, alpha = 0 is pure host-byte minimization.
struct Objective {
  double alpha = 1.0;
  double latency_norm = 1.0;  // seconds
  double bytes_norm = 1.0;    // bytes

  void validate() const;
};

// Normalizes by the all-local plan latency and by total_bytes(dag). Both
// fall back to 1 when they would be zero.
Objective make_objective(double alpha, const Dag& dag, const PerfLUT& lut);

struct PlacementPlan {
  std::map<std::string, ComputeLoc> compute;
  std::map<std::string, Placement> placement;

  bool operator==(const PlacementPlan&) const = default;
};

// Throws InvalidPlan if any op or tensor lacks a decision, an unknown id is
// present, or a pinned tensor is placed against its pin.
void validate_plan(const PlacementPlan& plan, const Dag& dag);

Bytes host_bytes(const PlacementPlan& plan, const Dag& dag);

// Collapses per-tensor placements to the op's LUT axes: each axis goes to
// the tier holding the majority of the axis' bytes, exact ties to Remote.
// Axes without tensors are canonical: weights Local, inputs/outputs Remote.
OpConfig effective_config(const PlacementPlan& plan, const Dag& dag,
                          std::size_t op_idx);

using OpConfigMap = std::map<std::string, OpConfig>;

// Host bytes charged to one op: its weights when weights are Local (a shared
// weight is split evenly between its users), its outputs when outputs are
// Local, and its share of producer-less inputs when inputs are Local.
// Every tensor is charged exactly once over a consistent assignment.
double attributed_host_bytes(const Dag& dag, std::size_t op_idx,
                             const OpConfig& cfg);

double op_cost(const OpNode& op, const OpConfig& cfg, const PerfLUT& lut,
               const Objective& obj, const Dag& dag);

// Configs the op may pick: valid LUT keys whose axes respect pins (an axis
// whose tensors are all pinned to one tier is forced there) and whose empty
// axes sit at their canonical value.
std::vector<OpConfig> feasible_configs(const Dag& dag, std::size_t op_idx);

// Independent per-op argmin. Ties go to the config with more Device/Remote
// axes, then to the lexicographically larger tuple.
OpConfigMap per_op_select(const Dag& dag, const PerfLUT& lut,
                          const Objective& obj);

struct Demand {
  std::string source;  // op id, or "pin"
  Placement placement;

  bool operator==(const Demand&) const = default;
};

struct TensorConflict {
  std::string tensor_id;
  std::vector<Demand> demands;

  bool operator==(const TensorConflict&) const = default;
};

struct ConflictReport {
  std::vector<TensorConflict> conflicts;  // in DAG tensor order

  bool empty() const { return conflicts.empty(); }
  bool contains(std::string_view tensor_id) const;
};

ConflictReport detect_conflicts(const OpConfigMap& raw, const Dag& dag);

struct ResolveOptions {
  // 1 is the single topological pass. Larger values re-run the neighborhood
  // choice over every shared tensor until nothing changes, capped at
  // max(1, #tensors) passes.
  std::size_t max_passes = 1;
};

struct ResolveStats {
  std::size_t lut_probes = 0;
  std::size_t passes = 0;
};

// Visits conflicted tensors in topological order of their producers. Each
// candidate placement is priced by the sum, over the ops touching the tensor,
// of that op's cheapest config with the tensor's axis at the candidate; an op
// may re-pick its compute side and any axis whose tensors are its alone.
// The cheaper side wins (ties Remote, pins always win) and the neighbors'
// configs are updated before the next tensor is visited.
PlacementPlan resolve_conflicts(const OpConfigMap& raw,
                                const ConflictReport& report, const Dag& dag,
                                const PerfLUT& lut, const Objective& obj,
                                const ResolveOptions& options = {},
                                ResolveStats* stats = nullptr);

struct PartitionResult {
  PlacementPlan plan;
  OpConfigMap raw;
  ConflictReport conflicts;
  // Distinct (op, config) cost evaluations across selection and resolution.
  std::size_t lut_probes = 0;
  std::size_t passes = 0;
};

PartitionResult partition_detailed(const Dag& dag, const PerfLUT& lut,
                                   const Objective& obj,
                                   const ResolveOptions& options = {});

PlacementPlan partition(const Dag& dag, const PerfLUT& lut,
                        const Objective& obj,
                        const ResolveOptions& options = {});

enum class Policy : std::uint8_t {
  kAllLocal,
  kAllRemote,
  kWeightRemote,
  kResultRemote,
};

std::string_view to_string(Policy policy);
Policy parse_policy(std::string_view text);
constexpr Policy kAllPolicies[] = {Policy::kAllLocal, Policy::kAllRemote,
                                   Policy::kWeightRemote,
                                   Policy::kResultRemote};

// Host-only coarse placements; pins override.
PlacementPlan fixed_policy(const Dag& dag, Policy policy);

// Rows `kind,id,decision`: ops in topological order, then tensors by id.
std::string plan_to_csv(const PlacementPlan& plan, const Dag& dag);
PlacementPlan plan_from_csv(std::string_view text, const std::string& source);
PlacementPlan read_plan_file(const std::string& path);

}  // namespace cxlplan

#endif  // CXLPLAN_PARTITIONER_HPP_
