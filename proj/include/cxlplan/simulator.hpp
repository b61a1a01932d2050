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

#ifndef CXLPLAN_SIMULATOR_HPP_
#define CXLPLAN_SIMULATOR_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "cxlplan/graph.hpp"
#include "cxlplan/partitioner.hpp"
#include "cxlplan/platform.hpp"

namespace cxlplan {

struct OpLatency {
  std::string op_id;
  double seconds = 0.0;

  bool operator==(const OpLatency&) const = default;
};

struct SimReport {
  double latency_s = 0.0;
  Bytes host_bytes = 0;
  Bytes remote_bytes = 0;
  double remote_fraction = 0.0;
  std::size_t migrations = 0;
  // migrations x platform.migration_overhead_s, already inside latency_s.
  double migration_s = 0.0;
  std::vector<OpLatency> per_op_latency;  // topological order

  bool operator==(const SimReport&) const = default;
};

// Sequential execution in topological order. Each op is charged the LUT
// entry of its effective_config(); every host<->device switch between
// consecutive ops adds platform.migration_overhead_s.
//
// Errors: InvalidPlan, IncompleteLUT.
SimReport simulate(const Dag& dag, const PlacementPlan& plan,
                   const PerfLUT& lut, const PlatformSpec& platform);

// Global counterpart of op_cost.
double plan_objective(const SimReport& report, const Objective& obj);

struct OracleOptions {
  std::size_t max_ops = 12;
  // Largest number of tensors whose placement the search carries between
  // consecutive ops.
  std::size_t max_frontier = 20;
};

struct OracleResult {
  PlacementPlan plan;
  double cost = 0.0;  // plan_objective(simulate(plan))
  SimReport report;
  std::size_t states = 0;
};

/// Globally optimal plan over every per-tensor placement and per-op compute
/// choice consistent with pins.
///
/// The search walks ops in topological order and keeps, per step, the best
/// partial cost for each assignment of the tensors still in use plus the
/// previous op's compute location. That is exact because an op's charge
/// depends only on its own tensors and the compute side of its predecessor in
/// execution order. Throws TooLarge past the caps.
OracleResult oracle(const Dag& dag, const PerfLUT& lut, const Objective& obj,
                    const PlatformSpec& platform,
                    const OracleOptions& options = {});

// Flat `key=value` lines.
std::string report_to_text(const SimReport& report);
// Rows `op_id,latency_s`.
std::string per_op_to_csv(const SimReport& report);

}  // namespace cxlplan

#endif  // CXLPLAN_SIMULATOR_HPP_
