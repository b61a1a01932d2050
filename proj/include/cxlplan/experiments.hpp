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

#ifndef CXLPLAN_EXPERIMENTS_HPP_
#define CXLPLAN_EXPERIMENTS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cxlplan/graph.hpp"
#include "cxlplan/partitioner.hpp"
#include "cxlplan/platform.hpp"
#include "cxlplan/simulator.hpp"

namespace cxlplan {

// 1.0, 0.9, ..., 0.0
std::vector<double> default_alpha_grid();
// Comma-separated values in [0, 1]; throws InvalidArgument.
std::vector<double> parse_alpha_grid(std::string_view text);

struct ParetoPoint {
  // Alpha value for partitioner rows, policy name for the fixed-policy rows.
  std::string label;
  std::optional<double> alpha;
  double latency_s = 0.0;
  double latency_rel = 0.0;  // vs ALL_LOCAL on the same (dag, lut)
  double remote_fraction = 0.0;
  Bytes host_bytes = 0;
  std::size_t migrations = 0;
};

// One partitioner row per alpha (descending), then the four fixed policies.
std::vector<ParetoPoint> pareto_sweep(const Dag& dag, const PerfLUT& lut,
                                      const PlatformSpec& platform,
                                      const std::vector<double>& alphas,
                                      const ResolveOptions& options = {});

// Header `alpha,latency_s,latency_rel,remote_fraction,host_bytes,migrations`.
std::string pareto_to_csv(const std::vector<ParetoPoint>& points);

// (partition - oracle) / oracle; 0 when both are 0.
double relative_gap(double partition_cost, double oracle_cost);

struct GapRow {
  double alpha = 0.0;
  double partition_cost = 0.0;
  double oracle_cost = 0.0;
  double gap = 0.0;
};

// Relative slack allowed when asserting partition >= oracle, to absorb
// summation-order rounding between the two cost paths.
constexpr double kCostTolerance = 1e-9;

std::vector<GapRow> oracle_check(const Dag& dag, const PerfLUT& lut,
                                 const PlatformSpec& platform,
                                 const std::vector<double>& alphas,
                                 const OracleOptions& options = {});

std::string gap_rows_to_csv(const std::vector<GapRow>& rows);

// Seeded random planning instance: shape, op count (1..max_ops) and size
// profile are all drawn from `seed`.
Dag random_instance(std::uint64_t seed, std::size_t max_ops = 10);

struct GapStudy {
  std::size_t cases = 0;
  std::size_t dominance_violations = 0;
  double median_gap = 0.0;
  double max_gap = 0.0;
  std::vector<double> gaps;
};

GapStudy random_gap_study(std::size_t instances, std::uint64_t seed,
                          const std::vector<double>& alphas,
                          const PlatformSpec& platform);

std::string gap_study_summary(const GapStudy& study);

}  // namespace cxlplan

#endif  // CXLPLAN_EXPERIMENTS_HPP_
