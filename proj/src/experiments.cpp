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

#include "cxlplan/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "cxlplan/error.hpp"
#include "cxlplan/random.hpp"
#include "cxlplan/text_table.hpp"

namespace cxlplan {

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int k = 10; k >= 0; --k) grid.push_back(k / 10.0);
  return grid;
}

std::vector<double> parse_alpha_grid(std::string_view text) {
  const auto rows = parse_delimited(text);
  std::vector<double> grid;
  for (const auto& row : rows) {
    for (const auto& field : row.fields) {
      double a = 0.0;
      try {
        a = parse_double(field);
      } catch (const Error&) {
        throw Error(ErrorCode::kInvalidArgument,
                    "alpha grid: not a number '" + field + "'");
      }
      if (a < 0.0 || a > 1.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "alpha grid: " + field + " is outside [0, 1]");
      }
      grid.push_back(a);
    }
  }
  if (grid.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "alpha grid is empty");
  }
  return grid;
}

namespace {

ParetoPoint make_point(std::string label, std::optional<double> alpha,
                       const SimReport& report, double local_latency) {
  ParetoPoint p;
  p.label = std::move(label);
  p.alpha = alpha;
  p.latency_s = report.latency_s;
  p.latency_rel = local_latency > 0.0 ? report.latency_s / local_latency : 1.0;
  p.remote_fraction = report.remote_fraction;
  p.host_bytes = report.host_bytes;
  p.migrations = report.migrations;
  return p;
}

}  // namespace

std::vector<ParetoPoint> pareto_sweep(const Dag& dag, const PerfLUT& lut,
                                      const PlatformSpec& platform,
                                      const std::vector<double>& alphas,
                                      const ResolveOptions& options) {
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "alpha " + format_double(a) + " is outside [0, 1]");
    }
  }
  const double local_latency =
      simulate(dag, fixed_policy(dag, Policy::kAllLocal), lut, platform)
          .latency_s;
  std::vector<double> sorted = alphas;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  std::vector<ParetoPoint> points;
  for (double a : sorted) {
    const Objective obj = make_objective(a, dag, lut);
    const PlacementPlan plan = partition(dag, lut, obj, options);
    points.push_back(make_point(format_double(a), a,
                                simulate(dag, plan, lut, platform),
                                local_latency));
  }
  for (Policy policy : kAllPolicies) {
    points.push_back(make_point(
        std::string(to_string(policy)), std::nullopt,
        simulate(dag, fixed_policy(dag, policy), lut, platform),
        local_latency));
  }
  return points;
}

std::string pareto_to_csv(const std::vector<ParetoPoint>& points) {
  std::string out =
      "alpha,latency_s,latency_rel,remote_fraction,host_bytes,migrations\n";
  for (const auto& p : points) {
    out += p.label + "," + format_double(p.latency_s) + "," +
           format_double(p.latency_rel) + "," +
           format_double(p.remote_fraction) + "," +
           std::to_string(p.host_bytes) + "," + std::to_string(p.migrations) +
           "\n";
  }
  return out;
}

double relative_gap(double partition_cost, double oracle_cost) {
  if (oracle_cost > 0.0) return (partition_cost - oracle_cost) / oracle_cost;
  return partition_cost - oracle_cost;
}

std::vector<GapRow> oracle_check(const Dag& dag, const PerfLUT& lut,
                                 const PlatformSpec& platform,
                                 const std::vector<double>& alphas,
                                 const OracleOptions& options) {
  std::vector<GapRow> rows;
  for (double a : alphas) {
    const Objective obj = make_objective(a, dag, lut);
    const PlacementPlan plan = partition(dag, lut, obj);
    GapRow row;
    row.alpha = a;
    row.partition_cost =
        plan_objective(simulate(dag, plan, lut, platform), obj);
    row.oracle_cost = oracle(dag, lut, obj, platform, options).cost;
    row.gap = relative_gap(row.partition_cost, row.oracle_cost);
    rows.push_back(row);
  }
  return rows;
}

std::string gap_rows_to_csv(const std::vector<GapRow>& rows) {
  std::string out = "alpha,partition_cost,oracle_cost,gap\n";
  for (const auto& r : rows) {
    out += format_double(r.alpha) + "," + format_double(r.partition_cost) +
           "," + format_double(r.oracle_cost) + "," + format_double(r.gap) +
           "\n";
  }
  return out;
}

Dag random_instance(std::uint64_t seed, std::size_t max_ops) {
  SeededDraws draw(seed);
  const Shape shape = static_cast<Shape>(draw.uniform_int(0, 2));
  std::size_t n = draw.uniform_int(1, std::max<std::size_t>(1, max_ops));
  const SizeProfile profile = draw.uniform_int(0, 1) == 0
                                  ? SizeProfile{}
                                  : SizeProfile::memory_bound();
  const std::uint64_t gen_seed = draw.next();
  if (shape == Shape::kFanout && n < 3) {
    if (max_ops < 3) return gen_synthetic(Shape::kChain, n, gen_seed, profile);
    n = 3;
  }
  return gen_synthetic(shape, n, gen_seed, profile);
}

GapStudy random_gap_study(std::size_t instances, std::uint64_t seed,
                          const std::vector<double>& alphas,
                          const PlatformSpec& platform) {
  GapStudy study;
  SeededDraws master(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    const Dag dag = random_instance(master.next());
    const PerfLUT lut = build_lut_synthetic(dag, platform);
    for (const GapRow& row : oracle_check(dag, lut, platform, alphas)) {
      ++study.cases;
      if (row.partition_cost <
          row.oracle_cost - kCostTolerance * std::max(1.0, row.oracle_cost)) {
        ++study.dominance_violations;
      }
      study.gaps.push_back(row.gap);
    }
  }
  if (!study.gaps.empty()) {
    std::vector<double> sorted = study.gaps;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    study.median_gap = m % 2 == 1 ? sorted[m / 2]
                                  : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    study.max_gap = sorted.back();
  }
  return study;
}

std::string gap_study_summary(const GapStudy& study) {
  return "cases=" + std::to_string(study.cases) +
         " dominance_violations=" + std::to_string(study.dominance_violations) +
         " median_gap=" + format_double(study.median_gap) +
         " max_gap=" + format_double(study.max_gap) + "\n";
}

}  // namespace cxlplan
