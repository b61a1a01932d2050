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

#include "cxlplan/simulator.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>

#include "cxlplan/error.hpp"

namespace cxlplan {

SimReport simulate(const Dag& dag, const PlacementPlan& plan,
                   const PerfLUT& lut, const PlatformSpec& platform) {
  validate_plan(plan, dag);
  SimReport report;
  if (!dag.empty()) {
    const LatencyTable table(lut, dag);
    std::optional<ComputeLoc> previous;
    double sum = 0.0;
    for (std::size_t o : dag.topo()) {
      const OpConfig cfg = effective_config(plan, dag, o);
      const double t = table(o, cfg);
      report.per_op_latency.push_back({dag.op(o).id, t});
      sum += t;
      if (previous && *previous != cfg.compute) ++report.migrations;
      previous = cfg.compute;
    }
    report.migration_s =
        static_cast<double>(report.migrations) * platform.migration_overhead_s;
    report.latency_s = sum + report.migration_s;
  }
  report.host_bytes = host_bytes(plan, dag);
  const Bytes total = total_bytes(dag);
  report.remote_bytes = total - report.host_bytes;
  report.remote_fraction =
      total == 0 ? 0.0
                 : static_cast<double>(report.remote_bytes) /
                       static_cast<double>(total);
  return report;
}

double plan_objective(const SimReport& report, const Objective& obj) {
  return obj.alpha * report.latency_s / obj.latency_norm +
         (1.0 - obj.alpha) * static_cast<double>(report.host_bytes) /
             obj.bytes_norm;
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct Node {
  double cost = 0.0;
  std::size_t prev = kNone;
  ComputeLoc compute = ComputeLoc::kHost;
  std::uint64_t new_mask = 0;  // placements of this step's free new tensors
  std::uint64_t live_mask = 0;
};

Placement majority(const Dag& dag, const std::vector<std::size_t>& tensors,
                   const std::vector<Placement>& placed, Placement if_empty) {
  if (tensors.empty()) return if_empty;
  Bytes local = 0;
  Bytes remote = 0;
  for (std::size_t t : tensors) {
    (placed[t] == Placement::kLocal ? local : remote) +=
        dag.tensor(t).size_bytes;
  }
  return local > remote ? Placement::kLocal : Placement::kRemote;
}

Placement bit_placement(std::uint64_t mask, std::size_t bit) {
  return ((mask >> bit) & 1u) ? Placement::kRemote : Placement::kLocal;
}

}  // namespace

OracleResult oracle(const Dag& dag, const PerfLUT& lut, const Objective& obj,
                    const PlatformSpec& platform,
                    const OracleOptions& options) {
  obj.validate();
  if (dag.num_ops() > options.max_ops) {
    throw Error(ErrorCode::kTooLarge,
                "oracle: " + std::to_string(dag.num_ops()) +
                    " ops exceeds cap of " + std::to_string(options.max_ops));
  }
  const std::size_t frontier_cap = std::min<std::size_t>(options.max_frontier, 62);
  const std::size_t n = dag.num_ops();
  const std::size_t n_tensors = dag.num_tensors();

  // Step range [first, last] over which each tensor is in use.
  std::vector<std::size_t> first(n_tensors, kNone);
  std::vector<std::size_t> last(n_tensors, 0);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t o = dag.topo()[step];
    auto touch = [&](std::size_t t) {
      first[t] = std::min(first[t], step);
      last[t] = std::max(last[t], step);
    };
    for (std::size_t t : dag.weights_of(o)) touch(t);
    for (std::size_t t : dag.inputs_of(o)) touch(t);
    for (std::size_t t : dag.outputs_of(o)) touch(t);
  }

  std::vector<std::vector<std::size_t>> fresh(n);  // unpinned, first use here
  std::vector<std::vector<std::size_t>> live(n);   // still needed after step
  std::vector<Placement> placed(n_tensors, Placement::kRemote);
  for (std::size_t t = 0; t < n_tensors; ++t) {
    if (auto pin = dag.tensor(t).pinned) placed[t] = *pin;
    if (first[t] == kNone) continue;
    if (!dag.tensor(t).pinned) fresh[first[t]].push_back(t);
    for (std::size_t s = first[t]; s < last[t]; ++s) live[s].push_back(t);
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (live[s].size() > frontier_cap || fresh[s].size() > frontier_cap) {
      throw Error(ErrorCode::kTooLarge,
                  "oracle: more than " + std::to_string(frontier_cap) +
                      " tensors in flight at step " + std::to_string(s));
    }
  }

  const LatencyTable table(lut, dag);
  const double lat_weight = obj.alpha / obj.latency_norm;
  const double byte_weight = (1.0 - obj.alpha) / obj.bytes_norm;

  std::vector<std::vector<Node>> layers(n);
  OracleResult result;
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t o = dag.topo()[step];
    const auto& prev_live = step == 0 ? std::vector<std::size_t>{} : live[step - 1];
    const std::size_t prev_count = step == 0 ? 1 : layers[step - 1].size();
    const std::size_t k = fresh[step].size();
    const std::uint64_t combos = std::uint64_t{1} << k;
    std::unordered_map<std::uint64_t, std::size_t> index;
    auto& layer = layers[step];

    for (std::size_t pi = 0; pi < prev_count; ++pi) {
      const Node* prev = step == 0 ? nullptr : &layers[step - 1][pi];
      if (prev) {
        for (std::size_t j = 0; j < prev_live.size(); ++j) {
          placed[prev_live[j]] = bit_placement(prev->live_mask, j);
        }
      }
      for (ComputeLoc c : {ComputeLoc::kDevice, ComputeLoc::kHost}) {
        const bool migrates = prev && prev->compute != c;
        // All-Remote first so exact ties keep the offload-heavier choice.
        for (std::uint64_t m = combos; m-- > 0;) {
          double local_new = 0.0;
          for (std::size_t j = 0; j < k; ++j) {
            const std::size_t t = fresh[step][j];
            placed[t] = bit_placement(m, j);
            if (placed[t] == Placement::kLocal) {
              local_new += static_cast<double>(dag.tensor(t).size_bytes);
            }
          }
          OpConfig cfg;
          cfg.compute = c;
          cfg.weights = majority(dag, dag.weights_of(o), placed, Placement::kLocal);
          cfg.inputs = majority(dag, dag.inputs_of(o), placed, Placement::kRemote);
          cfg.outputs = majority(dag, dag.outputs_of(o), placed, Placement::kRemote);
          const double latency =
              table(o, cfg) + (migrates ? platform.migration_overhead_s : 0.0);
          const double cost = (prev ? prev->cost : 0.0) +
                              lat_weight * latency + byte_weight * local_new;

          std::uint64_t live_mask = 0;
          for (std::size_t j = 0; j < live[step].size(); ++j) {
            if (placed[live[step][j]] == Placement::kRemote) {
              live_mask |= std::uint64_t{1} << j;
            }
          }
          const std::uint64_t key = (live_mask << 1) | static_cast<std::uint64_t>(c);
          auto [it, inserted] = index.emplace(key, layer.size());
          if (inserted) {
            layer.push_back({cost, prev ? pi : kNone, c, m, live_mask});
          } else if (cost < layer[it->second].cost) {
            layer[it->second] = {cost, prev ? pi : kNone, c, m, live_mask};
          }
        }
      }
    }
    result.states += layer.size();
  }

  // Untouched tensors only cost host bytes, so they go Remote unless pinned.
  for (std::size_t t = 0; t < n_tensors; ++t) {
    if (auto pin = dag.tensor(t).pinned) {
      placed[t] = *pin;
    } else {
      placed[t] = Placement::kRemote;
    }
  }
  if (n > 0) {
    const auto& final_layer = layers[n - 1];
    std::size_t best = 0;
    for (std::size_t i = 1; i < final_layer.size(); ++i) {
      if (final_layer[i].cost < final_layer[best].cost) best = i;
    }
    std::size_t cursor = best;
    for (std::size_t step = n; step-- > 0;) {
      const Node& node = layers[step][cursor];
      result.plan.compute[dag.op(dag.topo()[step]).id] = node.compute;
      for (std::size_t j = 0; j < fresh[step].size(); ++j) {
        placed[fresh[step][j]] = bit_placement(node.new_mask, j);
      }
      cursor = node.prev;
    }
  }
  for (std::size_t t = 0; t < n_tensors; ++t) {
    result.plan.placement[dag.tensor(t).id] = placed[t];
  }
  result.report = simulate(dag, result.plan, lut, platform);
  result.cost = plan_objective(result.report, obj);
  return result;
}

std::string report_to_text(const SimReport& report) {
  std::string out;
  out += "latency_s=" + format_double(report.latency_s) + "\n";
  out += "host_bytes=" + std::to_string(report.host_bytes) + "\n";
  out += "remote_bytes=" + std::to_string(report.remote_bytes) + "\n";
  out += "remote_fraction=" + format_double(report.remote_fraction) + "\n";
  out += "migrations=" + std::to_string(report.migrations) + "\n";
  out += "migration_s=" + format_double(report.migration_s) + "\n";
  return out;
}

std::string per_op_to_csv(const SimReport& report) {
  std::string out = "op_id,latency_s\n";
  for (const auto& row : report.per_op_latency) {
    out += row.op_id + "," + format_double(row.seconds) + "\n";
  }
  return out;
}

}  // namespace cxlplan
