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

#include "cxlplan/partitioner.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <tuple>

#include "cxlplan/error.hpp"
#include "cxlplan/text_table.hpp"

namespace cxlplan {

void Objective::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "alpha must lie in [0, 1], got " + format_double(alpha));
  }
  if (!(latency_norm > 0.0) || !(bytes_norm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "objective norms must be positive");
  }
}

bool ConflictReport::contains(std::string_view tensor_id) const {
  return std::any_of(conflicts.begin(), conflicts.end(),
                     [&](const TensorConflict& c) {
                       return c.tensor_id == tensor_id;
                     });
}

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::kAllLocal: return "ALL_LOCAL";
    case Policy::kAllRemote: return "ALL_REMOTE";
    case Policy::kWeightRemote: return "WEIGHT_REMOTE";
    case Policy::kResultRemote: return "RESULT_REMOTE";
  }
  return "ALL_LOCAL";
}

Policy parse_policy(std::string_view text) {
  for (Policy p : kAllPolicies) {
    if (text == to_string(p)) return p;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown policy '" + std::string(text) +
                  "' (ALL_LOCAL, ALL_REMOTE, WEIGHT_REMOTE, RESULT_REMOTE)");
}

namespace {

enum class Axis : std::uint8_t { kWeights, kInputs, kOutputs };

Placement get_axis(const OpConfig& cfg, Axis axis) {
  switch (axis) {
    case Axis::kWeights: return cfg.weights;
    case Axis::kInputs: return cfg.inputs;
    case Axis::kOutputs: return cfg.outputs;
  }
  return cfg.inputs;
}

void set_axis(OpConfig& cfg, Axis axis, Placement p) {
  switch (axis) {
    case Axis::kWeights: cfg.weights = p; break;
    case Axis::kInputs: cfg.inputs = p; break;
    case Axis::kOutputs: cfg.outputs = p; break;
  }
}

struct Touch {
  std::size_t op;
  Axis axis;
};

// Every (op, axis) that reads or writes the tensor: producer first, then
// consumers in op order.
std::vector<Touch> touches(const Dag& dag, std::size_t t) {
  std::vector<Touch> out;
  if (auto p = dag.producer_of(t)) out.push_back({*p, Axis::kOutputs});
  const Axis consumer_axis = dag.tensor(t).kind == TensorKind::kWeight
                                 ? Axis::kWeights
                                 : Axis::kInputs;
  for (std::size_t c : dag.consumers_of(t)) out.push_back({c, consumer_axis});
  return out;
}

// Placement forced on an axis by its tensor set, if any.
std::optional<Placement> forced_axis(const Dag& dag,
                                     const std::vector<std::size_t>& tensors,
                                     Placement if_empty) {
  if (tensors.empty()) return if_empty;
  std::optional<Placement> pin = dag.tensor(tensors.front()).pinned;
  if (!pin) return std::nullopt;
  for (std::size_t t : tensors) {
    if (dag.tensor(t).pinned != pin) return std::nullopt;
  }
  return pin;
}

Placement majority(const Dag& dag, const std::vector<std::size_t>& tensors,
                   const PlacementPlan& plan, Placement if_empty) {
  if (tensors.empty()) return if_empty;
  Bytes local = 0;
  Bytes remote = 0;
  for (std::size_t t : tensors) {
    const auto& spec = dag.tensor(t);
    auto it = plan.placement.find(spec.id);
    if (it == plan.placement.end()) {
      throw Error(ErrorCode::kInvalidPlan,
                  "plan has no placement for tensor '" + spec.id + "'");
    }
    (it->second == Placement::kLocal ? local : remote) += spec.size_bytes;
  }
  return local > remote ? Placement::kLocal : Placement::kRemote;
}

int offload_score(const OpConfig& cfg) {
  return (cfg.compute == ComputeLoc::kDevice) +
         (cfg.weights == Placement::kRemote) +
         (cfg.inputs == Placement::kRemote) +
         (cfg.outputs == Placement::kRemote);
}

// True when `a` wins a cost tie against `b`.
bool prefer_on_tie(const OpConfig& a, const OpConfig& b) {
  return std::make_tuple(offload_score(a), a.index()) >
         std::make_tuple(offload_score(b), b.index());
}

// Dense, memoized cost evaluator shared by selection and resolution. Each
// (op, config) pair is priced once; probes() counts those evaluations.
class CostModel {
 public:
  CostModel(const Dag& dag, const PerfLUT& lut, const Objective& obj)
      : dag_(dag), table_(lut, dag), obj_(obj), memo_(dag.num_ops()) {
    obj_.validate();
  }

  double operator()(std::size_t op_idx, const OpConfig& cfg) {
    auto& slot = memo_[op_idx][canonicalize(cfg, dag_, op_idx).index()];
    if (!slot) {
      ++probes_;
      slot = obj_.alpha * table_(op_idx, cfg) / obj_.latency_norm +
             (1.0 - obj_.alpha) * attributed_host_bytes(dag_, op_idx, cfg) /
                 obj_.bytes_norm;
    }
    return *slot;
  }

  std::size_t probes() const { return probes_; }

 private:
  const Dag& dag_;
  LatencyTable table_;
  Objective obj_;
  std::vector<std::array<std::optional<double>, OpConfig::kCount>> memo_;
  std::size_t probes_ = 0;
};

std::vector<OpConfig> configs_by_index(const OpConfigMap& raw, const Dag& dag) {
  std::vector<OpConfig> out(dag.num_ops());
  for (std::size_t o = 0; o < dag.num_ops(); ++o) {
    auto it = raw.find(dag.op(o).id);
    if (it == raw.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "no configuration for op '" + dag.op(o).id + "'");
    }
    out[o] = it->second;
  }
  return out;
}

std::vector<Demand> demands_for(const Dag& dag, std::size_t t,
                                const std::vector<OpConfig>& cfgs) {
  std::vector<Demand> out;
  for (const Touch& touch : touches(dag, t)) {
    out.push_back({dag.op(touch.op).id, get_axis(cfgs[touch.op], touch.axis)});
  }
  if (auto pin = dag.tensor(t).pinned) out.push_back({"pin", *pin});
  return out;
}

bool disagree(const std::vector<Demand>& demands) {
  return std::any_of(demands.begin(), demands.end(), [&](const Demand& d) {
    return d.placement != demands.front().placement;
  });
}

}  // namespace

Bytes host_bytes(const PlacementPlan& plan, const Dag& dag) {
  Bytes total = 0;
  for (const auto& t : dag.tensors()) {
    auto it = plan.placement.find(t.id);
    if (it != plan.placement.end() && it->second == Placement::kLocal) {
      total += t.size_bytes;
    }
  }
  return total;
}

OpConfig effective_config(const PlacementPlan& plan, const Dag& dag,
                          std::size_t op_idx) {
  const std::string& id = dag.op(op_idx).id;
  auto it = plan.compute.find(id);
  if (it == plan.compute.end()) {
    throw Error(ErrorCode::kInvalidPlan,
                "plan has no compute decision for op '" + id + "'");
  }
  OpConfig cfg;
  cfg.compute = it->second;
  cfg.weights = majority(dag, dag.weights_of(op_idx), plan, Placement::kLocal);
  cfg.inputs = majority(dag, dag.inputs_of(op_idx), plan, Placement::kRemote);
  cfg.outputs = majority(dag, dag.outputs_of(op_idx), plan, Placement::kRemote);
  return cfg;
}

void validate_plan(const PlacementPlan& plan, const Dag& dag) {
  for (const auto& op : dag.ops()) {
    if (!plan.compute.count(op.id)) {
      throw Error(ErrorCode::kInvalidPlan,
                  "plan has no compute decision for op '" + op.id + "'");
    }
  }
  for (const auto& t : dag.tensors()) {
    auto it = plan.placement.find(t.id);
    if (it == plan.placement.end()) {
      throw Error(ErrorCode::kInvalidPlan,
                  "plan has no placement for tensor '" + t.id + "'");
    }
    if (t.pinned && it->second != *t.pinned) {
      throw Error(ErrorCode::kInvalidPlan,
                  "tensor '" + t.id + "' is pinned " +
                      std::string(to_string(*t.pinned)) + " but placed " +
                      std::string(to_string(it->second)));
    }
  }
  for (const auto& [id, loc] : plan.compute) {
    if (!dag.find_op(id)) {
      throw Error(ErrorCode::kInvalidPlan, "plan names unknown op '" + id + "'");
    }
  }
  for (const auto& [id, p] : plan.placement) {
    if (!dag.find_tensor(id)) {
      throw Error(ErrorCode::kInvalidPlan,
                  "plan names unknown tensor '" + id + "'");
    }
  }
}

Objective make_objective(double alpha, const Dag& dag, const PerfLUT& lut) {
  Objective obj;
  obj.alpha = alpha;
  if (!dag.empty()) {
    const LatencyTable table(lut, dag);
    const PlacementPlan local = fixed_policy(dag, Policy::kAllLocal);
    double latency = 0.0;
    for (std::size_t o : dag.topo()) {
      latency += table(o, effective_config(local, dag, o));
    }
    if (latency > 0.0) obj.latency_norm = latency;
  }
  const Bytes bytes = total_bytes(dag);
  if (bytes > 0) obj.bytes_norm = static_cast<double>(bytes);
  obj.validate();
  return obj;
}

double attributed_host_bytes(const Dag& dag, std::size_t op_idx,
                             const OpConfig& cfg) {
  double bytes = 0.0;
  if (cfg.weights == Placement::kLocal) {
    for (std::size_t w : dag.weights_of(op_idx)) {
      bytes += static_cast<double>(dag.tensor(w).size_bytes) /
               static_cast<double>(dag.consumers_of(w).size());
    }
  }
  if (cfg.outputs == Placement::kLocal) {
    bytes += static_cast<double>(dag.output_bytes(op_idx));
  }
  if (cfg.inputs == Placement::kLocal) {
    for (std::size_t t : dag.inputs_of(op_idx)) {
      if (dag.producer_of(t)) continue;
      bytes += static_cast<double>(dag.tensor(t).size_bytes) /
               static_cast<double>(dag.consumers_of(t).size());
    }
  }
  return bytes;
}

double op_cost(const OpNode& op, const OpConfig& cfg, const PerfLUT& lut,
               const Objective& obj, const Dag& dag) {
  obj.validate();
  const std::size_t idx = dag.op_index(op.id);
  const OpConfig key = canonicalize(cfg, dag, idx);
  const auto latency = lut.find(op.id, key);
  if (!latency) {
    throw Error(ErrorCode::kIncompleteLUT,
                "missing entry " + to_string(LutKey{op.id, key}));
  }
  return obj.alpha * *latency / obj.latency_norm +
         (1.0 - obj.alpha) * attributed_host_bytes(dag, idx, key) /
             obj.bytes_norm;
}

std::vector<OpConfig> feasible_configs(const Dag& dag, std::size_t op_idx) {
  const auto w = forced_axis(dag, dag.weights_of(op_idx), Placement::kLocal);
  const auto in = forced_axis(dag, dag.inputs_of(op_idx), Placement::kRemote);
  const auto out = forced_axis(dag, dag.outputs_of(op_idx), Placement::kRemote);
  std::vector<OpConfig> result;
  for (const OpConfig& cfg : valid_configs(dag, op_idx)) {
    if (w && cfg.weights != *w) continue;
    if (in && cfg.inputs != *in) continue;
    if (out && cfg.outputs != *out) continue;
    result.push_back(cfg);
  }
  return result;
}

namespace {

std::vector<OpConfig> select_dense(const Dag& dag, CostModel& cost) {
  std::vector<OpConfig> chosen(dag.num_ops());
  for (std::size_t o = 0; o < dag.num_ops(); ++o) {
    bool have = false;
    double best_cost = 0.0;
    for (const OpConfig& cfg : feasible_configs(dag, o)) {
      const double c = cost(o, cfg);
      if (!have || c < best_cost ||
          (c == best_cost && prefer_on_tie(cfg, chosen[o]))) {
        have = true;
        best_cost = c;
        chosen[o] = cfg;
      }
    }
  }
  return chosen;
}

OpConfigMap to_map(const Dag& dag, const std::vector<OpConfig>& cfgs) {
  OpConfigMap out;
  for (std::size_t o = 0; o < dag.num_ops(); ++o) out[dag.op(o).id] = cfgs[o];
  return out;
}

// Sort key for visiting tensors: topo rank of the producer, or of the first
// reader for producer-less tensors, then DAG order.
std::pair<std::size_t, std::size_t> visit_key(const Dag& dag, std::size_t t) {
  std::size_t rank = dag.num_ops();
  if (auto p = dag.producer_of(t)) {
    rank = dag.topo_rank(*p);
  } else {
    for (std::size_t c : dag.consumers_of(t)) {
      rank = std::min(rank, dag.topo_rank(c));
    }
  }
  return {rank, t};
}

// Per op and axis: true when every tensor on the axis is unpinned and used by
// this op alone, so the op may re-pick that axis without touching anyone
// else's view.
std::vector<std::array<bool, 3>> free_axes(const Dag& dag) {
  std::vector<std::array<bool, 3>> out(dag.num_ops());
  auto is_free = [&](const std::vector<std::size_t>& tensors) {
    if (tensors.empty()) return false;
    return std::all_of(tensors.begin(), tensors.end(), [&](std::size_t t) {
      return !dag.tensor(t).pinned && touches(dag, t).size() == 1;
    });
  };
  for (std::size_t o = 0; o < dag.num_ops(); ++o) {
    out[o] = {is_free(dag.weights_of(o)), is_free(dag.inputs_of(o)),
              is_free(dag.outputs_of(o))};
  }
  return out;
}

PlacementPlan resolve_dense(const std::vector<OpConfig>& raw,
                            const ConflictReport& report, const Dag& dag,
                            CostModel& cost, const ResolveOptions& options,
                            std::size_t& passes) {
  std::vector<OpConfig> cfgs = raw;
  std::vector<Placement> placed(dag.num_tensors(), Placement::kRemote);
  std::vector<bool> conflicted(dag.num_tensors(), false);
  for (const auto& c : report.conflicts) {
    conflicted[dag.tensor_index(c.tensor_id)] = true;
  }

  for (std::size_t t = 0; t < dag.num_tensors(); ++t) {
    if (conflicted[t]) continue;
    const auto demands = demands_for(dag, t, cfgs);
    if (!demands.empty()) placed[t] = demands.front().placement;
  }

  std::vector<std::vector<OpConfig>> feasible(dag.num_ops());
  for (std::size_t o = 0; o < dag.num_ops(); ++o) {
    feasible[o] = feasible_configs(dag, o);
  }
  const auto free = free_axes(dag);
  constexpr Axis kAxes[] = {Axis::kWeights, Axis::kInputs, Axis::kOutputs};

  // Cheapest config for a neighbor once the axis touching the tensor is set
  // to p. Compute and the op's private axes may change; axes shared with
  // other ops keep their current value.
  auto best_given = [&](const Touch& n, Placement p) {
    const OpConfig& current = cfgs[n.op];
    OpConfig best = current;
    set_axis(best, n.axis, p);
    double best_cost = cost(n.op, best);
    for (const OpConfig& cfg : feasible[n.op]) {
      if (get_axis(cfg, n.axis) != p) continue;
      bool held = true;
      for (Axis a : kAxes) {
        if (a != n.axis && !free[n.op][static_cast<int>(a)] &&
            get_axis(cfg, a) != get_axis(current, a)) {
          held = false;
        }
      }
      if (!held) continue;
      const double c = cost(n.op, cfg);
      if (c < best_cost || (c == best_cost && prefer_on_tie(cfg, best))) {
        best_cost = c;
        best = cfg;
      }
    }
    return std::make_pair(best, best_cost);
  };

  auto choose = [&](std::size_t t) {
    if (auto pin = dag.tensor(t).pinned) return *pin;
    double local_cost = 0.0;
    double remote_cost = 0.0;
    for (const Touch& n : touches(dag, t)) {
      local_cost += best_given(n, Placement::kLocal).second;
      remote_cost += best_given(n, Placement::kRemote).second;
    }
    return remote_cost <= local_cost ? Placement::kRemote : Placement::kLocal;
  };
  auto write_back = [&](std::size_t t, Placement p) {
    placed[t] = p;
    for (const Touch& n : touches(dag, t)) {
      if (dag.tensor(t).pinned) {
        set_axis(cfgs[n.op], n.axis, p);
      } else {
        cfgs[n.op] = best_given(n, p).first;
      }
    }
  };

  std::vector<std::size_t> order;
  for (std::size_t t = 0; t < dag.num_tensors(); ++t) {
    if (conflicted[t]) order.push_back(t);
  }
  auto by_key = [&](std::size_t a, std::size_t b) {
    return visit_key(dag, a) < visit_key(dag, b);
  };
  std::sort(order.begin(), order.end(), by_key);
  for (std::size_t t : order) write_back(t, choose(t));
  passes = 1;

  // Optional refinement: revisit every unpinned tensor touched by two or more
  // ops until a pass changes nothing.
  const std::size_t cap = std::max<std::size_t>(1, dag.num_tensors());
  const std::size_t max_passes = std::min(options.max_passes, cap);
  if (max_passes > 1) {
    std::vector<std::size_t> shared;
    for (std::size_t t = 0; t < dag.num_tensors(); ++t) {
      if (!dag.tensor(t).pinned && touches(dag, t).size() >= 2) {
        shared.push_back(t);
      }
    }
    std::sort(shared.begin(), shared.end(), by_key);
    while (passes < max_passes) {
      bool changed = false;
      for (std::size_t t : shared) {
        const Placement p = choose(t);
        if (p != placed[t]) changed = true;
        write_back(t, p);
      }
      ++passes;
      if (!changed) break;
    }
  }

  // Private tensors follow their only user's final view.
  for (std::size_t t = 0; t < dag.num_tensors(); ++t) {
    const auto near = touches(dag, t);
    if (!conflicted[t] && !dag.tensor(t).pinned && near.size() == 1) {
      placed[t] = get_axis(cfgs[near[0].op], near[0].axis);
    }
  }

  PlacementPlan plan;
  for (std::size_t o = 0; o < dag.num_ops(); ++o) {
    plan.compute[dag.op(o).id] = cfgs[o].compute;
  }
  for (std::size_t t = 0; t < dag.num_tensors(); ++t) {
    plan.placement[dag.tensor(t).id] = placed[t];
  }
  return plan;
}

}  // namespace

OpConfigMap per_op_select(const Dag& dag, const PerfLUT& lut,
                          const Objective& obj) {
  CostModel cost(dag, lut, obj);
  return to_map(dag, select_dense(dag, cost));
}

ConflictReport detect_conflicts(const OpConfigMap& raw, const Dag& dag) {
  const auto cfgs = configs_by_index(raw, dag);
  ConflictReport report;
  for (std::size_t t = 0; t < dag.num_tensors(); ++t) {
    auto demands = demands_for(dag, t, cfgs);
    if (disagree(demands)) {
      report.conflicts.push_back({dag.tensor(t).id, std::move(demands)});
    }
  }
  return report;
}

PlacementPlan resolve_conflicts(const OpConfigMap& raw,
                                const ConflictReport& report, const Dag& dag,
                                const PerfLUT& lut, const Objective& obj,
                                const ResolveOptions& options,
                                ResolveStats* stats) {
  CostModel cost(dag, lut, obj);
  std::size_t passes = 0;
  PlacementPlan plan = resolve_dense(configs_by_index(raw, dag), report, dag,
                                     cost, options, passes);
  if (stats) *stats = {cost.probes(), passes};
  return plan;
}

PartitionResult partition_detailed(const Dag& dag, const PerfLUT& lut,
                                   const Objective& obj,
                                   const ResolveOptions& options) {
  PartitionResult result;
  if (dag.empty()) {
    for (const auto& t : dag.tensors()) {
      result.plan.placement[t.id] = t.pinned.value_or(Placement::kRemote);
    }
    return result;
  }
  CostModel cost(dag, lut, obj);
  const auto raw = select_dense(dag, cost);
  result.raw = to_map(dag, raw);
  result.conflicts = detect_conflicts(result.raw, dag);
  result.plan = resolve_dense(raw, result.conflicts, dag, cost, options,
                              result.passes);
  result.lut_probes = cost.probes();
  return result;
}

PlacementPlan partition(const Dag& dag, const PerfLUT& lut,
                        const Objective& obj, const ResolveOptions& options) {
  return partition_detailed(dag, lut, obj, options).plan;
}

PlacementPlan fixed_policy(const Dag& dag, Policy policy) {
  PlacementPlan plan;
  for (const auto& op : dag.ops()) plan.compute[op.id] = ComputeLoc::kHost;
  for (const auto& t : dag.tensors()) {
    const bool weight = t.kind == TensorKind::kWeight;
    Placement p = Placement::kLocal;
    switch (policy) {
      case Policy::kAllLocal: p = Placement::kLocal; break;
      case Policy::kAllRemote: p = Placement::kRemote; break;
      case Policy::kWeightRemote:
        p = weight ? Placement::kRemote : Placement::kLocal;
        break;
      case Policy::kResultRemote:
        p = weight ? Placement::kLocal : Placement::kRemote;
        break;
    }
    plan.placement[t.id] = t.pinned.value_or(p);
  }
  return plan;
}

std::string plan_to_csv(const PlacementPlan& plan, const Dag& dag) {
  validate_plan(plan, dag);
  std::string out = "kind,id,decision\n";
  for (std::size_t o : dag.topo()) {
    const std::string& id = dag.op(o).id;
    out += "op," + id + "," + std::string(to_string(plan.compute.at(id))) +
           "\n";
  }
  for (const auto& [id, p] : plan.placement) {
    out += "tensor," + id + "," + std::string(to_string(p)) + "\n";
  }
  return out;
}

PlacementPlan plan_from_csv(std::string_view text, const std::string& source) {
  const auto rows = parse_delimited(text);
  if (rows.empty() || rows.front().fields !=
                          std::vector<std::string>{"kind", "id", "decision"}) {
    throw Error(ErrorCode::kParseError,
                source + ": row 1: expected header kind,id,decision");
  }
  PlacementPlan plan;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::kParseError,
                   source + ": row " + std::to_string(row.line) + ": " + why);
    };
    if (row.fields.size() != 3) throw fail("expected 3 fields");
    const auto& [kind, id, decision] =
        std::tie(row.fields[0], row.fields[1], row.fields[2]);
    try {
      if (kind == "op") {
        if (!plan.compute.emplace(id, parse_compute(decision)).second) {
          throw fail("duplicate op '" + id + "'");
        }
      } else if (kind == "tensor") {
        if (!plan.placement.emplace(id, parse_placement(decision)).second) {
          throw fail("duplicate tensor '" + id + "'");
        }
      } else {
        throw fail("kind must be op or tensor, got '" + kind + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParseError &&
          std::string_view(e.what()).starts_with(source)) {
        throw;
      }
      throw fail(e.what());
    }
  }
  return plan;
}

PlacementPlan read_plan_file(const std::string& path) {
  return plan_from_csv(read_text_file(path), path);
}

}  // namespace cxlplan
