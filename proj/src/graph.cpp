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

#include "cxlplan/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <type_traits>

#include "cxlplan/error.hpp"
#include "cxlplan/random.hpp"
#include "json.hpp"

namespace cxlplan {

std::string_view to_string(TensorKind kind) {
  switch (kind) {
    case TensorKind::kWeight: return "Weight";
    case TensorKind::kIntermediate: return "Intermediate";
    case TensorKind::kExternalInput: return "ExternalInput";
    case TensorKind::kExternalOutput: return "ExternalOutput";
  }
  return "Intermediate";
}

TensorKind parse_tensor_kind(std::string_view text) {
  if (text == "Weight") return TensorKind::kWeight;
  if (text == "Intermediate") return TensorKind::kIntermediate;
  if (text == "ExternalInput") return TensorKind::kExternalInput;
  if (text == "ExternalOutput") return TensorKind::kExternalOutput;
  throw Error(ErrorCode::kParseError,
              "unknown tensor kind '" + std::string(text) + "'");
}

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::kChain: return "chain";
    case Shape::kFanout: return "fanout";
    case Shape::kResidual: return "residual";
  }
  return "chain";
}

Shape parse_shape(std::string_view text) {
  if (text == "chain") return Shape::kChain;
  if (text == "fanout") return Shape::kFanout;
  if (text == "residual") return Shape::kResidual;
  throw Error(ErrorCode::kInvalidShapeParams,
              "unknown shape '" + std::string(text) + "'");
}

std::vector<std::string> Dag::topo_ids() const {
  std::vector<std::string> ids;
  ids.reserve(topo_.size());
  for (std::size_t idx : topo_) ids.push_back(ops_[idx].id);
  return ids;
}

std::optional<std::size_t> Dag::find_op(std::string_view id) const {
  auto it = op_lookup_.find(std::string(id));
  if (it == op_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Dag::find_tensor(std::string_view id) const {
  auto it = tensor_lookup_.find(std::string(id));
  if (it == tensor_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dag::op_index(std::string_view id) const {
  if (auto idx = find_op(id)) return *idx;
  throw Error(ErrorCode::kUnknownOp, "unknown op '" + std::string(id) + "'");
}

std::size_t Dag::tensor_index(std::string_view id) const {
  if (auto idx = find_tensor(id)) return *idx;
  throw Error(ErrorCode::kDanglingReference,
              "unknown tensor '" + std::string(id) + "'");
}

namespace {

Bytes sum_sizes(const std::vector<TensorSpec>& tensors,
                const std::vector<std::size_t>& indices) {
  Bytes total = 0;
  for (std::size_t idx : indices) total += tensors[idx].size_bytes;
  return total;
}

}  // namespace

Bytes Dag::weight_bytes(std::size_t op_idx) const {
  return sum_sizes(tensors_, op_weights_[op_idx]);
}
Bytes Dag::input_bytes(std::size_t op_idx) const {
  return sum_sizes(tensors_, op_inputs_[op_idx]);
}
Bytes Dag::output_bytes(std::size_t op_idx) const {
  return sum_sizes(tensors_, op_outputs_[op_idx]);
}

Dag build_dag(std::vector<OpNode> ops, std::vector<TensorSpec> tensors,
              std::uint64_t seed) {
  Dag dag;
  dag.seed_ = seed;

  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (!dag.tensor_lookup_.emplace(tensors[i].id, i).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate tensor id '" + tensors[i].id + "'");
    }
  }
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (!dag.op_lookup_.emplace(ops[i].id, i).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate op id '" + ops[i].id + "'");
    }
  }

  const std::size_t n_ops = ops.size();
  const std::size_t n_tensors = tensors.size();
  dag.op_weights_.resize(n_ops);
  dag.op_inputs_.resize(n_ops);
  dag.op_outputs_.resize(n_ops);
  dag.tensor_producer_.assign(n_tensors, std::nullopt);
  dag.tensor_consumers_.assign(n_tensors, {});

  auto resolve = [&](const OpNode& op, const std::string& tid,
                     std::initializer_list<TensorKind> allowed,
                     const char* role) {
    auto it = dag.tensor_lookup_.find(tid);
    if (it == dag.tensor_lookup_.end()) {
      throw Error(ErrorCode::kDanglingReference,
                  "op '" + op.id + "' references missing tensor '" + tid + "'");
    }
    const TensorKind kind = tensors[it->second].kind;
    if (std::find(allowed.begin(), allowed.end(), kind) == allowed.end()) {
      throw Error(ErrorCode::kKindMismatch,
                  "op '" + op.id + "' lists " + std::string(to_string(kind)) +
                      " tensor '" + tid + "' among its " + role);
    }
    return it->second;
  };

  for (std::size_t o = 0; o < n_ops; ++o) {
    const OpNode& op = ops[o];
    std::set<std::size_t> seen;
    auto add_unique = [&](std::size_t t) {
      if (!seen.insert(t).second) {
        throw Error(ErrorCode::kDuplicateId,
                    "op '" + op.id + "' lists tensor '" + tensors[t].id +
                        "' more than once");
      }
    };
    for (const auto& tid : op.weight_ids) {
      std::size_t t = resolve(op, tid, {TensorKind::kWeight}, "weights");
      add_unique(t);
      dag.op_weights_[o].push_back(t);
      dag.tensor_consumers_[t].push_back(o);
    }
    for (const auto& tid : op.input_ids) {
      std::size_t t = resolve(
          op, tid, {TensorKind::kIntermediate, TensorKind::kExternalInput},
          "inputs");
      add_unique(t);
      dag.op_inputs_[o].push_back(t);
      dag.tensor_consumers_[t].push_back(o);
    }
    for (const auto& tid : op.output_ids) {
      std::size_t t = resolve(
          op, tid, {TensorKind::kIntermediate, TensorKind::kExternalOutput},
          "outputs");
      if (seen.count(t) != 0) {
        throw Error(ErrorCode::kCycleDetected,
                    "op '" + op.id + "' consumes its own output '" + tid + "'");
      }
      add_unique(t);
      if (dag.tensor_producer_[t]) {
        throw Error(ErrorCode::kDuplicateProducer,
                    "tensor '" + tid + "' produced by both '" +
                        ops[*dag.tensor_producer_[t]].id + "' and '" + op.id +
                        "'");
      }
      dag.tensor_producer_[t] = o;
      dag.op_outputs_[o].push_back(t);
    }
  }

  for (std::size_t t = 0; t < n_tensors; ++t) {
    TensorSpec& spec = tensors[t];
    const bool needs_producer = spec.kind == TensorKind::kIntermediate ||
                                spec.kind == TensorKind::kExternalOutput;
    if (needs_producer && !dag.tensor_producer_[t]) {
      throw Error(ErrorCode::kMissingProducer,
                  "tensor '" + spec.id + "' has no producing op");
    }
    std::optional<std::string> producer;
    if (auto p = dag.tensor_producer_[t]) producer = ops[*p].id;
    std::set<std::string> consumers;
    for (std::size_t c : dag.tensor_consumers_[t]) consumers.insert(ops[c].id);

    if (spec.producer && spec.producer != producer) {
      if (!dag.op_lookup_.count(*spec.producer)) {
        throw Error(ErrorCode::kDanglingReference,
                    "tensor '" + spec.id + "' names missing producer '" +
                        *spec.producer + "'");
      }
      throw Error(ErrorCode::kInvalidArgument,
                  "tensor '" + spec.id + "' names producer '" +
                      *spec.producer + "' but no such op writes it");
    }
    if (!spec.consumers.empty() && spec.consumers != consumers) {
      for (const auto& c : spec.consumers) {
        if (!dag.op_lookup_.count(c)) {
          throw Error(ErrorCode::kDanglingReference,
                      "tensor '" + spec.id + "' names missing consumer '" + c +
                          "'");
        }
      }
      throw Error(ErrorCode::kInvalidArgument,
                  "tensor '" + spec.id +
                      "' consumer list disagrees with op inputs");
    }
    spec.producer = std::move(producer);
    spec.consumers = std::move(consumers);
  }

  // Kahn's algorithm, lowest op index first among ready ops.
  std::vector<std::vector<std::size_t>> succ(n_ops);
  std::vector<std::size_t> indegree(n_ops, 0);
  for (std::size_t o = 0; o < n_ops; ++o) {
    std::set<std::size_t> preds;
    for (std::size_t t : dag.op_inputs_[o]) {
      if (auto p = dag.tensor_producer_[t]) preds.insert(*p);
    }
    indegree[o] = preds.size();
    for (std::size_t p : preds) succ[p].push_back(o);
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>,
                      std::greater<std::size_t>>
      ready;
  for (std::size_t o = 0; o < n_ops; ++o) {
    if (indegree[o] == 0) ready.push(o);
  }
  while (!ready.empty()) {
    std::size_t o = ready.top();
    ready.pop();
    dag.topo_.push_back(o);
    for (std::size_t s : succ[o]) {
      if (--indegree[s] == 0) ready.push(s);
    }
  }
  if (dag.topo_.size() != n_ops) {
    for (std::size_t o = 0; o < n_ops; ++o) {
      if (indegree[o] != 0) {
        throw Error(ErrorCode::kCycleDetected,
                    "dependency cycle through op '" + ops[o].id + "'");
      }
    }
  }
  dag.topo_rank_.assign(n_ops, 0);
  for (std::size_t r = 0; r < n_ops; ++r) dag.topo_rank_[dag.topo_[r]] = r;

  dag.ops_ = std::move(ops);
  dag.tensors_ = std::move(tensors);
  return dag;
}

Bytes total_bytes(const Dag& dag) {
  Bytes total = 0;
  for (const auto& t : dag.tensors()) total += t.size_bytes;
  return total;
}

namespace {

void check_profile(const SizeProfile& p) {
  auto bad = [](auto r) { return r.hi < r.lo; };
  if (bad(p.weight_bytes) || bad(p.activation_bytes) || bad(p.io_bytes) ||
      bad(p.flops_per_byte) || bad(p.random_accesses) ||
      p.flops_per_byte.lo < 0.0) {
    throw Error(ErrorCode::kInvalidShapeParams, "malformed size profile");
  }
}

}  // namespace

SizeProfile SizeProfile::memory_bound() {
  SizeProfile p;
  p.weight_bytes = {16ull << 20, 128ull << 20};
  p.activation_bytes = {64ull << 20, 256ull << 20};
  p.io_bytes = {1ull << 20, 4ull << 20};
  p.flops_per_byte = {0.005, 0.05};
  return p;
}

Dag gen_synthetic(Shape shape, std::size_t n_ops, std::uint64_t seed,
                  const SizeProfile& profile) {
  if (n_ops < 1) {
    throw Error(ErrorCode::kInvalidShapeParams, "n_ops must be at least 1");
  }
  if (shape == Shape::kFanout && n_ops < 3) {
    throw Error(ErrorCode::kInvalidShapeParams,
                "fanout needs at least 3 ops (source, branch, join)");
  }
  check_profile(profile);
  SeededDraws draw(seed);

  std::vector<TensorSpec> tensors;
  std::vector<OpNode> ops(n_ops);

  auto add_tensor = [&](std::string id, TensorKind kind, Range<Bytes> sizes) {
    TensorSpec t;
    t.id = std::move(id);
    t.kind = kind;
    t.size_bytes = draw.uniform_int(sizes.lo, sizes.hi);
    if (kind == TensorKind::kExternalInput ||
        kind == TensorKind::kExternalOutput) {
      t.pinned = profile.io_pin;
    }
    tensors.push_back(std::move(t));
    return tensors.back().id;
  };

  const std::string input = add_tensor("x", TensorKind::kExternalInput,
                                       profile.io_bytes);
  for (std::size_t i = 0; i < n_ops; ++i) {
    ops[i].id = "op" + std::to_string(i);
  }

  // Output id of op i; the last op writes the external output.
  auto out_name = [&](std::size_t i) {
    return i + 1 == n_ops ? std::string("y") : "t" + std::to_string(i);
  };

  for (std::size_t i = 0; i < n_ops; ++i) {
    OpNode& op = ops[i];
    const bool is_join = shape == Shape::kFanout && i + 1 == n_ops;
    if (!is_join) {
      op.weight_ids.push_back(add_tensor("w" + std::to_string(i),
                                         TensorKind::kWeight,
                                         profile.weight_bytes));
    }
    const bool last = i + 1 == n_ops;
    op.output_ids.push_back(add_tensor(
        out_name(i),
        last ? TensorKind::kExternalOutput : TensorKind::kIntermediate,
        last ? profile.io_bytes : profile.activation_bytes));

    switch (shape) {
      case Shape::kChain:
        op.label = "layer";
        op.input_ids.push_back(i == 0 ? input : out_name(i - 1));
        break;
      case Shape::kResidual:
        op.label = (i >= 2 && i % 2 == 0) ? "residual_add" : "layer";
        op.input_ids.push_back(i == 0 ? input : out_name(i - 1));
        if (i >= 2 && i % 2 == 0) op.input_ids.push_back(out_name(i - 2));
        break;
      case Shape::kFanout:
        if (i == 0) {
          op.label = "source";
          op.input_ids.push_back(input);
        } else if (!is_join) {
          op.label = "branch";
          op.input_ids.push_back(out_name(0));
        } else {
          op.label = "join";
          for (std::size_t b = 1; b + 1 < n_ops; ++b) {
            op.input_ids.push_back(out_name(b));
          }
        }
        break;
    }
  }

  Dag staged = build_dag(ops, tensors, seed);
  for (std::size_t i = 0; i < n_ops; ++i) {
    const double touched = static_cast<double>(
        staged.weight_bytes(i) + staged.input_bytes(i) + staged.output_bytes(i));
    const double intensity = draw.uniform_real(profile.flops_per_byte.lo,
                                               profile.flops_per_byte.hi);
    ops[i].flops = static_cast<std::uint64_t>(std::llround(intensity * touched));
    ops[i].random_accesses =
        draw.uniform_int(profile.random_accesses.lo, profile.random_accesses.hi);
  }
  return build_dag(std::move(ops), std::move(tensors), seed);
}

std::vector<Dag> memory_bound_suite() {
  const SizeProfile profile = SizeProfile::memory_bound();
  return {
      gen_synthetic(Shape::kChain, 8, 101, profile),
      gen_synthetic(Shape::kChain, 16, 102, profile),
      gen_synthetic(Shape::kFanout, 6, 103, profile),
      gen_synthetic(Shape::kFanout, 10, 104, profile),
      gen_synthetic(Shape::kResidual, 9, 105, profile),
      gen_synthetic(Shape::kResidual, 20, 106, profile),
  };
}

using ojson = nlohmann::ordered_json;

std::string dag_to_json(const Dag& dag) {
  ojson doc;
  doc["ops"] = ojson::array();
  for (const auto& op : dag.ops()) {
    ojson o;
    o["id"] = op.id;
    o["label"] = op.label;
    o["flops"] = op.flops;
    o["random_accesses"] = op.random_accesses;
    o["weight_ids"] = op.weight_ids;
    o["input_ids"] = op.input_ids;
    o["output_ids"] = op.output_ids;
    doc["ops"].push_back(std::move(o));
  }
  doc["tensors"] = ojson::array();
  for (const auto& t : dag.tensors()) {
    ojson o;
    o["id"] = t.id;
    o["kind"] = std::string(to_string(t.kind));
    o["size_bytes"] = t.size_bytes;
    o["producer"] = t.producer ? ojson(*t.producer) : ojson(nullptr);
    o["consumers"] = ojson::array();
    for (const auto& c : t.consumers) o["consumers"].push_back(c);
    o["pinned"] = t.pinned ? std::string(to_string(*t.pinned)) : "unpinned";
    doc["tensors"].push_back(std::move(o));
  }
  doc["meta"]["seed"] = dag.seed();
  return doc.dump(2) + "\n";
}

namespace {

template <typename T>
T field(const ojson& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::kParseError,
                where + ": missing field '" + std::string(key) + "'");
  }
  if constexpr (std::is_unsigned_v<T>) {
    if (!obj.at(key).is_number_unsigned()) {
      throw Error(ErrorCode::kParseError,
                  where + ": field '" + std::string(key) +
                      "' must be a non-negative integer");
    }
  }
  try {
    return obj.at(key).get<T>();
  } catch (const ojson::exception& e) {
    throw Error(ErrorCode::kParseError,
                where + ": bad field '" + std::string(key) + "': " + e.what());
  }
}

}  // namespace

Dag dag_from_json(std::string_view text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  if (!doc.is_object() || !doc.contains("ops") || !doc.contains("tensors") ||
      !doc["ops"].is_array() || !doc["tensors"].is_array()) {
    throw Error(ErrorCode::kParseError,
                "DAG document needs array fields 'ops' and 'tensors'");
  }
  std::uint64_t seed = 0;
  if (doc.contains("meta")) seed = field<std::uint64_t>(doc["meta"], "seed", "meta");

  std::vector<OpNode> ops;
  for (std::size_t i = 0; i < doc["ops"].size(); ++i) {
    const ojson& o = doc["ops"][i];
    const std::string where = "ops[" + std::to_string(i) + "]";
    OpNode op;
    op.id = field<std::string>(o, "id", where);
    op.label = field<std::string>(o, "label", where);
    op.flops = field<std::uint64_t>(o, "flops", where);
    op.random_accesses = field<std::uint64_t>(o, "random_accesses", where);
    op.weight_ids = field<std::vector<std::string>>(o, "weight_ids", where);
    op.input_ids = field<std::vector<std::string>>(o, "input_ids", where);
    op.output_ids = field<std::vector<std::string>>(o, "output_ids", where);
    ops.push_back(std::move(op));
  }
  std::vector<TensorSpec> tensors;
  for (std::size_t i = 0; i < doc["tensors"].size(); ++i) {
    const ojson& o = doc["tensors"][i];
    const std::string where = "tensors[" + std::to_string(i) + "]";
    TensorSpec t;
    t.id = field<std::string>(o, "id", where);
    t.kind = parse_tensor_kind(field<std::string>(o, "kind", where));
    t.size_bytes = field<Bytes>(o, "size_bytes", where);
    if (o.contains("producer") && !o["producer"].is_null()) {
      t.producer = field<std::string>(o, "producer", where);
    }
    if (o.contains("consumers")) {
      auto list = field<std::vector<std::string>>(o, "consumers", where);
      t.consumers = std::set<std::string>(list.begin(), list.end());
    }
    std::string pin = "unpinned";
    if (o.contains("pinned") && !o["pinned"].is_null()) {
      pin = field<std::string>(o, "pinned", where);
    }
    if (pin != "unpinned") t.pinned = parse_placement(pin);
    tensors.push_back(std::move(t));
  }
  return build_dag(std::move(ops), std::move(tensors), seed);
}

Dag read_dag_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return dag_from_json(text);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_dag_file(const Dag& dag, const std::string& path) {
  write_text_file(path, dag_to_json(dag));
}

}  // namespace cxlplan
