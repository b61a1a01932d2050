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

#ifndef CXLPLAN_GRAPH_HPP_
#define CXLPLAN_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cxlplan/types.hpp"

namespace cxlplan {

enum class TensorKind : std::uint8_t {
  kWeight,
  kIntermediate,
  kExternalInput,
  kExternalOutput,
};

std::string_view to_string(TensorKind kind);
TensorKind parse_tensor_kind(std::string_view text);

struct TensorSpec {
  std::string id;
  TensorKind kind = TensorKind::kIntermediate;
  Bytes size_bytes = 0;
  // Filled by build_dag from the op lists. When supplied up front they must
  // agree with what the ops say.
  std::optional<std::string> producer;
  std::set<std::string> consumers;
  // nullopt means unpinned.
  std::optional<Placement> pinned;

  bool operator==(const TensorSpec&) const = default;
};

struct OpNode {
  std::string id;
  std::string label;
  std::uint64_t flops = 0;
  std::uint64_t random_accesses = 0;
  std::vector<std::string> weight_ids;
  std::vector<std::string> input_ids;
  std::vector<std::string> output_ids;

  bool operator==(const OpNode&) const = default;
};

/// Validated, immutable computation graph.
///
/// Ops and tensors keep the order they were given in. Indices returned by the
/// accessors refer to positions in ops() and tensors().
class Dag {
 public:
  Dag() = default;

  const std::vector<OpNode>& ops() const { return ops_; }
  const std::vector<TensorSpec>& tensors() const { return tensors_; }
  std::size_t num_ops() const { return ops_.size(); }
  std::size_t num_tensors() const { return tensors_.size(); }
  bool empty() const { return ops_.empty(); }

  // Op indices in topological order; ties between ready ops go to the op
  // that appears first in ops().
  const std::vector<std::size_t>& topo() const { return topo_; }
  std::vector<std::string> topo_ids() const;
  // Position of op `op_idx` within topo().
  std::size_t topo_rank(std::size_t op_idx) const { return topo_rank_[op_idx]; }

  std::optional<std::size_t> find_op(std::string_view id) const;
  std::optional<std::size_t> find_tensor(std::string_view id) const;
  // Throw UnknownOp / DanglingReference respectively.
  std::size_t op_index(std::string_view id) const;
  std::size_t tensor_index(std::string_view id) const;

  const OpNode& op(std::size_t idx) const { return ops_[idx]; }
  const TensorSpec& tensor(std::size_t idx) const { return tensors_[idx]; }

  // Resolved tensor indices per op.
  const std::vector<std::size_t>& weights_of(std::size_t op_idx) const {
    return op_weights_[op_idx];
  }
  const std::vector<std::size_t>& inputs_of(std::size_t op_idx) const {
    return op_inputs_[op_idx];
  }
  const std::vector<std::size_t>& outputs_of(std::size_t op_idx) const {
    return op_outputs_[op_idx];
  }

  // Producer op index of a tensor, if any.
  std::optional<std::size_t> producer_of(std::size_t tensor_idx) const {
    return tensor_producer_[tensor_idx];
  }
  // Ops reading the tensor (as weight or input), ascending op index.
  const std::vector<std::size_t>& consumers_of(std::size_t tensor_idx) const {
    return tensor_consumers_[tensor_idx];
  }

  Bytes weight_bytes(std::size_t op_idx) const;
  Bytes input_bytes(std::size_t op_idx) const;
  Bytes output_bytes(std::size_t op_idx) const;

  std::uint64_t seed() const { return seed_; }

  friend bool operator==(const Dag& a, const Dag& b) {
    return a.seed_ == b.seed_ && a.ops_ == b.ops_ && a.tensors_ == b.tensors_;
  }

 private:
  friend Dag build_dag(std::vector<OpNode>, std::vector<TensorSpec>,
                       std::uint64_t);

  std::vector<OpNode> ops_;
  std::vector<TensorSpec> tensors_;
  std::vector<std::size_t> topo_;
  std::vector<std::size_t> topo_rank_;
  std::unordered_map<std::string, std::size_t> op_lookup_;
  std::unordered_map<std::string, std::size_t> tensor_lookup_;
  std::vector<std::vector<std::size_t>> op_weights_;
  std::vector<std::vector<std::size_t>> op_inputs_;
  std::vector<std::vector<std::size_t>> op_outputs_;
  std::vector<std::optional<std::size_t>> tensor_producer_;
  std::vector<std::vector<std::size_t>> tensor_consumers_;
  std::uint64_t seed_ = 0;
};

// Validates references, tensor kinds and acyclicity, derives producer and
// consumer sets, and computes the topological order.
//
// Errors: CycleDetected, DanglingReference, DuplicateProducer,
// MissingProducer, KindMismatch, DuplicateId.
Dag build_dag(std::vector<OpNode> ops, std::vector<TensorSpec> tensors,
              std::uint64_t seed = 0);

// Sum of every tensor's size, each tensor counted once.
Bytes total_bytes(const Dag& dag);

enum class Shape : std::uint8_t { kChain, kFanout, kResidual };

std::string_view to_string(Shape shape);
Shape parse_shape(std::string_view text);

template <typename T>
struct Range {
  T lo;
  T hi;
};

// Distributions for the synthetic generator. Every draw is uniform over the
// closed range.
struct SizeProfile {
  Range<Bytes> weight_bytes{1ull << 20, 64ull << 20};
  Range<Bytes> activation_bytes{1ull << 20, 64ull << 20};
  Range<Bytes> io_bytes{1ull << 20, 16ull << 20};
  // Arithmetic intensity, FLOP per byte touched by the op.
  Range<double> flops_per_byte{0.05, 2.0};
  Range<std::uint64_t> random_accesses{0, 0};
  // Placement forced onto the external input and output; nullopt leaves
  // them free for the planner.
  std::optional<Placement> io_pin = Placement::kLocal;

  // Large activations, low intensity, small I/O.
  static SizeProfile memory_bound();
};

// Deterministic for equal arguments on every platform (the generator is
// std::mt19937_64 with hand-rolled range mapping).
//
// chain:    x -> op0 -> t0 -> op1 -> ... -> y, one weight per op.
// fanout:   op0 feeds n_ops-2 parallel ops, joined by a weightless op.
//           Needs n_ops >= 3.
// residual: chain where every even op i >= 2 also reads the output of op i-2.
Dag gen_synthetic(Shape shape, std::size_t n_ops, std::uint64_t seed,
                  const SizeProfile& profile = {});

// Fixed set of large, bandwidth-bound graphs used for trade-off sweeps.
std::vector<Dag> memory_bound_suite();

// JSON document with top-level keys "ops", "tensors" and "meta.seed".
std::string dag_to_json(const Dag& dag);
Dag dag_from_json(std::string_view text);

Dag read_dag_file(const std::string& path);
void write_dag_file(const Dag& dag, const std::string& path);

}  // namespace cxlplan

#endif  // CXLPLAN_GRAPH_HPP_
