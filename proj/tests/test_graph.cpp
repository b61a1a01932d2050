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

#include "cxlplan/error.hpp"
#include "cxlplan/random.hpp"
#include "doctest.h"

using namespace cxlplan;

namespace {

constexpr Bytes kMB = 1000 * 1000;
constexpr Bytes kGiB = 1ull << 30;

TensorSpec tensor(std::string id, TensorKind kind, Bytes size) {
  TensorSpec t;
  t.id = std::move(id);
  t.kind = kind;
  t.size_bytes = size;
  return t;
}

OpNode op(std::string id, std::vector<std::string> weights,
          std::vector<std::string> inputs, std::vector<std::string> outputs) {
  OpNode o;
  o.id = std::move(id);
  o.label = "test";
  o.weight_ids = std::move(weights);
  o.input_ids = std::move(inputs);
  o.output_ids = std::move(outputs);
  return o;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

// Every producer appears before each of its consumers in topo().
bool topo_respects_edges(const Dag& dag) {
  for (std::size_t t = 0; t < dag.num_tensors(); ++t) {
    auto p = dag.producer_of(t);
    if (!p) continue;
    for (std::size_t c : dag.consumers_of(t)) {
      if (dag.topo_rank(*p) >= dag.topo_rank(c)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("build_dag: empty graph") {
  const Dag dag = build_dag({}, {});
  CHECK(dag.empty());
  CHECK(dag.topo().empty());
  CHECK(total_bytes(dag) == 0);
}

TEST_CASE("build_dag: single edge orders producer first") {
  // B is listed first so the order is forced by the edge, not by input order.
  const Dag dag = build_dag(
      {op("B", {}, {"t1"}, {"t2"}), op("A", {}, {"x"}, {"t1"})},
      {tensor("x", TensorKind::kExternalInput, 1),
       tensor("t1", TensorKind::kIntermediate, 1),
       tensor("t2", TensorKind::kExternalOutput, 1)});
  CHECK(dag.topo_ids() == std::vector<std::string>{"A", "B"});
  const auto& t1 = dag.tensor(dag.tensor_index("t1"));
  REQUIRE(t1.producer);
  CHECK(*t1.producer == "A");
  CHECK(t1.consumers == std::set<std::string>{"B"});
}

TEST_CASE("build_dag: two-cycle is rejected") {
  auto code = code_of([] {
    build_dag({op("A", {}, {"t1"}, {"t2"}), op("B", {}, {"t2"}, {"t1"})},
              {tensor("t1", TensorKind::kIntermediate, 1),
               tensor("t2", TensorKind::kIntermediate, 1)});
  });
  CHECK(code == ErrorCode::kCycleDetected);
}

TEST_CASE("build_dag: error paths") {
  SUBCASE("missing tensor") {
    CHECK(code_of([] { build_dag({op("A", {}, {"nope"}, {})}, {}); }) ==
          ErrorCode::kDanglingReference);
  }
  SUBCASE("two producers") {
    CHECK(code_of([] {
            build_dag({op("A", {}, {}, {"t"}), op("B", {}, {}, {"t"})},
                      {tensor("t", TensorKind::kIntermediate, 1)});
          }) == ErrorCode::kDuplicateProducer);
  }
  SUBCASE("weight listed as input") {
    CHECK(code_of([] {
            build_dag({op("A", {}, {"w"}, {})},
                      {tensor("w", TensorKind::kWeight, 1)});
          }) == ErrorCode::kKindMismatch);
  }
  SUBCASE("intermediate with no producer") {
    CHECK(code_of([] {
            build_dag({op("A", {}, {"t"}, {})},
                      {tensor("t", TensorKind::kIntermediate, 1)});
          }) == ErrorCode::kMissingProducer);
  }
  SUBCASE("op reading its own output") {
    CHECK(code_of([] {
            build_dag({op("A", {}, {"t"}, {"t"})},
                      {tensor("t", TensorKind::kIntermediate, 1)});
          }) == ErrorCode::kCycleDetected);
  }
  SUBCASE("duplicate op id") {
    CHECK(code_of([] {
            build_dag({op("A", {}, {}, {}), op("A", {}, {}, {})}, {});
          }) == ErrorCode::kDuplicateId);
  }
  SUBCASE("stated producer disagrees with ops") {
    auto t = tensor("t", TensorKind::kIntermediate, 1);
    t.producer = "ghost";
    CHECK(code_of([&] { build_dag({op("A", {}, {}, {"t"})}, {t}); }) ==
          ErrorCode::kDanglingReference);
  }
}

TEST_CASE("total_bytes counts each tensor once") {
  SUBCASE("weight plus intermediate") {
    const Dag dag = build_dag(
        {op("A", {"w"}, {}, {"t"})},
        {tensor("w", TensorKind::kWeight, 4 * kGiB),
         tensor("t", TensorKind::kIntermediate, 1 * kGiB)});
    CHECK(total_bytes(dag) == 5 * kGiB);
  }
  SUBCASE("chain with shared middle tensor") {
    const Dag dag = build_dag(
        {op("A", {}, {"a"}, {"b"}), op("B", {}, {"b"}, {"c"}),
         op("C", {}, {"c"}, {})},
        {tensor("a", TensorKind::kExternalInput, 1 * kMB),
         tensor("b", TensorKind::kIntermediate, 2 * kMB),
         tensor("c", TensorKind::kIntermediate, 3 * kMB)});
    CHECK(total_bytes(dag) == 6 * kMB);
  }
  SUBCASE("weight shared by two ops") {
    const Dag dag = build_dag(
        {op("A", {"w"}, {"x"}, {"t"}), op("B", {"w"}, {"t"}, {})},
        {tensor("w", TensorKind::kWeight, 7), tensor("x", TensorKind::kExternalInput, 1),
         tensor("t", TensorKind::kIntermediate, 2)});
    CHECK(total_bytes(dag) == 10);
    CHECK(dag.consumers_of(dag.tensor_index("w")).size() == 2);
  }
}

TEST_CASE("gen_synthetic: minimal chain") {
  const Dag dag = gen_synthetic(Shape::kChain, 1, 0);
  CHECK(dag.num_ops() == 1);
  auto count = [&](TensorKind k) {
    return std::count_if(dag.tensors().begin(), dag.tensors().end(),
                         [&](const TensorSpec& t) { return t.kind == k; });
  };
  CHECK(count(TensorKind::kExternalInput) == 1);
  CHECK(count(TensorKind::kExternalOutput) == 1);
  CHECK(count(TensorKind::kWeight) == 1);
  CHECK(count(TensorKind::kIntermediate) == 0);
  // External I/O defaults to host memory.
  CHECK(dag.tensor(dag.tensor_index("x")).pinned == Placement::kLocal);
  CHECK(dag.tensor(dag.tensor_index("y")).pinned == Placement::kLocal);
}

TEST_CASE("gen_synthetic: determinism") {
  const Dag a = gen_synthetic(Shape::kChain, 5, 7);
  const Dag b = gen_synthetic(Shape::kChain, 5, 7);
  CHECK(a == b);
  CHECK(dag_to_json(a) == dag_to_json(b));
  CHECK(dag_to_json(a) != dag_to_json(gen_synthetic(Shape::kChain, 5, 8)));
}

TEST_CASE("gen_synthetic: fanout structure") {
  const Dag dag = gen_synthetic(Shape::kFanout, 4, 1);
  REQUIRE(dag.num_ops() == 4);
  const std::size_t source = dag.op_index("op0");
  const std::size_t join = dag.op_index("op3");
  CHECK(dag.topo().front() == source);
  CHECK(dag.topo().back() == join);
  // The source output feeds both branches.
  const std::size_t t0 = dag.outputs_of(source).front();
  CHECK(dag.consumers_of(t0).size() == 2);
  // The join reads two intermediates and has no weights.
  CHECK(dag.inputs_of(join).size() == 2);
  for (std::size_t t : dag.inputs_of(join)) {
    CHECK(dag.tensor(t).kind == TensorKind::kIntermediate);
  }
  CHECK(dag.weights_of(join).empty());
  CHECK(code_of([] { gen_synthetic(Shape::kFanout, 2, 0); }) ==
        ErrorCode::kInvalidShapeParams);
  CHECK(code_of([] { gen_synthetic(Shape::kChain, 0, 0); }) ==
        ErrorCode::kInvalidShapeParams);
}

TEST_CASE("gen_synthetic: residual skip edges") {
  const Dag dag = gen_synthetic(Shape::kResidual, 5, 3);
  CHECK(dag.inputs_of(dag.op_index("op2")).size() == 2);
  CHECK(dag.inputs_of(dag.op_index("op3")).size() == 1);
  CHECK(dag.inputs_of(dag.op_index("op4")).size() == 2);
}

TEST_CASE("property: topological order and JSON round trip") {
  SeededDraws draw(2024);
  for (int i = 0; i < 60; ++i) {
    const Shape shape = static_cast<Shape>(draw.uniform_int(0, 2));
    const std::size_t n = draw.uniform_int(3, 24);
    SizeProfile profile = draw.uniform_int(0, 1) ? SizeProfile{}
                                                 : SizeProfile::memory_bound();
    if (draw.uniform_int(0, 1)) profile.io_pin = std::nullopt;
    profile.random_accesses = {0, draw.uniform_int(0, 1000)};
    const Dag dag = gen_synthetic(shape, n, draw.next(), profile);
    CHECK(topo_respects_edges(dag));
    const Dag back = dag_from_json(dag_to_json(dag));
    CHECK(back == dag);
    CHECK(back.topo() == dag.topo());
  }
}

TEST_CASE("dag_from_json: malformed documents") {
  CHECK(code_of([] { dag_from_json("{not json"); }) == ErrorCode::kParseError);
  CHECK(code_of([] { dag_from_json(R"({"ops": []})"); }) ==
        ErrorCode::kParseError);
  CHECK(code_of([] {
          dag_from_json(
              R"({"ops":[{"id":"a","label":"x","flops":-1,"random_accesses":0,)"
              R"("weight_ids":[],"input_ids":[],"output_ids":[]}],"tensors":[],)"
              R"("meta":{"seed":0}})");
        }) == ErrorCode::kParseError);
  const Dag ok = dag_from_json(R"({"ops": [], "tensors": [], "meta": {"seed": 3}})");
  CHECK(ok.seed() == 3);
}
