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

#ifndef CXLPLAN_PLATFORM_HPP_
#define CXLPLAN_PLATFORM_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cxlplan/graph.hpp"
#include "cxlplan/types.hpp"

namespace cxlplan {

struct OffloadOverhead {
  double alloc_s = 0.0;
  double copy_bw_GBps = 1.0;
  double reconstruct_s = 0.0;

  bool operator==(const OffloadOverhead&) const = default;
};

// Host + memory-device platform. Matrices are indexed [compute][placement].
struct PlatformSpec {
  std::string name;
  std::array<std::array<double, 2>, 2> bw_GBps{};
  std::array<std::array<double, 2>, 2> latency_ns{};
  double host_rate = 1.0;    // FLOP/s
  double device_rate = 1.0;  // FLOP/s
  double migration_overhead_s = 5e-6;
  OffloadOverhead offload_overhead;

  double bandwidth_Bps(ComputeLoc c, Placement p) const {
    return bw_GBps[static_cast<int>(c)][static_cast<int>(p)] * kBytesPerGB;
  }
  double access_latency_s(ComputeLoc c, Placement p) const {
    return latency_ns[static_cast<int>(c)][static_cast<int>(p)] * 1e-9;
  }
  double rate(ComputeLoc c) const {
    return c == ComputeLoc::kHost ? host_rate : device_rate;
  }

  // Throws InvalidArgument if any bandwidth/rate is non-positive or any
  // latency/overhead is negative.
  void validate() const;

  bool operator==(const PlatformSpec&) const = default;
};

enum class PlatformName : std::uint8_t { kA, kB };

// Dual-socket emulation: the device side sees the mirror image of the host's
// bandwidth/latency matrix. Host cores at 3 GHz, device cores at 2 GHz, both
// at 8 FLOP/cycle.
PlatformSpec default_platform(PlatformName name);

// "A", "B", or a path to a JSON platform document.
PlatformSpec resolve_platform(std::string_view name_or_path);
std::string platform_to_json(const PlatformSpec& spec);
PlatformSpec platform_from_json(std::string_view text);

struct OpConfig {
  ComputeLoc compute = ComputeLoc::kHost;
  Placement weights = Placement::kLocal;
  Placement inputs = Placement::kLocal;
  Placement outputs = Placement::kLocal;

  static constexpr std::size_t kCount = 16;

  // Bit layout compute|weights|inputs|outputs, most significant first, so
  // index order is the lexicographic order of the tuple.
  constexpr std::size_t index() const {
    return (static_cast<std::size_t>(compute) << 3) |
           (static_cast<std::size_t>(weights) << 2) |
           (static_cast<std::size_t>(inputs) << 1) |
           static_cast<std::size_t>(outputs);
  }
  static constexpr OpConfig from_index(std::size_t idx) {
    return {static_cast<ComputeLoc>((idx >> 3) & 1),
            static_cast<Placement>((idx >> 2) & 1),
            static_cast<Placement>((idx >> 1) & 1),
            static_cast<Placement>(idx & 1)};
  }

  auto operator<=>(const OpConfig& o) const { return index() <=> o.index(); }
  bool operator==(const OpConfig& o) const { return index() == o.index(); }
};

std::string to_string(const OpConfig& cfg);

// Ops without weights use weights=Local as their only key.
OpConfig canonicalize(OpConfig cfg, const Dag& dag, std::size_t op_idx);
// Configs that are distinct keys for the op: 16, or 8 without weights.
std::vector<OpConfig> valid_configs(const Dag& dag, std::size_t op_idx);

/// Roofline estimate: max(compute, streamed memory) plus a latency term for
/// random accesses, which read from wherever the op's inputs live.
double estimate_latency(const OpNode& op, const OpConfig& cfg, const Dag& dag,
                        const PlatformSpec& platform);
double estimate_latency(std::size_t op_idx, const OpConfig& cfg,
                        const Dag& dag, const PlatformSpec& platform);

struct LutKey {
  std::string op_id;
  OpConfig cfg;

  auto operator<=>(const LutKey&) const = default;
  bool operator==(const LutKey&) const = default;
};

std::string to_string(const LutKey& key);

struct LutProvenance {
  enum class Kind : std::uint8_t { kSynthetic, kMeasured };
  Kind kind = Kind::kSynthetic;
  // Platform name for synthetic tables, file path for measured ones.
  std::string source;
};

// The (op, config) -> latency table the partitioner runs on.
class PerfLUT {
 public:
  using Row = std::array<std::optional<double>, OpConfig::kCount>;

  PerfLUT() = default;
  explicit PerfLUT(LutProvenance provenance)
      : provenance_(std::move(provenance)) {}

  void set(const std::string& op_id, const OpConfig& cfg, double seconds) {
    entries_[op_id][cfg.index()] = seconds;
  }
  void erase(const std::string& op_id, const OpConfig& cfg);
  std::optional<double> find(const std::string& op_id,
                             const OpConfig& cfg) const;

  const std::map<std::string, Row>& entries() const { return entries_; }
  const LutProvenance& provenance() const { return provenance_; }
  // Number of present (op, config) entries.
  std::size_t size() const;

 private:
  std::map<std::string, Row> entries_;
  LutProvenance provenance_;
};

PerfLUT build_lut_synthetic(const Dag& dag, const PlatformSpec& platform);

struct LutValidation {
  std::vector<LutKey> missing;
  std::vector<LutKey> non_positive;

  bool ok() const { return missing.empty() && non_positive.empty(); }
};

// Reports valid (op, config) keys absent from the table, and non-positive
// latencies for ops that move bytes or do flops.
LutValidation validate_lut(const PerfLUT& lut, const Dag& dag);

// Throws IncompleteLUT naming every offending key.
void require_valid_lut(const PerfLUT& lut, const Dag& dag);

// Dense per-op-index view of a validated LUT, canonicalizing the weights
// axis for weightless ops.
class LatencyTable {
 public:
  LatencyTable(const PerfLUT& lut, const Dag& dag);

  double operator()(std::size_t op_idx, const OpConfig& cfg) const {
    OpConfig key = cfg;
    if (!has_weights_[op_idx]) key.weights = Placement::kLocal;
    return rows_[op_idx][key.index()];
  }

 private:
  std::vector<std::array<double, OpConfig::kCount>> rows_;
  std::vector<bool> has_weights_;
};

// Delimited text, header `op_id,compute,weights,inputs,outputs,latency_seconds`.
std::string lut_to_csv(const PerfLUT& lut);
PerfLUT lut_from_csv(std::string_view text, const std::string& source);
PerfLUT load_lut(const std::string& path);
void save_lut(const PerfLUT& lut, const std::string& path);

}  // namespace cxlplan

#endif  // CXLPLAN_PLATFORM_HPP_
