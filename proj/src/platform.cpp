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

#include "cxlplan/platform.hpp"

#include <algorithm>
#include <sstream>

#include "cxlplan/error.hpp"
#include "cxlplan/text_table.hpp"
#include "json.hpp"

namespace cxlplan {

void PlatformSpec::validate() const {
  for (const auto& row : bw_GBps) {
    for (double v : row) {
      if (!(v > 0.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "platform '" + name + "': bandwidths must be positive");
      }
    }
  }
  for (const auto& row : latency_ns) {
    for (double v : row) {
      if (!(v >= 0.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "platform '" + name + "': latencies must be non-negative");
      }
    }
  }
  if (!(host_rate > 0.0) || !(device_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "platform '" + name + "': compute rates must be positive");
  }
  if (!(migration_overhead_s >= 0.0) || !(offload_overhead.alloc_s >= 0.0) ||
      !(offload_overhead.reconstruct_s >= 0.0) ||
      !(offload_overhead.copy_bw_GBps > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "platform '" + name + "': bad overhead parameters");
  }
}

namespace {

constexpr double kFlopsPerCycle = 8.0;

PlatformSpec mirrored(std::string name, double bw_local, double bw_remote,
                      double lat_local, double lat_remote) {
  PlatformSpec p;
  p.name = std::move(name);
  p.bw_GBps = {{{bw_local, bw_remote}, {bw_remote, bw_local}}};
  p.latency_ns = {{{lat_local, lat_remote}, {lat_remote, lat_local}}};
  p.host_rate = 3e9 * kFlopsPerCycle;
  p.device_rate = 2e9 * kFlopsPerCycle;
  p.migration_overhead_s = 5e-6;
  p.offload_overhead = {0.0, bw_local, 0.0};
  return p;
}

}  // namespace

PlatformSpec default_platform(PlatformName name) {
  // STREAM COPY bandwidth and single random read latency per socket.
  switch (name) {
    case PlatformName::kA: return mirrored("A", 103.0, 32.0, 70.4, 127.8);
    case PlatformName::kB: return mirrored("B", 161.0, 28.0, 73.0, 403.5);
  }
  return mirrored("B", 161.0, 28.0, 73.0, 403.5);
}

using ojson = nlohmann::ordered_json;

std::string platform_to_json(const PlatformSpec& spec) {
  ojson doc;
  doc["name"] = spec.name;
  doc["bw_GBps"] = {{"host", {{"local", spec.bw_GBps[0][0]},
                              {"remote", spec.bw_GBps[0][1]}}},
                    {"device", {{"local", spec.bw_GBps[1][0]},
                                {"remote", spec.bw_GBps[1][1]}}}};
  doc["access_latency_ns"] = {{"host", {{"local", spec.latency_ns[0][0]},
                                        {"remote", spec.latency_ns[0][1]}}},
                              {"device", {{"local", spec.latency_ns[1][0]},
                                          {"remote", spec.latency_ns[1][1]}}}};
  doc["host_rate"] = spec.host_rate;
  doc["device_rate"] = spec.device_rate;
  doc["migration_overhead_s"] = spec.migration_overhead_s;
  doc["offload_overhead"] = {{"alloc_s", spec.offload_overhead.alloc_s},
                             {"copy_bw_GBps", spec.offload_overhead.copy_bw_GBps},
                             {"reconstruct_s", spec.offload_overhead.reconstruct_s}};
  return doc.dump(2) + "\n";
}

PlatformSpec platform_from_json(std::string_view text) {
  PlatformSpec spec;
  try {
    const ojson doc = ojson::parse(text);
    spec.name = doc.value("name", std::string("custom"));
    const char* locs[] = {"host", "device"};
    const char* places[] = {"local", "remote"};
    for (int c = 0; c < 2; ++c) {
      for (int p = 0; p < 2; ++p) {
        spec.bw_GBps[c][p] = doc.at("bw_GBps").at(locs[c]).at(places[p]).get<double>();
        spec.latency_ns[c][p] =
            doc.at("access_latency_ns").at(locs[c]).at(places[p]).get<double>();
      }
    }
    spec.host_rate = doc.at("host_rate").get<double>();
    spec.device_rate = doc.at("device_rate").get<double>();
    spec.migration_overhead_s = doc.value("migration_overhead_s", 5e-6);
    if (doc.contains("offload_overhead")) {
      const auto& o = doc["offload_overhead"];
      spec.offload_overhead.alloc_s = o.value("alloc_s", 0.0);
      spec.offload_overhead.copy_bw_GBps =
          o.value("copy_bw_GBps", spec.bw_GBps[0][0]);
      spec.offload_overhead.reconstruct_s = o.value("reconstruct_s", 0.0);
    } else {
      spec.offload_overhead.copy_bw_GBps = spec.bw_GBps[0][0];
    }
  } catch (const ojson::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("platform: ") + e.what());
  }
  spec.validate();
  return spec;
}

PlatformSpec resolve_platform(std::string_view name_or_path) {
  if (name_or_path == "A" || name_or_path == "a") {
    return default_platform(PlatformName::kA);
  }
  if (name_or_path == "B" || name_or_path == "b") {
    return default_platform(PlatformName::kB);
  }
  const std::string path(name_or_path);
  try {
    return platform_from_json(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string to_string(const OpConfig& cfg) {
  std::string s;
  s += to_string(cfg.compute);
  s += ',';
  s += to_string(cfg.weights);
  s += ',';
  s += to_string(cfg.inputs);
  s += ',';
  s += to_string(cfg.outputs);
  return s;
}

std::string to_string(const LutKey& key) {
  return "(" + key.op_id + ", " + to_string(key.cfg) + ")";
}

OpConfig canonicalize(OpConfig cfg, const Dag& dag, std::size_t op_idx) {
  if (dag.weights_of(op_idx).empty()) cfg.weights = Placement::kLocal;
  return cfg;
}

std::vector<OpConfig> valid_configs(const Dag& dag, std::size_t op_idx) {
  std::vector<OpConfig> out;
  const bool has_weights = !dag.weights_of(op_idx).empty();
  for (std::size_t i = 0; i < OpConfig::kCount; ++i) {
    OpConfig cfg = OpConfig::from_index(i);
    if (!has_weights && cfg.weights == Placement::kRemote) continue;
    out.push_back(cfg);
  }
  return out;
}

double estimate_latency(std::size_t op_idx, const OpConfig& cfg,
                        const Dag& dag, const PlatformSpec& platform) {
  const OpNode& op = dag.op(op_idx);
  const ComputeLoc c = cfg.compute;
  const double t_compute = static_cast<double>(op.flops) / platform.rate(c);
  const double t_memory =
      static_cast<double>(dag.weight_bytes(op_idx)) /
          platform.bandwidth_Bps(c, cfg.weights) +
      static_cast<double>(dag.input_bytes(op_idx)) /
          platform.bandwidth_Bps(c, cfg.inputs) +
      static_cast<double>(dag.output_bytes(op_idx)) /
          platform.bandwidth_Bps(c, cfg.outputs);
  const double t_latency = static_cast<double>(op.random_accesses) *
                           platform.access_latency_s(c, cfg.inputs);
  return std::max(t_compute, t_memory) + t_latency;
}

double estimate_latency(const OpNode& op, const OpConfig& cfg, const Dag& dag,
                        const PlatformSpec& platform) {
  const auto idx = dag.find_op(op.id);
  if (!idx || dag.op(*idx) != op) {
    throw Error(ErrorCode::kUnknownOp, "op '" + op.id + "' is not in the DAG");
  }
  return estimate_latency(*idx, cfg, dag, platform);
}

void PerfLUT::erase(const std::string& op_id, const OpConfig& cfg) {
  auto it = entries_.find(op_id);
  if (it == entries_.end()) return;
  it->second[cfg.index()].reset();
  if (std::none_of(it->second.begin(), it->second.end(),
                   [](const auto& v) { return v.has_value(); })) {
    entries_.erase(it);
  }
}

std::optional<double> PerfLUT::find(const std::string& op_id,
                                    const OpConfig& cfg) const {
  auto it = entries_.find(op_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second[cfg.index()];
}

std::size_t PerfLUT::size() const {
  std::size_t n = 0;
  for (const auto& [id, row] : entries_) {
    n += static_cast<std::size_t>(std::count_if(
        row.begin(), row.end(), [](const auto& v) { return v.has_value(); }));
  }
  return n;
}

PerfLUT build_lut_synthetic(const Dag& dag, const PlatformSpec& platform) {
  platform.validate();
  PerfLUT lut({LutProvenance::Kind::kSynthetic, platform.name});
  for (std::size_t o = 0; o < dag.num_ops(); ++o) {
    for (const OpConfig& cfg : valid_configs(dag, o)) {
      lut.set(dag.op(o).id, cfg, estimate_latency(o, cfg, dag, platform));
    }
  }
  return lut;
}

LutValidation validate_lut(const PerfLUT& lut, const Dag& dag) {
  LutValidation result;
  for (std::size_t o = 0; o < dag.num_ops(); ++o) {
    const OpNode& op = dag.op(o);
    const bool does_work = op.flops > 0 || op.random_accesses > 0 ||
                           dag.weight_bytes(o) + dag.input_bytes(o) +
                                   dag.output_bytes(o) >
                               0;
    for (const OpConfig& cfg : valid_configs(dag, o)) {
      const auto value = lut.find(op.id, cfg);
      if (!value) {
        result.missing.push_back({op.id, cfg});
      } else if (does_work && !(*value > 0.0)) {
        result.non_positive.push_back({op.id, cfg});
      }
    }
  }
  return result;
}

void require_valid_lut(const PerfLUT& lut, const Dag& dag) {
  const LutValidation v = validate_lut(lut, dag);
  if (v.ok()) return;
  std::ostringstream msg;
  if (!v.missing.empty()) {
    msg << "missing " << v.missing.size() << " entries:";
    for (const auto& key : v.missing) msg << ' ' << to_string(key);
  }
  if (!v.non_positive.empty()) {
    if (!v.missing.empty()) msg << "; ";
    msg << "non-positive latency:";
    for (const auto& key : v.non_positive) msg << ' ' << to_string(key);
  }
  throw Error(ErrorCode::kIncompleteLUT, msg.str());
}

LatencyTable::LatencyTable(const PerfLUT& lut, const Dag& dag) {
  require_valid_lut(lut, dag);
  rows_.resize(dag.num_ops());
  has_weights_.resize(dag.num_ops());
  for (std::size_t o = 0; o < dag.num_ops(); ++o) {
    has_weights_[o] = !dag.weights_of(o).empty();
    const auto& row = lut.entries().at(dag.op(o).id);
    for (std::size_t i = 0; i < OpConfig::kCount; ++i) {
      rows_[o][i] = row[i].value_or(0.0);
    }
  }
}

namespace {

constexpr const char* kLutHeader[] = {"op_id",  "compute", "weights",
                                      "inputs", "outputs", "latency_seconds"};

}  // namespace

std::string lut_to_csv(const PerfLUT& lut) {
  std::string out = "op_id,compute,weights,inputs,outputs,latency_seconds\n";
  for (const auto& [op_id, row] : lut.entries()) {
    for (std::size_t i = 0; i < OpConfig::kCount; ++i) {
      if (!row[i]) continue;
      out += op_id;
      out += ',';
      out += to_string(OpConfig::from_index(i));
      out += ',';
      out += format_double(*row[i]);
      out += '\n';
    }
  }
  return out;
}

PerfLUT lut_from_csv(std::string_view text, const std::string& source) {
  PerfLUT lut({LutProvenance::Kind::kMeasured, source});
  const auto rows = parse_delimited(text);
  if (rows.empty()) {
    throw Error(ErrorCode::kParseError, source + ": row 1: missing header");
  }
  const auto& header = rows.front();
  if (header.fields.size() != std::size(kLutHeader) ||
      !std::equal(header.fields.begin(), header.fields.end(),
                  std::begin(kLutHeader))) {
    throw Error(ErrorCode::kParseError,
                source + ": row " + std::to_string(header.line) +
                    ": expected header "
                    "op_id,compute,weights,inputs,outputs,latency_seconds");
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto fail = [&](const std::string& why) {
      return Error(ErrorCode::kParseError,
                   source + ": row " + std::to_string(row.line) + ": " + why);
    };
    if (row.fields.size() != std::size(kLutHeader)) {
      throw fail("expected 6 fields, got " + std::to_string(row.fields.size()));
    }
    OpConfig cfg;
    double latency = 0.0;
    try {
      cfg.compute = parse_compute(row.fields[1]);
      cfg.weights = parse_placement(row.fields[2]);
      cfg.inputs = parse_placement(row.fields[3]);
      cfg.outputs = parse_placement(row.fields[4]);
      latency = parse_double(row.fields[5]);
    } catch (const Error& e) {
      throw fail(e.what());
    }
    if (row.fields[0].empty()) throw fail("empty op_id");
    if (latency < 0.0) throw fail("negative latency " + row.fields[5]);
    if (lut.find(row.fields[0], cfg)) {
      throw fail("duplicate entry " + to_string(LutKey{row.fields[0], cfg}));
    }
    lut.set(row.fields[0], cfg, latency);
  }
  return lut;
}

PerfLUT load_lut(const std::string& path) {
  return lut_from_csv(read_text_file(path), path);
}

void save_lut(const PerfLUT& lut, const std::string& path) {
  write_text_file(path, lut_to_csv(lut));
}

}  // namespace cxlplan
