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

// cxlplan: generate workloads, profile them, plan offload and data placement,
// simulate plans, and sweep the latency/host-memory trade-off.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cxlplan/error.hpp"
#include "cxlplan/experiments.hpp"
#include "cxlplan/graph.hpp"
#include "cxlplan/kernel_offload.hpp"
#include "cxlplan/partitioner.hpp"
#include "cxlplan/platform.hpp"
#include "cxlplan/simulator.hpp"

namespace {

using namespace cxlplan;

void emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty() || out_path == "-") {
    std::cout << contents;
  } else {
    write_text_file(out_path, contents);
  }
}

PerfLUT lut_for(const Dag& dag, const std::string& lut_path,
                const PlatformSpec& platform) {
  if (lut_path.empty()) return build_lut_synthetic(dag, platform);
  PerfLUT lut = load_lut(lut_path);
  try {
    require_valid_lut(lut, dag);
  } catch (const Error& e) {
    throw Error(e.code(), lut_path + ": " + e.what());
  }
  return lut;
}

struct Common {
  std::string dag;
  std::string lut;
  std::string platform = "B";
  std::string out;
};

void add_dag(CLI::App* cmd, Common& c) {
  cmd->add_option("--dag", c.dag, "DAG document (JSON)")->required();
}
void add_lut(CLI::App* cmd, Common& c) {
  cmd->add_option("--lut", c.lut,
                  "Measured LUT (CSV); synthesized from --platform if omitted");
}
void add_platform(CLI::App* cmd, Common& c) {
  cmd->add_option("--platform", c.platform, "A, B, or a platform JSON path")
      ->capture_default_str();
}
void add_out(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Output path (stdout if omitted)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offload and placement planner for CXL memory devices"};
  app.require_subcommand(1);

  // gen
  Common gen;
  std::string shape = "chain";
  std::size_t n_ops = 1;
  std::uint64_t seed = 0;
  std::string profile_name = "default";
  std::string io_pin = "local";
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic DAG");
  gen_cmd->add_option("--shape", shape, "chain | fanout | residual")
      ->capture_default_str();
  gen_cmd->add_option("--ops", n_ops, "Number of ops")->capture_default_str();
  gen_cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--profile", profile_name, "default | memory-bound")
      ->capture_default_str();
  gen_cmd->add_option("--io-pin", io_pin,
                      "Pin for external input/output: local | remote | none")
      ->capture_default_str();
  add_out(gen_cmd, gen);

  // profile
  Common prof;
  auto* prof_cmd =
      app.add_subcommand("profile", "Build a synthetic performance LUT");
  add_dag(prof_cmd, prof);
  add_platform(prof_cmd, prof);
  add_out(prof_cmd, prof);

  // partition
  Common part;
  std::optional<double> alpha;
  std::string policy;
  std::size_t passes = 1;
  auto* part_cmd = app.add_subcommand("partition", "Produce a placement plan");
  add_dag(part_cmd, part);
  add_lut(part_cmd, part);
  add_platform(part_cmd, part);
  auto* alpha_opt = part_cmd->add_option("--alpha", alpha,
                                         "Latency weight in [0, 1]");
  auto* policy_opt = part_cmd->add_option(
      "--policy", policy, "ALL_LOCAL | ALL_REMOTE | WEIGHT_REMOTE | RESULT_REMOTE");
  alpha_opt->excludes(policy_opt);
  part_cmd->add_option("--passes", passes,
                       "Conflict-resolution passes (1 = single pass)")
      ->capture_default_str();
  add_out(part_cmd, part);

  // simulate
  Common sim;
  std::string plan_path;
  std::string per_op_path;
  auto* sim_cmd = app.add_subcommand("simulate", "Evaluate a plan");
  add_dag(sim_cmd, sim);
  sim_cmd->add_option("--plan", plan_path, "Plan (CSV)")->required();
  add_lut(sim_cmd, sim);
  add_platform(sim_cmd, sim);
  sim_cmd->add_option("--per-op", per_op_path, "Per-op latency CSV output");
  add_out(sim_cmd, sim);

  // pareto
  Common par;
  std::string grid_text;
  auto* par_cmd = app.add_subcommand("pareto", "Sweep alpha");
  add_dag(par_cmd, par);
  add_lut(par_cmd, par);
  add_platform(par_cmd, par);
  par_cmd->add_option("--alpha-grid", grid_text,
                      "Comma-separated alphas (default 1.0 down to 0.0 by 0.1)");
  add_out(par_cmd, par);

  // oracle-check
  Common orc;
  std::string orc_grid = "0,0.25,0.5,0.75,1";
  std::size_t random_instances = 0;
  std::uint64_t orc_seed = 0;
  std::size_t max_ops = OracleOptions{}.max_ops;
  auto* orc_cmd = app.add_subcommand(
      "oracle-check", "Compare the partitioner against the exact optimum");
  orc_cmd->add_option("--dag", orc.dag, "DAG document (JSON)");
  add_lut(orc_cmd, orc);
  add_platform(orc_cmd, orc);
  orc_cmd->add_option("--alpha-grid", orc_grid, "Comma-separated alphas")
      ->capture_default_str();
  orc_cmd->add_option("--random", random_instances,
                      "Run on this many seeded random DAGs instead of --dag");
  orc_cmd->add_option("--seed", orc_seed, "Seed for --random")
      ->capture_default_str();
  orc_cmd->add_option("--max-ops", max_ops, "Oracle op cap")
      ->capture_default_str();
  add_out(orc_cmd, orc);

  // kernel
  Common ker;
  std::string profiles_path;
  double threshold = 1.0;
  double overhead_cap = 0.10;
  auto* ker_cmd =
      app.add_subcommand("kernel", "Offload metrics for standalone kernels");
  ker_cmd->add_option("--profiles", profiles_path, "Kernel profile CSV")
      ->required();
  add_platform(ker_cmd, ker);
  ker_cmd->add_option("--threshold", threshold, "Minimum saving")
      ->capture_default_str();
  ker_cmd->add_option("--overhead-cap", overhead_cap,
                      "Maximum overhead fraction")
      ->capture_default_str();
  add_out(ker_cmd, ker);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      SizeProfile profile;
      if (profile_name == "memory-bound") {
        profile = SizeProfile::memory_bound();
      } else if (profile_name != "default") {
        throw Error(ErrorCode::kInvalidArgument,
                    "unknown profile '" + profile_name + "'");
      }
      if (io_pin == "none") {
        profile.io_pin = std::nullopt;
      } else {
        profile.io_pin = parse_placement(io_pin);
      }
      emit(gen.out,
           dag_to_json(gen_synthetic(parse_shape(shape), n_ops, seed, profile)));
    } else if (prof_cmd->parsed()) {
      const Dag dag = read_dag_file(prof.dag);
      emit(prof.out,
           lut_to_csv(build_lut_synthetic(dag, resolve_platform(prof.platform))));
    } else if (part_cmd->parsed()) {
      const Dag dag = read_dag_file(part.dag);
      PlacementPlan plan;
      if (!policy.empty()) {
        plan = fixed_policy(dag, parse_policy(policy));
      } else {
        if (!alpha) {
          throw Error(ErrorCode::kInvalidArgument,
                      "partition needs --alpha or --policy");
        }
        const PerfLUT lut =
            lut_for(dag, part.lut, resolve_platform(part.platform));
        plan = partition(dag, lut, make_objective(*alpha, dag, lut),
                         ResolveOptions{passes});
      }
      emit(part.out, plan_to_csv(plan, dag));
    } else if (sim_cmd->parsed()) {
      const Dag dag = read_dag_file(sim.dag);
      const PlatformSpec platform = resolve_platform(sim.platform);
      const PerfLUT lut = lut_for(dag, sim.lut, platform);
      PlacementPlan plan = read_plan_file(plan_path);
      SimReport report;
      try {
        report = simulate(dag, plan, lut, platform);
      } catch (const Error& e) {
        throw Error(e.code(), plan_path + ": " + e.what());
      }
      emit(sim.out, report_to_text(report));
      if (!per_op_path.empty()) emit(per_op_path, per_op_to_csv(report));
    } else if (par_cmd->parsed()) {
      const Dag dag = read_dag_file(par.dag);
      const PlatformSpec platform = resolve_platform(par.platform);
      const PerfLUT lut = lut_for(dag, par.lut, platform);
      const auto grid =
          grid_text.empty() ? default_alpha_grid() : parse_alpha_grid(grid_text);
      emit(par.out, pareto_to_csv(pareto_sweep(dag, lut, platform, grid)));
    } else if (orc_cmd->parsed()) {
      const PlatformSpec platform = resolve_platform(orc.platform);
      const auto grid = parse_alpha_grid(orc_grid);
      if (random_instances > 0) {
        const GapStudy study =
            random_gap_study(random_instances, orc_seed, grid, platform);
        emit(orc.out, gap_study_summary(study));
        if (study.dominance_violations > 0) {
          std::cerr << "error: code=OracleDominance message=partitioner beat "
                       "the oracle in "
                    << study.dominance_violations << " cases\n";
          return 3;
        }
      } else {
        if (orc.dag.empty()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "oracle-check needs --dag or --random");
        }
        const Dag dag = read_dag_file(orc.dag);
        const PerfLUT lut = lut_for(dag, orc.lut, platform);
        OracleOptions options;
        options.max_ops = max_ops;
        const auto rows = oracle_check(dag, lut, platform, grid, options);
        emit(orc.out, gap_rows_to_csv(rows));
        for (const auto& r : rows) {
          if (r.partition_cost <
              r.oracle_cost - kCostTolerance * std::max(1.0, r.oracle_cost)) {
            std::cerr << "error: code=OracleDominance message=partitioner "
                         "beat the oracle at alpha="
                      << format_double(r.alpha) << "\n";
            return 3;
          }
        }
      }
    } else if (ker_cmd->parsed()) {
      const PlatformSpec platform = resolve_platform(ker.platform);
      std::string csv = "kernel_id,saving,overhead_fraction,decision\n";
      for (const auto& k : load_kernel_profiles(profiles_path, platform)) {
        const OffloadMetrics m = offload_metrics(k);
        csv += k.kernel_id + "," + format_double(m.saving) + "," +
               format_double(m.overhead_fraction) + "," +
               std::string(to_string(
                   offload_decision(k, threshold, overhead_cap))) +
               "\n";
      }
      emit(ker.out, csv);
    }
  } catch (const Error& e) {
    std::cerr << "error: code=" << to_string(e.code())
              << " message=" << e.what() << "\n";
    return 2;
  }
  return 0;
}
