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

// Drives the cxlplan executable end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cxlplan/text_table.hpp"
#include "cxlplan/types.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace cxlplan;

namespace {

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::path(CXLPLAN_TEST_WORK_DIR) / "cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path(const std::string& name) { return (work_dir() / name).string(); }

// Runs the CLI with `args`, stderr redirected to `err` in the work dir.
int run(const std::string& args, const std::string& err = "stderr.txt") {
  const std::string cmd = std::string("\"") + CXLPLAN_CLI_PATH + "\" " + args +
                          " >/dev/null 2>\"" + path(err) + "\"";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& name) { return read_text_file(path(name)); }

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

// Rows of a CSV body keyed by the first field.
std::map<std::string, std::vector<std::string>> rows_by_key(const std::string& csv) {
  std::map<std::string, std::vector<std::string>> out;
  const auto rows = parse_delimited(csv);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    out[rows[r].fields[0] + "/" + rows[r].fields[1]] = rows[r].fields;
  }
  return out;
}

}  // namespace

TEST_CASE("cli: gen is deterministic") {
  REQUIRE(run("gen --shape chain --ops 5 --seed 7 --out " + path("g1.json")) == 0);
  REQUIRE(run("gen --shape chain --ops 5 --seed 7 --out " + path("g2.json")) == 0);
  CHECK(slurp("g1.json") == slurp("g2.json"));
  REQUIRE(run("gen --shape chain --ops 5 --seed 8 --out " + path("g3.json")) == 0);
  CHECK(slurp("g1.json") != slurp("g3.json"));
}

TEST_CASE("cli: alpha 0 sends every unpinned byte remote") {
  REQUIRE(run("gen --shape residual --ops 8 --seed 3 --io-pin none --out " +
              path("free.json")) == 0);
  REQUIRE(run("profile --dag " + path("free.json") + " --out " + path("free_lut.csv")) == 0);
  REQUIRE(run("partition --dag " + path("free.json") + " --lut " + path("free_lut.csv") +
              " --alpha 0 --out " + path("free_plan.csv")) == 0);
  REQUIRE(run("simulate --dag " + path("free.json") + " --lut " + path("free_lut.csv") +
              " --plan " + path("free_plan.csv") + " --out " + path("free_report.txt") +
              " --per-op " + path("free_per_op.csv")) == 0);
  const auto report = key_values(slurp("free_report.txt"));
  CHECK(report.at("remote_fraction") == "1");
  CHECK(report.at("host_bytes") == "0");
  CHECK(slurp("free_per_op.csv").rfind("op_id,latency_s\n", 0) == 0);
}

TEST_CASE("cli: RESULT_REMOTE plan keeps weights local") {
  REQUIRE(run("gen --shape chain --ops 3 --seed 1 --out " + path("rr.json")) == 0);
  REQUIRE(run("partition --dag " + path("rr.json") +
              " --policy RESULT_REMOTE --out " + path("rr_plan.csv")) == 0);
  const auto rows = rows_by_key(slurp("rr_plan.csv"));
  CHECK(rows.at("tensor/w0")[2] == "local");
  CHECK(rows.at("tensor/w2")[2] == "local");
  CHECK(rows.at("tensor/t0")[2] == "remote");
  CHECK(rows.at("tensor/t1")[2] == "remote");
  CHECK(rows.at("op/op1")[2] == "host");
}

TEST_CASE("cli: pareto rows") {
  REQUIRE(run("gen --shape fanout --ops 6 --seed 4 --io-pin none --out " +
              path("p.json")) == 0);
  REQUIRE(run("pareto --dag " + path("p.json") + " --alpha-grid 0.0 --out " +
              path("p0.csv")) == 0);
  REQUIRE(run("pareto --dag " + path("p.json") + " --alpha-grid 1.0 --out " +
              path("p1.csv")) == 0);
  const auto zero = parse_delimited(slurp("p0.csv"));
  REQUIRE(zero.size() == 6);  // header, one alpha row, four policies
  CHECK(zero[0].fields == std::vector<std::string>{"alpha", "latency_s", "latency_rel",
                                                   "remote_fraction", "host_bytes",
                                                   "migrations"});
  CHECK(zero[1].fields[0] == "0");
  CHECK(zero[1].fields[3] == "1");
  CHECK(zero[2].fields[0] == "ALL_LOCAL");
  CHECK(zero[2].fields[2] == "1");
  CHECK(zero[2].fields[3] == "0");

  const auto one = parse_delimited(slurp("p1.csv"));
  REQUIRE(one.size() == 6);
  CHECK(parse_double(one[1].fields[2]) <= 1.1);

  REQUIRE(run("pareto --dag " + path("p.json") + " --out " + path("pd.csv")) == 0);
  const auto full = parse_delimited(slurp("pd.csv"));
  REQUIRE(full.size() == 1 + 11 + 4);
  CHECK(full[1].fields[0] == "1");
  CHECK(full[11].fields[0] == "0");
}

TEST_CASE("cli: oracle-check") {
  REQUIRE(run("gen --shape chain --ops 1 --seed 2 --out " + path("one.json")) == 0);
  REQUIRE(run("oracle-check --dag " + path("one.json") + " --out " + path("gap.csv")) == 0);
  const auto rows = parse_delimited(slurp("gap.csv"));
  REQUIRE(rows.size() == 6);
  for (std::size_t r = 1; r < rows.size(); ++r) CHECK(rows[r].fields[3] == "0");

  REQUIRE(run("oracle-check --random 5 --seed 9 --out " + path("gap_summary.txt")) == 0);
  const std::string summary = slurp("gap_summary.txt");
  CHECK(summary.rfind("cases=25 dominance_violations=0 ", 0) == 0);

  REQUIRE(run("gen --shape chain --ops 13 --seed 2 --out " + path("big.json")) == 0);
  CHECK(run("oracle-check --dag " + path("big.json"), "big_err.txt") == 2);
  CHECK(slurp("big_err.txt").rfind("error: code=TooLarge message=", 0) == 0);
}

TEST_CASE("cli: kernel offload table") {
  REQUIRE(run("kernel --platform B --profiles " CXLPLAN_FIXTURE_DIR
              "/hnsw_platform_b.csv --out " + path("kb.csv")) == 0);
  const auto rows = parse_delimited(slurp("kb.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].fields ==
        std::vector<std::string>{"kernel_id", "saving", "overhead_fraction", "decision"});
  CHECK(rows[1].fields[0] == "hnsw_indexing");
  CHECK(parse_double(rows[1].fields[1]) == doctest::Approx(6.87).epsilon(1e-6));
  CHECK(rows[2].fields[3] == "offload");
}

TEST_CASE("cli: structured errors") {
  CHECK(run("simulate --dag " + path("missing.json") + " --plan x.csv", "e1.txt") == 2);
  const std::string e1 = slurp("e1.txt");
  CHECK(e1.rfind("error: code=IoError message=", 0) == 0);
  CHECK(e1.find("missing.json") != std::string::npos);

  write_text_file(path("bad.json"), "{\"ops\": [");
  CHECK(run("profile --dag " + path("bad.json"), "e2.txt") == 2);
  CHECK(slurp("e2.txt").rfind("error: code=ParseError message=", 0) == 0);

  CHECK(run("gen --shape spiral --ops 3", "e3.txt") == 2);
  CHECK(slurp("e3.txt").rfind("error: code=InvalidShapeParams", 0) == 0);

  REQUIRE(run("gen --shape chain --ops 4 --seed 5 --out " + path("lut_dag.json")) == 0);
  REQUIRE(run("profile --dag " + path("lut_dag.json") + " --out " + path("full.csv")) == 0);
  std::string lut = slurp("full.csv");
  const std::string victim = "op3,device,remote,remote,remote,";
  const auto at = lut.find(victim);
  REQUIRE(at != std::string::npos);
  lut.erase(at, lut.find('\n', at) - at + 1);
  write_text_file(path("holed.csv"), lut);
  CHECK(run("partition --alpha 0.5 --dag " + path("lut_dag.json") + " --lut " +
                path("holed.csv"),
            "e4.txt") == 2);
  const std::string e4 = slurp("e4.txt");
  CHECK(e4.rfind("error: code=IncompleteLUT", 0) == 0);
  CHECK(e4.find("op3") != std::string::npos);

  CHECK(run("partition --alpha 0.5 --policy ALL_LOCAL --dag " + path("lut_dag.json"),
            "e5.txt") != 0);
}
