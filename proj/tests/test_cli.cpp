// Copyright 2026 The gridsec Authors
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

#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gridsec/cli.hpp"
#include "gridsec/instance_io.hpp"

using namespace gridsec;
using namespace gridsec::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "gridsec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gridsec_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Plans for the benchmark, produced once through the CLI itself.
const fs::path& plan_dir() {
  static const fs::path dir = [] {
    const fs::path d = scratch_dir("plans");
    const std::string data = benchmark_path().string();
    REQUIRE(run({"plan", data, "--out", d.string()}).code == 0);
    REQUIRE(run({"plan", data, "--security", "--c0", "5.55e6", "--out", d.string()}).code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("plan prints the cost summary and writes its artifacts") {
  const fs::path dir = scratch_dir("plan");
  const Run r = run({"plan", benchmark_path().string(), "--security", "--c0", "5.55e6", "--out",
                     dir.string(), "--emit-lp", (dir / "model.lp").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("367,300") != std::string::npos);
  CHECK(r.out.find("375,000 (+2.1%)") != std::string::npos);
  CHECK(r.out.find("S4-22") != std::string::npos);
  CHECK(r.out.find("Tolerable attack power") != std::string::npos);
  CHECK(fs::exists(dir / "plan_secure.json"));
  CHECK(fs::exists(dir / "plan_secure_cost.json"));
  CHECK(fs::exists(dir / "solve.log"));
  CHECK(fs::exists(dir / "model.lp"));
}

TEST_CASE("plan is byte-identical across runs") {
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  run({"plan", benchmark_path().string(), "--out", a.string()});
  run({"plan", benchmark_path().string(), "--out", b.string()});
  CHECK(read_text_file(a / "plan_insecure.json") == read_text_file(b / "plan_insecure.json"));
  CHECK(read_text_file(a / "plan_insecure_cost.json") == read_text_file(b / "plan_insecure_cost.json"));
}

TEST_CASE("input errors exit with code 1") {
  CHECK(run({"plan", "missing.json"}).code == kExitInputError);
  CHECK(run({"plan"}).code == kExitInputError);
  CHECK(run({"frobnicate"}).code == kExitInputError);
  CHECK(run({"plan", benchmark_path().string(), "--c0", "-3"}).code == kExitInputError);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("an infeasible budget exits with code 2") {
  const fs::path dir = scratch_dir("infeasible");
  const Run r = run({"plan", benchmark_path().string(), "--security", "--c0", "1e8", "--out", dir.string()});
  CHECK(r.code == kExitInfeasible);
}

TEST_CASE("assess lists the most vulnerable consumers") {
  const std::string data = benchmark_path().string();
  const Run a = run({"assess", data, (plan_dir() / "plan_insecure.json").string(), "--top-k", "3"});
  CHECK(a.code == 0);
  const auto p22 = a.out.find(" 22 "), p43 = a.out.find(" 43 "), p23 = a.out.find(" 23 ");
  CHECK(p22 < p43);
  CHECK(p43 < p23);
  CHECK(p23 != std::string::npos);
  const Run b = run({"assess", data, (plan_dir() / "plan_secure.json").string()});
  CHECK(b.out.find(" 50 ") < b.out.find(" 31 "));
  const Run all = run({"assess", data, (plan_dir() / "plan_secure.json").string(), "--top-k", "999"});
  CHECK(all.code == 0);
}

TEST_CASE("a plan for another instance is a reference mismatch") {
  const fs::path dir = scratch_dir("mismatch");
  write_text_file(dir / "tri.json", instance_to_json(triangle_instance()));
  const Run r = run({"assess", (dir / "tri.json").string(), (plan_dir() / "plan_insecure.json").string()});
  CHECK(r.code == kExitMismatch);
}

TEST_CASE("simulate reports exceedance against the tolerable band") {
  const std::string data = benchmark_path().string();
  const fs::path dir = scratch_dir("simulate");
  const Run a = run({"simulate", data, (plan_dir() / "plan_insecure.json").string(), "--target", "22",
                     "--c0", "5.55e6", "--flip-time", "4", "--out", dir.string()});
  CHECK(a.code == 0);
  CHECK(a.out.find("exceeded: yes") != std::string::npos);
  CHECK(fs::exists(dir / "response_22.csv"));
  const Run b = run({"simulate", data, (plan_dir() / "plan_secure.json").string(), "--target", "22",
                     "--c0", "5.55e6", "--flip-time", "4", "--out", dir.string()});
  CHECK(b.out.find("exceeded: no") != std::string::npos);
  const Run z = run({"simulate", data, (plan_dir() / "plan_secure.json").string(), "--target", "22",
                     "--c0", "0", "--csv", (dir / "flat.csv").string()});
  CHECK(z.code == 0);
  std::istringstream csv(read_text_file(dir / "flat.csv"));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    const auto first = line.find(',');
    const auto second = line.find(',', first + 1);
    CHECK(std::stod(line.substr(second + 1)) == 0.0);
  }
  const Run bad = run({"simulate", data, (plan_dir() / "plan_secure.json").string(), "--target", "99"});
  CHECK(bad.code == kExitMismatch);
}

TEST_CASE("sweep writes one row per plan and budget") {
  const std::string data = benchmark_path().string();
  const fs::path dir = scratch_dir("sweep");
  const Run r = run({"sweep", data, (plan_dir() / "plan_insecure.json").string(),
                     (plan_dir() / "plan_secure.json").string(), "--c0-grid", "1e6,2e6,3e6", "--out",
                     dir.string()});
  CHECK(r.code == 0);
  const std::string csv = read_text_file(dir / "sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(run({"sweep", data, (plan_dir() / "plan_secure.json").string(), "--c0-grid", "x"}).code ==
        kExitInputError);
}

TEST_CASE("oracle command") {
  const fs::path dir = scratch_dir("oracle");
  write_text_file(dir / "tri.json", instance_to_json(triangle_instance()));
  const Run tri = run({"oracle", (dir / "tri.json").string()});
  CHECK(tri.code == 0);
  CHECK(tri.out.find("PASS") != std::string::npos);
  const Run rnd = run({"oracle", "--random-nodes", "8", "--seed", "42", "--security"});
  CHECK(rnd.code == 0);
  CHECK(rnd.out.find("PASS") != std::string::npos);
  const Run big = run({"oracle", benchmark_path().string()});
  CHECK(big.code == kExitGuard);
  CHECK(big.err.find("exceeds oracle cap") != std::string::npos);
}

TEST_CASE("export writes flow and voltage tables") {
  const fs::path dir = scratch_dir("export");
  const Run r = run({"export", benchmark_path().string(), (plan_dir() / "plan_secure.json").string(),
                     "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "flows.csv"));
  CHECK(fs::exists(dir / "voltages.csv"));
}
