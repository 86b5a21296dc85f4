#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace testutil;

namespace {

struct CmdResult {
  int exit_code;
  std::string output;
};

CmdResult run_cli(const std::string& args) {
  std::string cmd = std::string(SIGFUZZ_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  while (fgets(buf, sizeof buf, pipe)) out += buf;
  int rc = pclose(pipe);
  return {WEXITSTATUS(rc), out};
}

}  // namespace

TEST_CASE("run with a zero budget reports seed-only coverage and exits 0") {
  auto r = run_cli("run " + bench_path("ondlc.ir") + " --budget 0");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("condition/decision") != std::string::npos);
}

TEST_CASE("missing model file exits nonzero with a diagnostic") {
  auto r = run_cli("run /nonexistent/nope.ir --budget 0");
  CHECK(r.exit_code != 0);
  CHECK(r.output.find("cannot read") != std::string::npos);
}

TEST_CASE("invalid model exits nonzero with positions") {
  fs::path p = fs::temp_directory_path() / "sigfuzz_bad.ir";
  std::ofstream(p) << "model bad samples=2\nport x in signal int32\nlink x.0 -> nowhere.0\n";
  auto r = run_cli("run " + p.string() + " --budget 0");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("unknown node") != std::string::npos);
  fs::remove(p);
}

TEST_CASE("fuzz is an alias of run") {
  auto r = run_cli("fuzz " + bench_path("ondlc.ir") + " --exec-budget 2000 --seed 3");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("executions: 2000") != std::string::npos);
}

TEST_CASE("coverage replays a campaign corpus to identical metrics") {
  fs::path dir = fs::temp_directory_path() / "sigfuzz_cli_cov";
  fs::remove_all(dir);
  auto r1 = run_cli("run " + bench_path("oshotc.ir") + " --exec-budget 30000 --seed 4 --report " +
                    dir.string());
  REQUIRE(r1.exit_code == 0);
  auto line_of = [](const std::string& text, const char* key) {
    auto pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    return text.substr(pos, text.find('\n', pos) - pos);
  };
  auto r2 = run_cli("coverage " + (dir / "corpus").string() + " " + bench_path("oshotc.ir"));
  CHECK(r2.exit_code == 0);
  CHECK(line_of(r1.output, "condition/decision") == line_of(r2.output, "condition/decision"));
  CHECK(line_of(r1.output, "mcdc") == line_of(r2.output, "mcdc"));
  fs::remove_all(dir);
}

TEST_CASE("coverage of an empty corpus is zero everywhere") {
  fs::path dir = fs::temp_directory_path() / "sigfuzz_cli_empty";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto r = run_cli("coverage " + dir.string() + " " + bench_path("ondlc.ir"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("0.00%") != std::string::npos);
  CHECK(r.output.find("cases replayed: 0") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("coverage rejects a corpus with the wrong layout") {
  fs::path dir = fs::temp_directory_path() / "sigfuzz_cli_mismatch";
  fs::remove_all(dir);
  fs::create_directories(dir / "random");
  std::ofstream(dir / "random" / "x.bin", std::ios::binary) << "abc";
  auto r = run_cli("coverage " + dir.string() + " " + bench_path("ondlc.ir"));
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("does not match") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("seeds command writes a bmc corpus for a solvable bound") {
  fs::path dir = fs::temp_directory_path() / "sigfuzz_cli_seeds";
  fs::remove_all(dir);
  auto r = run_cli("seeds " + bench_path("ondlc.ir") + " --unroll 6 --report " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("solved 4") != std::string::npos);
  CHECK(fs::exists(dir / "seedgen.json"));
  bool has_bmc = fs::exists(dir / "corpus" / "bmc");
  CHECK(has_bmc);
  // the solver seed covers the firing branch on replay
  auto r2 = run_cli("coverage " + (dir / "corpus").string() + " " + bench_path("ondlc.ir"));
  CHECK(r2.output.find("condition/decision:     100.00%") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("nwise prints the suite for the constant ports") {
  auto r = run_cli("nwise " + bench_path("guidance.ir") + " --n 2");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("arm,hold") != std::string::npos);
  CHECK(r.output.find("4 cases") != std::string::npos);
}

TEST_CASE("identical flags give byte-identical reports") {
  fs::path d1 = fs::temp_directory_path() / "sigfuzz_cli_r1";
  fs::path d2 = fs::temp_directory_path() / "sigfuzz_cli_r2";
  fs::remove_all(d1);
  fs::remove_all(d2);
  std::string flags = " --exec-budget 15000 --seed 21 --workers 1 --report ";
  REQUIRE(run_cli("run " + bench_path("guidance.ir") + flags + d1.string()).exit_code == 0);
  REQUIRE(run_cli("run " + bench_path("guidance.ir") + flags + d2.string()).exit_code == 0);
  for (const char* f : {"report.json", "summary.txt", "series.csv"}) {
    CAPTURE(f);
    CHECK(read_file((d1 / f).string()) == read_file((d2 / f).string()));
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("ablate emits paired trial data") {
  fs::path dir = fs::temp_directory_path() / "sigfuzz_cli_ablate";
  fs::remove_all(dir);
  auto r = run_cli("ablate " + bench_path("ondlc.ir") +
                   " --trials 2 --exec-budget 30000 --seed 6 --report " + dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("trial") != std::string::npos);
  CHECK(fs::exists(dir / "ablate.json"));
  CHECK(fs::exists(dir / "trial0_full.csv"));
  CHECK(fs::exists(dir / "trial1_raw.csv"));
  fs::remove_all(dir);
}
