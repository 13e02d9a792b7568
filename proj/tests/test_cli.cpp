#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gemmforge/cli.hpp"
#include "gemmforge/report.hpp"
#include "gemmforge/stratix.hpp"

using namespace gemmforge;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("stratix latency command") {
  const auto r = run_cli({"stratix", "latency", "--la", "18", "--ek", "16", "--en", "4",
                          "--em", "3", "--dims", "639x2720x1008", "--freq", "349e6"});
  CHECK(r.code == 0);
  CHECK(r.out.find("t_total=17984") != std::string::npos);
  CHECK(r.out.find("68.00") != std::string::npos);
}

TEST_CASE("invalid array length is a usage error") {
  const auto r = run_cli({"stratix", "latency", "--la", "7", "--ek", "1", "--en", "1",
                          "--em", "1", "--dims", "3x60x21", "--freq", "3e8"});
  CHECK(r.code == 2);
  CHECK(r.err.find("array length must divide 36") != std::string::npos);
}

TEST_CASE("missing required flags are usage errors") {
  CHECK(run_cli({"stratix", "latency", "--la", "18"}).code == 2);
  CHECK(run_cli({"bogus"}).code == 2);
  CHECK(run_cli({}).code == 2);
}

TEST_CASE("versal solve table includes the published 2x2x8 row") {
  const auto r = run_cli({"versal", "solve", "--aie", "P1", "--device", "VC1902", "--top",
                          "5", "--format", "csv"});
  CHECK(r.code == 0);
  bool found = false;
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find("2x2x8 (P1)") == std::string::npos) continue;
    CHECK(line.find("{B,U,U}") != std::string::npos);
    CHECK(line.find("416 (43%)") != std::string::npos);
    CHECK(line.find("408 (88%)") != std::string::npos);
    found = true;
  }
  CHECK(found);
}

TEST_CASE("versal report reproduces table metrics byte-for-byte") {
  const auto r = run_cli({"versal", "report", "--aie", "P1", "--uvw", "2x2x8", "--mapping",
                          "BUU", "--pl-freq", "290e6", "--power", "82.0", "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out.find("76.93") != std::string::npos);
  CHECK(r.out.find("0.938") != std::string::npos);
  CHECK(r.out.find("88.9%") != std::string::npos);
  CHECK(r.out.find("101.4") != std::string::npos);
  CHECK(r.out.find("390 (98%)") != std::string::npos);

  // The CLI prints exactly what the report helpers produce from the module
  // values; no second rounding path.
  CHECK(r.out.find(report::tops(76.93)) != std::string::npos);
}

TEST_CASE("stratix dse over the bundled grid") {
  const auto r = run_cli({"stratix", "dse", "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(lines, line))
    if (!line.empty()) rows.push_back(line);
  REQUIRE(rows.size() == 11);  // header + 10 designs
  CHECK(rows[1].find("18x16x4x3") != std::string::npos);
  CHECK(rows[1].find("68.00") != std::string::npos);
  CHECK(rows[1].find("1.331") != std::string::npos);
  CHECK(rows[3].find("9x16x5x5") != std::string::npos);
  CHECK(rows[3].find("66.94") != std::string::npos);
  CHECK(rows[3].find("1.275") != std::string::npos);
  CHECK(rows[3].find("5840 (85%)") != std::string::npos);
  CHECK(rows[3].find("3600 (91%)") != std::string::npos);

  // Identical invocations produce identical bytes.
  const auto again = run_cli({"stratix", "dse", "--format", "csv"});
  CHECK(again.out == r.out);
}

TEST_CASE("sim run verifies against the reference") {
  const auto r = run_cli({"sim", "run", "--la", "4", "--ek", "2", "--en", "2", "--em", "3",
                          "--dims", "9x120x24", "--seed", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("result matches reference: yes") != std::string::npos);
  CHECK(r.out.find("cycles=") != std::string::npos);
}

TEST_CASE("netlist emit writes checked files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gemmforge_netlist_test";
  fs::remove_all(dir);
  const auto r = run_cli({"netlist", "emit", "--la", "2", "--ek", "1", "--en", "1", "--em",
                          "1", "--dims", "3x10x6", "--out-dir", dir.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "tb_2x1x1x1.netlist.json"));
  CHECK(fs::exists(dir / "tb_2x1x1x1.v"));
  fs::remove_all(dir);
}

TEST_CASE("catalog validate and environment override") {
  CHECK(run_cli({"catalog", "validate"}).code == 0);

  const auto missing = run_cli({"catalog", "validate", "--catalog", "/nonexistent.json"});
  CHECK(missing.code == 1);

  // GEMMFORGE_CATALOG overrides the default catalog path.
  namespace fs = std::filesystem;
  const fs::path bad = fs::temp_directory_path() / "gemmforge_bad_catalog.json";
  {
    std::ofstream f(bad);
    f << "{ \"versal_devices\": [] ";  // truncated JSON
  }
  setenv("GEMMFORGE_CATALOG", bad.string().c_str(), 1);
  const auto env_run = run_cli({"catalog", "validate"});
  unsetenv("GEMMFORGE_CATALOG");
  fs::remove(bad);
  CHECK(env_run.code == 1);
}

TEST_CASE("infeasible solves exit with code 1") {
  const auto r = run_cli({"stratix", "solve", "--la", "36", "--ek", "16", "--en", "4",
                          "--em", "3"});
  CHECK(r.code == 1);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("stratix latency relaxed flag") {
  const auto strict = run_cli({"stratix", "latency", "--la", "18", "--ek", "16", "--en", "3",
                               "--em", "4", "--dims", "850x2720x750", "--freq", "327e6"});
  CHECK(strict.code == 1);

  const auto relaxed =
      run_cli({"stratix", "latency", "--la", "18", "--ek", "16", "--en", "3", "--em", "4",
               "--dims", "850x2720x750", "--freq", "327e6", "--relaxed"});
  CHECK(relaxed.code == 0);
  CHECK(relaxed.out.find("63.71") != std::string::npos);
}
