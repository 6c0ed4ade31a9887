#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

CmdResult run(const std::string& args) {
  const std::string cmd = std::string(SUSTEER_CLI_PATH) + " " + args + " 2>/dev/null";
  CmdResult r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  return std::string(std::istreambuf_iterator<char>(is), {});
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::current_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("compute-delta prints the critical set") {
  const CmdResult r = run("compute-delta --n 4");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("delta") == 0);
  CHECK(j.at("values") == nlohmann::json::array({-4, 0, 4}));

  const CmdResult r2 = run("compute-delta --n 2");
  CHECK(r2.exit_code == 0);
  const auto j2 = nlohmann::json::parse(r2.out);
  CHECK(j2.at("delta") == -2);
  CHECK(j2.at("values") == nlohmann::json::array({-2, 2}));
}

TEST_CASE("compute-delta rejects n below 2") {
  const CmdResult r = run("compute-delta --n 1");
  CHECK(r.exit_code == 1);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run("no-such-command").exit_code == 2);
  CHECK(run("").exit_code == 2);
}

TEST_CASE("check-regularity on the preset table") {
  const CmdResult r = run("check-regularity --preset cnot");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("rank") == 15);
  CHECK(j.at("is_regular") == true);
  CHECK(j.at("lie_closure_dim") == 15);
}

TEST_CASE("check-regularity fails on zero excitation") {
  TempDir dir("cli_reg_zero");
  const fs::path cfg_path = dir.path / "cfg.json";
  nlohmann::json cfg = {{"n", 4},
                        {"T", 1.0},
                        {"generators", "spin4"},
                        {"fourier",
                         {{"source", "table"},
                          {"coeffs", nlohmann::json::array({
                               nlohmann::json::array({0.0, 0.0}), nlohmann::json::array({0.0, 0.0}),
                               nlohmann::json::array({0.0, 0.0}), nlohmann::json::array({0.0, 0.0}),
                               nlohmann::json::array({0.0, 0.0}), nlohmann::json::array({0.0, 0.0})})}}}};
  std::ofstream(cfg_path) << cfg.dump();
  const CmdResult r = run("check-regularity --config " + cfg_path.string());
  CHECK(r.exit_code == 1);
}

TEST_CASE("check-regularity with a seeded random table reports the seed") {
  const CmdResult r = run("check-regularity --preset cnot --seed 424242");
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("seed_used") == 424242);
}

TEST_CASE("plan writes deterministic artifacts") {
  TempDir a("cli_plan_a"), b("cli_plan_b");
  const std::string base =
      "plan --preset cnot --horizon 2 --step 0.002 --ref-step 0.0005 --out ";
  const CmdResult ra = run(base + a.path.string());
  // horizon 2 is far too short to converge; the command reports that honestly
  CHECK(ra.exit_code == 1);
  for (const char* f : {"plan.json", "run.csv", "states.csv", "meta.json", "error.svg", "controls.svg"}) {
    CHECK(fs::exists(a.path / f));
  }
  const CmdResult rb = run(base + b.path.string());
  CHECK(ra.exit_code == rb.exit_code);
  CHECK(slurp(a.path / "run.csv") == slurp(b.path / "run.csv"));
  CHECK(slurp(a.path / "states.csv") == slurp(b.path / "states.csv"));
  CHECK(slurp(a.path / "meta.json") == slurp(b.path / "meta.json"));

  const auto meta = nlohmann::json::parse(slurp(a.path / "meta.json"));
  CHECK(meta.at("branch") == "direct");
  CHECK(meta.at("config").at("horizon") == 2.0);

  // plotting an existing run succeeds, empty dir fails
  CHECK(run("plot " + a.path.string()).exit_code == 0);
  TempDir empty("cli_plot_empty");
  CHECK(run("plot " + empty.path.string()).exit_code == 1);
}

TEST_CASE("simulate requires a goal above the critical level") {
  TempDir dir("cli_sim_low");
  // -I sits at fidelity -4 <= delta: the direct branch must refuse
  const CmdResult r =
      run("simulate --preset cnot --goal minus_identity --horizon 1 --out " + dir.path.string());
  CHECK(r.exit_code == 1);
}

TEST_CASE("spin model subcommands") {
  const CmdResult r = run("spin-model verify-conjugation");
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("pass") == true);

  const CmdResult c = run("spin-model compare-rwa --amplitude-scale 0.25 --horizon 0.5");
  CHECK(c.exit_code == 0);
  const auto jc = nlohmann::json::parse(c.out);
  CHECK(jc.at("max_gap").get<double>() > 0.0);
}
