#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "medgrad/field.hpp"

namespace fs = std::filesystem;

namespace {
const fs::path kScratch = fs::temp_directory_path() / "medgrad_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(MEDGRAD_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string out(const std::string& name) { return (kScratch / name).string(); }
}  // namespace

TEST_CASE("analytic ualpha writes a field and a manifest") {
  fs::remove_all(kScratch);
  CHECK(run("analytic ualpha --alpha 0.7071 --grid 64 --out " + out("ua")) == 0);
  CHECK(fs::exists(kScratch / "ua" / "ualpha.sfld"));
  const std::string manifest = slurp(kScratch / "ua" / "manifest.txt");
  CHECK(manifest.find("command: analytic") != std::string::npos);
  CHECK(manifest.find("exit_code: 0") != std::string::npos);
  const medgrad::GridField f = medgrad::load_sfld(out("ua/ualpha.sfld"));
  CHECK(f.nx() == 64);
}

TEST_CASE("exit codes") {
  CHECK(run("frobnicate") == 64);
  CHECK(run("analytic ualpha --no-such-flag 1") == 64);
  CHECK(run("analytic ualpha --alpha 1.5 --grid 16 --out " + out("bad")) == 1);
  CHECK(run("construct --g abs-sin --lambda 3 --grid 32 --out " + out("bad2")) == 1);
  CHECK(run("solve-local --g abs-sin --grid 32 --max-iter 2 --out " + out("slow")) == 2);
  CHECK(fs::exists(kScratch / "slow" / "manifest.txt"));
}

TEST_CASE("outputs do not depend on the thread count") {
  const std::string base = "solve-local --domain disk --g abs-sin --grid 40 --radius-frac 0.5 "
                           "--seed-init constant-mean --out ";
  REQUIRE(run(base + out("t1") + " --threads 1") == 0);
  REQUIRE(run(base + out("t3") + " --threads 3") == 0);
  CHECK(slurp(kScratch / "t1" / "solution.sfld") == slurp(kScratch / "t3" / "solution.sfld"));
  CHECK(fs::exists(kScratch / "t1" / "iterations.csv"));
  CHECK(fs::exists(kScratch / "t1" / "residual.csv"));

  setenv("MEDGRAD_THREADS", "2", 1);
  REQUIRE(run(base + out("env")) == 0);
  unsetenv("MEDGRAD_THREADS");
  CHECK(slurp(kScratch / "t1" / "solution.sfld") == slurp(kScratch / "env" / "solution.sfld"));
  CHECK(slurp(kScratch / "env" / "manifest.txt").find("threads: 2") != std::string::npos);
}

TEST_CASE("field commands chain through SFLD1 files") {
  REQUIRE(run("construct --g abs-sin --lambda 0.5 --grid 64 --out " + out("co")) == 0);
  const std::string field = out("co/construct.sfld");
  CHECK(run("verify-local --field " + field + " --out " + out("vl")) == 0);
  CHECK(run("verify-global --field " + field + " --center 0,0 --max-radius 0.9 --out " + out("vg")) == 0);
  CHECK(run("tv --field " + field + " --coarea-levels 50 --out " + out("tv")) == 0);
  CHECK(run("visc-scan --field " + field + " --trials 20 --seed 3 --out " + out("vs")) == 0);
  CHECK(fs::exists(kScratch / "vs" / "visc.csv"));
  CHECK(run("expand-check --phi x2+2y2 --point 1,0 --radii 0.1,0.05 --out " + out("ex")) == 0);
  CHECK(run("least-gradient --g sin --grid 32 --out " + out("lg")) == 0);
  CHECK(fs::exists(kScratch / "lg" / "ustar.sfld"));
}
