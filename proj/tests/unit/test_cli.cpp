#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "scratch_dirs.hpp"

namespace fs = std::filesystem;

#ifdef DSCALE_TOOL_PATH

namespace {

int run_tool(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + DSCALE_TOOL_PATH + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream(dir / name) << text;
  return dir / name;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("passing run, check and export") {
    ScratchDir dir("cli_pass");
    const auto cfg = write(dir.path(), "small.ini", kSmallFreeSpread);
    const auto out = dir.path() / "out";
    CHECK(run_tool("run " + cfg.string() + " --out " + out.string() + " --threads 2") == 0);
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(run_tool("check " + (out / "manifest.json").string()) == 0);
    CHECK(run_tool("export-plotdata " + (out / "manifest.json").string()) == 0);
    CHECK(fs::exists(dir.path() / "out.plotdata"));
    std::ofstream(out / "diagnostics.csv", std::ios::app) << "tampered\n";
    CHECK(run_tool("check " + (out / "manifest.json").string()) == 1);
  }

  TEST_CASE("output root from the environment") {
    ScratchDir dir("cli_env");
    const auto cfg = write(dir.path(), "small.ini", kSmallFreeSpread);
    const auto root = dir.path() / "root";
    CHECK(run_tool("run " + cfg.string() + " --dry-run", "DSCALE_OUTPUT_ROOT=" + root.string()) == 0);
    CHECK(fs::exists(root / "small" / "manifest.json"));
  }

  TEST_CASE("seed override is recorded") {
    ScratchDir dir("cli_seed");
    const auto cfg = write(dir.path(), "small.ini", kSmallFreeSpread);
    const auto out = dir.path() / "out";
    CHECK(run_tool("run " + cfg.string() + " --out " + out.string() + " --seed 11 --dry-run") == 0);
    std::ifstream in(out / "manifest.json");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("\"seed\": 11") != std::string::npos);
  }

  TEST_CASE("check failure exits with 1") {
    ScratchDir dir("cli_fail");
    const auto cfg = write(dir.path(), "tight.ini", std::string(kSmallFreeSpread) + "[tolerances]\nks = 1e-9\n");
    CHECK(run_tool("run " + cfg.string() + " --out " + (dir.path() / "out").string()) == 1);
  }

  TEST_CASE("configuration errors exit with 2") {
    ScratchDir dir("cli_config");
    const auto bad = write(dir.path(), "bad.ini", "[scenario]\nkind = free-spread\nbogus = 1\n");
    CHECK(run_tool("run " + bad.string() + " --out " + (dir.path() / "out").string()) == 2);
    CHECK(run_tool("run " + (dir.path() / "missing.ini").string()) == 2);
    CHECK(run_tool("frobnicate") == 2);
    CHECK(run_tool("run") == 2);
    const auto cfg = write(dir.path(), "small.ini", kSmallFreeSpread);
    CHECK(run_tool("run " + cfg.string() + " --threads 0") == 2);
    const auto junk = write(dir.path(), "manifest.json", "{ nope");
    CHECK(run_tool("check " + junk.string()) == 2);
  }

  TEST_CASE("runtime errors exit with 3") {
    ScratchDir dir("cli_runtime");
    std::string clipped = kSmallFreeSpread;
    clipped.replace(clipped.find("center = -2"), 11, "center = -15");
    const auto cfg = write(dir.path(), "clipped.ini", clipped);
    CHECK(run_tool("run " + cfg.string() + " --out " + (dir.path() / "out").string()) == 3);
  }
}

#endif
