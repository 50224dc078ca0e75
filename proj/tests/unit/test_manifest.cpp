#include <doctest.h>

#include <fstream>

#include "dscale/config.hpp"
#include "dscale/error.hpp"
#include "dscale/manifest.hpp"
#include "scratch_dirs.hpp"

using namespace dscale;
namespace fs = std::filesystem;

namespace {

RunManifest run_small(const fs::path& out, bool dry = false) {
  RunOptions opt;
  opt.out_dir = out;
  opt.dry_run = dry;
  return run_scenario(parse_config(kSmallFreeSpread), kSmallFreeSpread, opt);
}

}  // namespace

TEST_SUITE("manifest") {
  TEST_CASE("sha256 test vectors") {
    CHECK(sha256_hex(std::string_view("abc")) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex(std::string_view("")) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST_CASE("a run lists every file with its checksum") {
    ScratchDir dir("manifest_run");
    const fs::path out = dir.path() / "run";
    const RunManifest m = run_small(out);
    CHECK(m.status == RunStatus::passed);
    CHECK(m.kind == "free-spread");
    CHECK(m.config_hash == sha256_hex(parse_config(kSmallFreeSpread).canonical()));
    CHECK_FALSE(m.checks.empty());
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(out)) {
      if (entry.path().filename() == kManifestName) continue;
      ++files;
      const auto name = entry.path().filename().string();
      const auto it = std::find_if(m.files.begin(), m.files.end(),
                                   [&](const ManifestFile& f) { return f.path == name; });
      REQUIRE(it != m.files.end());
      CHECK(it->sha256 == sha256_file(entry.path()));
      CHECK(it->bytes == fs::file_size(entry.path()));
    }
    CHECK(files == m.files.size());
    CHECK(check_manifest(out / kManifestName).ok());
  }

  TEST_CASE("json round trip") {
    ScratchDir dir("manifest_json");
    const RunManifest m = run_small(dir.path() / "run");
    const RunManifest back = manifest_from_json(manifest_to_json(m));
    CHECK(back.config_hash == m.config_hash);
    CHECK(back.files.size() == m.files.size());
    CHECK(back.checks.size() == m.checks.size());
    CHECK(back.status == m.status);
    CHECK(back.seed == m.seed);
    CHECK(manifest_to_json(back) == manifest_to_json(m));
    CHECK_THROWS_AS(manifest_from_json("{not json"), FormatError);
  }

  TEST_CASE("dry run writes only the manifest and config") {
    ScratchDir dir("manifest_dry");
    const fs::path out = dir.path() / "run";
    const RunManifest m = run_small(out, true);
    CHECK(m.status == RunStatus::dry_run);
    CHECK(m.dry_run);
    CHECK(m.checks.empty());
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(out)) {
      (void)entry;
      ++count;
    }
    CHECK(count == 2);
  }

  TEST_CASE("tampering is detected") {
    ScratchDir dir("manifest_tamper");
    const fs::path out = dir.path() / "run";
    const RunManifest m = run_small(out);
    {
      std::ofstream f(out / "diagnostics.csv", std::ios::app);
      f << "extra\n";
    }
    CHECK_FALSE(check_manifest(out / kManifestName).ok());
    run_small(out);
    CHECK(check_manifest(out / kManifestName).ok());
    std::ofstream(out / "stray.txt") << "x";
    CHECK_FALSE(check_manifest(out / kManifestName).ok());
  }

  TEST_CASE("reruns are byte identical") {
    ScratchDir dir("manifest_det");
    const RunManifest a = run_small(dir.path() / "a");
    const RunManifest b = run_small(dir.path() / "b");
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
      CHECK(a.files[i].path == b.files[i].path);
      CHECK(a.files[i].sha256 == b.files[i].sha256);
    }
  }

  TEST_CASE("refuses to overwrite a foreign directory") {
    ScratchDir dir("manifest_foreign");
    std::ofstream(dir.path() / "precious.txt") << "keep";
    CHECK_THROWS(run_small(dir.path()));
    CHECK(fs::exists(dir.path() / "precious.txt"));
  }

  TEST_CASE("plot data export") {
    ScratchDir dir("manifest_plot");
    const fs::path out = dir.path() / "run";
    run_small(out);
    const auto written = export_plotdata(out / kManifestName);
    CHECK_FALSE(written.empty());
    for (const auto& p : written) {
      CHECK(fs::exists(p));
      CHECK(p.parent_path() == dir.path() / "run.plotdata");
    }
  }

  TEST_CASE("failed checks and errors are recorded") {
    ScratchDir dir("manifest_fail");
    std::string tight = kSmallFreeSpread;
    tight += "[tolerances]\nks = 1e-9\n";
    RunOptions opt;
    opt.out_dir = dir.path() / "tight";
    const RunManifest failed = run_scenario(parse_config(tight), tight, opt);
    CHECK(failed.status == RunStatus::failed);
    CHECK_FALSE(check_manifest(opt.out_dir / kManifestName).ok());

    std::string clipped = kSmallFreeSpread;
    clipped.replace(clipped.find("center = -2"), 11, "center = -15");
    opt.out_dir = dir.path() / "clipped";
    const RunManifest broken = run_scenario(parse_config(clipped), clipped, opt);
    CHECK(broken.status == RunStatus::runtime_error);
    CHECK_FALSE(broken.error.empty());
  }

  TEST_CASE("output root from the environment") {
    ::setenv(std::string(kOutputRootVariable).c_str(), "/tmp/somewhere", 1);
    CHECK(default_output_root() == fs::path("/tmp/somewhere"));
    ::unsetenv(std::string(kOutputRootVariable).c_str());
    CHECK(default_output_root() == fs::path("dscale-runs"));
  }
}
