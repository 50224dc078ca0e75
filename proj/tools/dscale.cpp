#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dscale/config.hpp"
#include "dscale/error.hpp"
#include "dscale/manifest.hpp"

namespace {

namespace fs = std::filesystem;

enum Exit : int { kPass = 0, kCheckFailure = 1, kConfigError = 2, kRuntimeError = 3 };

int run_command(const std::string& config_file, const std::string& out, std::int64_t seed,
                unsigned threads, bool dry_run) {
  std::ifstream in(config_file, std::ios::binary);
  if (!in) {
    std::cerr << "dscale: cannot read " << config_file << "\n";
    return kConfigError;
  }
  std::ostringstream text;
  text << in.rdbuf();

  dscale::ScenarioConfig config;
  try {
    config = dscale::parse_config(text.str());
  } catch (const dscale::ConfigErrors& e) {
    std::cerr << config_file << ": " << e.what() << "\n";
    return kConfigError;
  }

  dscale::RunOptions options;
  options.threads = threads;
  options.dry_run = dry_run;
  if (seed >= 0) options.seed = static_cast<std::uint64_t>(seed);
  if (!out.empty()) {
    options.out_dir = out;
  } else if (config.has("output.dir")) {
    const fs::path dir = config.text("output.dir");
    options.out_dir = dir.is_absolute() ? dir : dscale::default_output_root() / dir;
  } else {
    options.out_dir = dscale::default_output_root() / fs::path(config_file).stem();
  }

  dscale::RunManifest manifest;
  try {
    manifest = dscale::run_scenario(config, text.str(), options);
  } catch (const dscale::ConfigurationError& e) {
    std::cerr << "dscale: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "dscale: " << e.what() << "\n";
    return kRuntimeError;
  }

  for (const auto& c : manifest.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " " << c.value << " " << c.bound << " "
              << c.tolerance << "  " << c.detail << "\n";
  }
  for (const auto& a : manifest.advisories) std::cout << "note: " << a << "\n";
  std::cout << to_string(manifest.status) << ": " << (options.out_dir / dscale::kManifestName).string()
            << "\n";
  switch (manifest.status) {
    case dscale::RunStatus::passed:
    case dscale::RunStatus::dry_run: return kPass;
    case dscale::RunStatus::failed: return kCheckFailure;
    case dscale::RunStatus::configuration_error:
      std::cerr << "dscale: " << manifest.error << "\n";
      return kConfigError;
    case dscale::RunStatus::runtime_error:
      std::cerr << "dscale: " << manifest.error << "\n";
      return kRuntimeError;
  }
  return kRuntimeError;
}

int check_command(const std::string& manifest) {
  try {
    const auto v = dscale::check_manifest(manifest);
    for (const auto& p : v.problems) std::cout << "FAIL " << p << "\n";
    if (v.ok()) std::cout << "ok " << manifest << "\n";
    return v.ok() ? kPass : kCheckFailure;
  } catch (const dscale::FormatError& e) {
    std::cerr << "dscale: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "dscale: " << e.what() << "\n";
    return kRuntimeError;
  }
}

int export_command(const std::string& manifest) {
  try {
    for (const auto& p : dscale::export_plotdata(manifest)) std::cout << p.string() << "\n";
    return kPass;
  } catch (const dscale::FormatError& e) {
    std::cerr << "dscale: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "dscale: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-scale wave simulator and verification runner"};
  app.require_subcommand(1);

  std::string config_file;
  std::string out;
  std::int64_t seed = -1;
  unsigned threads = 1;
  bool dry_run = false;
  auto* run = app.add_subcommand("run", "Run a scenario and write its artifacts and manifest");
  run->add_option("config", config_file, "Scenario config file")->required();
  run->add_option("--out", out, "Output directory (default: $DSCALE_OUTPUT_ROOT/<name>)");
  run->add_option("--seed", seed, "Override ensemble.seed")->check(CLI::NonNegativeNumber);
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--dry-run", dry_run, "Validate and write the manifest without computing");

  std::string manifest;
  auto* check = app.add_subcommand("check", "Re-verify checksums and recorded checks");
  check->add_option("manifest", manifest, "manifest.json")->required();

  std::string export_manifest;
  auto* plot = app.add_subcommand("export-plotdata", "Flatten a run into gnuplot columns");
  plot->add_option("manifest", export_manifest, "manifest.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  if (*run) return run_command(config_file, out, seed, threads, dry_run);
  if (*check) return check_command(manifest);
  return export_command(export_manifest);
}
