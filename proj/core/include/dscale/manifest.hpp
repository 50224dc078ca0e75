#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dscale/config.hpp"
#include "dscale/scenario.hpp"

namespace dscale {

inline constexpr std::string_view kManifestName = "manifest.json";
inline constexpr std::string_view kOutputRootVariable = "DSCALE_OUTPUT_ROOT";

struct ManifestFile {
  std::string path;  // relative to the run directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

enum class RunStatus { passed, failed, configuration_error, runtime_error, dry_run };

std::string to_string(RunStatus status);

struct RunManifest {
  int schema_version = kSchemaVersion;
  std::string kind;
  std::string config_hash;
  std::string code_version;
  std::string started;
  std::string finished;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  bool dry_run = false;
  std::vector<ManifestFile> files;
  std::vector<CheckResult> checks;
  std::vector<std::string> advisories;
  RunStatus status = RunStatus::passed;
  std::string error;
};

struct RunOptions {
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  bool dry_run = false;
};

std::string code_version();
std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_hex(std::string_view text);
std::string sha256_file(const std::filesystem::path& path);

// $DSCALE_OUTPUT_ROOT, or ./dscale-runs when unset or empty.
std::filesystem::path default_output_root();

// Prepares the output directory (removing the artifacts of an earlier run
// recorded there), copies the config text, runs the scenario unless
// dry_run is set and writes manifest.json atomically. Module errors are
// recorded in the manifest rather than thrown.
RunManifest run_scenario(const ScenarioConfig& config, std::string_view config_text,
                         const RunOptions& options);

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(std::string_view text);

// Writes to a temporary name in the same directory, then renames.
void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest);
// Throws FormatError on unreadable or malformed manifests.
RunManifest read_manifest(const std::filesystem::path& path);

struct ManifestVerification {
  std::vector<std::string> problems;
  bool ok() const noexcept { return problems.empty(); }
};

// Re-hashes every listed file, looks for unlisted files and re-evaluates
// each recorded check against its tolerance.
ManifestVerification check_manifest(const std::filesystem::path& manifest_path);

// Flattens DSWF/DSRF snapshots and CSV tables into whitespace-separated
// columns under <run dir>.plotdata/. Returns the written files.
std::vector<std::filesystem::path> export_plotdata(const std::filesystem::path& manifest_path);

}  // namespace dscale
