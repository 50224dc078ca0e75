#include "dscale/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <memory>
#include <set>
#include <sstream>

#include "dscale/csv.hpp"
#include "dscale/dswf.hpp"
#include "dscale/error.hpp"
#include "json.hpp"

#ifndef DSCALE_VERSION
#define DSCALE_VERSION "unknown"
#endif

namespace dscale {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kConfigCopy = "config.ini";

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

std::string hex(std::span<const unsigned char> digest) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out += digits[b >> 4];
    out += digits[b & 15];
  }
  return out;
}

struct DigestContext {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), &EVP_MD_CTX_free};

  DigestContext() {
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("SHA-256 initialization failed");
    }
  }
  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx.get(), data, n) != 1) throw Error("SHA-256 update failed");
  }
  std::string finish() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) throw Error("SHA-256 failed");
    return hex(std::span(digest.data(), len));
  }
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::byte> read_bytes(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<std::byte> out(text.size());
  std::transform(text.begin(), text.end(), out.begin(), [](char c) { return std::byte(c); });
  return out;
}

// Regular files below `dir`, as sorted generic relative paths.
std::vector<std::string> list_files(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) out.push_back(fs::relative(entry.path(), dir).generic_string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_manifest_artifact(const std::string& name) {
  return name == kManifestName || name.starts_with(std::string(kManifestName) + ".tmp");
}

// Empties the artifacts of an earlier run; refuses to touch directories
// holding files that no manifest accounts for.
void prepare_output(const fs::path& dir) {
  if (!fs::exists(dir)) {
    fs::create_directories(dir);
    return;
  }
  if (!fs::is_directory(dir)) throw ConfigurationError(dir.string() + " is not a directory");
  const auto present = list_files(dir);
  if (present.empty()) return;
  const fs::path manifest = dir / kManifestName;
  if (!fs::exists(manifest)) {
    throw ConfigurationError("output directory " + dir.string() +
                             " is not empty and holds no earlier manifest");
  }
  const RunManifest previous = read_manifest(manifest);
  std::set<std::string> owned;
  for (const auto& f : previous.files) owned.insert(f.path);
  for (const auto& name : present) {
    if (!owned.count(name) && !is_manifest_artifact(name)) {
      throw ConfigurationError("output directory " + dir.string() + " holds unlisted file " + name);
    }
  }
  for (const auto& name : present) fs::remove(dir / name);
}

std::vector<ManifestFile> inventory(const fs::path& dir) {
  std::vector<ManifestFile> files;
  for (const auto& name : list_files(dir)) {
    if (is_manifest_artifact(name)) continue;
    files.push_back({name, sha256_file(dir / name), fs::file_size(dir / name)});
  }
  return files;
}

void write_columns_header(std::ofstream& out, const Grid& grid, std::string_view values) {
  out << "# " << (grid.dim() == 1 ? "x" : "x y") << ' ' << values << '\n';
}

void flatten_field(const fs::path& path, const Grid& grid, std::string_view header,
                   const std::function<void(std::ofstream&, std::size_t)>& row) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_columns_header(out, grid, header);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.point(i);
    if (grid.dim() == 2 && i > 0 && grid.unravel(i)[1] == 0) out << '\n';
    out << format_double(p[0]);
    if (grid.dim() == 2) out << ' ' << format_double(p[1]);
    row(out, i);
    out << '\n';
  }
}

void flatten_csv(const fs::path& from, const fs::path& to) {
  std::ifstream in(from);
  std::ofstream out(to);
  if (!in || !out) throw Error("cannot convert " + from.string());
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    out << (first ? "# " : "") << line << '\n';
    first = false;
  }
}

}  // namespace

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::passed: return "passed";
    case RunStatus::failed: return "failed";
    case RunStatus::configuration_error: return "configuration-error";
    case RunStatus::runtime_error: return "runtime-error";
    case RunStatus::dry_run: return "dry-run";
  }
  return "unknown";
}

std::string code_version() { return DSCALE_VERSION; }

std::string sha256_hex(std::span<const std::byte> bytes) {
  DigestContext d;
  d.update(bytes.data(), bytes.size());
  return d.finish();
}

std::string sha256_hex(std::string_view text) {
  DigestContext d;
  d.update(text.data(), text.size());
  return d.finish();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  DigestContext d;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return d.finish();
}

fs::path default_output_root() {
  const char* root = std::getenv(std::string(kOutputRootVariable).c_str());
  return root && *root ? fs::path(root) : fs::path("dscale-runs");
}

RunManifest run_scenario(const ScenarioConfig& config, std::string_view config_text,
                         const RunOptions& options) {
  ScenarioConfig effective = config;
  if (options.seed) effective.set_number("ensemble.seed", static_cast<double>(*options.seed));

  RunManifest m;
  m.schema_version = effective.schema_version();
  m.kind = to_string(effective.kind());
  m.config_hash = sha256_hex(effective.canonical());
  m.code_version = code_version();
  m.started = utc_now();
  if (effective.has("ensemble.seed")) {
    m.seed = static_cast<std::uint64_t>(effective.integer("ensemble.seed"));
  }
  m.threads = std::max(1u, options.threads);
  m.dry_run = options.dry_run;

  prepare_output(options.out_dir);
  {
    std::ofstream copy(options.out_dir / kConfigCopy, std::ios::binary);
    copy << config_text;
  }
  if (options.dry_run) {
    m.status = RunStatus::dry_run;
  } else {
    try {
      auto outcome = execute_scenario(effective, options.out_dir, m.threads);
      m.checks = std::move(outcome.checks);
      m.advisories = std::move(outcome.advisories);
      m.status = std::all_of(m.checks.begin(), m.checks.end(),
                             [](const CheckResult& c) { return c.passed; })
                     ? RunStatus::passed
                     : RunStatus::failed;
    } catch (const ConfigurationError& e) {
      m.status = RunStatus::configuration_error;
      m.error = e.what();
    } catch (const DivergenceError& e) {
      m.status = RunStatus::runtime_error;
      m.error = std::string(e.what()) + " (step " + std::to_string(e.step()) + ")";
    } catch (const std::exception& e) {
      m.status = RunStatus::runtime_error;
      m.error = e.what();
    }
  }
  m.files = inventory(options.out_dir);
  m.finished = utc_now();
  write_manifest(options.out_dir, m);
  return m;
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["schema_version"] = m.schema_version;
  j["kind"] = m.kind;
  j["config_hash"] = m.config_hash;
  j["code_version"] = m.code_version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  j["threads"] = m.threads;
  j["dry_run"] = m.dry_run;
  j["files"] = json::array();
  for (const auto& f : m.files) {
    j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  j["checks"] = json::array();
  for (const auto& c : m.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"value", c.value},
                           {"tolerance", c.tolerance},
                           {"bound", c.bound},
                           {"passed", c.passed},
                           {"detail", c.detail}});
  }
  j["advisories"] = m.advisories;
  j["status"] = to_string(m.status);
  j["error"] = m.error;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    RunManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    m.kind = j.at("kind").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.code_version = j.at("code_version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    m.threads = j.at("threads").get<unsigned>();
    m.dry_run = j.at("dry_run").get<bool>();
    for (const auto& f : j.at("files")) {
      m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                         f.at("bytes").get<std::uintmax_t>()});
    }
    for (const auto& c : j.at("checks")) {
      m.checks.push_back({c.at("name").get<std::string>(), c.at("value").get<double>(),
                          c.at("tolerance").get<double>(), c.at("bound").get<std::string>(),
                          c.at("passed").get<bool>(), c.at("detail").get<std::string>()});
    }
    m.advisories = j.at("advisories").get<std::vector<std::string>>();
    const auto status = j.at("status").get<std::string>();
    bool known = false;
    for (auto s : {RunStatus::passed, RunStatus::failed, RunStatus::configuration_error,
                   RunStatus::runtime_error, RunStatus::dry_run}) {
      if (to_string(s) == status) {
        m.status = s;
        known = true;
      }
    }
    if (!known) throw FormatError("unknown status '" + status + "'");
    m.error = j.at("error").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
}

void write_manifest(const fs::path& dir, const RunManifest& manifest) {
  const fs::path target = dir / kManifestName;
  const fs::path tmp = dir / (std::string(kManifestName) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << manifest_to_json(manifest);
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, target);
}

RunManifest read_manifest(const fs::path& path) { return manifest_from_json(read_text(path)); }

ManifestVerification check_manifest(const fs::path& manifest_path) {
  const RunManifest m = read_manifest(manifest_path);
  const fs::path dir = manifest_path.parent_path().empty() ? fs::path(".") : manifest_path.parent_path();
  ManifestVerification v;
  std::set<std::string> listed;
  for (const auto& f : m.files) {
    listed.insert(f.path);
    const fs::path p = dir / f.path;
    if (!fs::exists(p)) {
      v.problems.push_back("missing file " + f.path);
      continue;
    }
    if (fs::file_size(p) != f.bytes) v.problems.push_back("size mismatch for " + f.path);
    if (sha256_file(p) != f.sha256) v.problems.push_back("checksum mismatch for " + f.path);
  }
  for (const auto& name : list_files(dir)) {
    if (!listed.count(name) && !is_manifest_artifact(name)) {
      v.problems.push_back("unlisted file " + name);
    }
  }
  for (const auto& c : m.checks) {
    if (evaluate(c) != c.passed) {
      v.problems.push_back("check " + c.name + " records an inconsistent verdict");
    } else if (!c.passed) {
      v.problems.push_back("check " + c.name + " failed: " + format_double(c.value) + " " +
                           (c.bound == ">=" ? "<" : ">") + " " + format_double(c.tolerance));
    }
  }
  if (m.status == RunStatus::configuration_error || m.status == RunStatus::runtime_error) {
    v.problems.push_back("run ended with " + to_string(m.status) + ": " + m.error);
  }
  return v;
}

std::vector<fs::path> export_plotdata(const fs::path& manifest_path) {
  const RunManifest m = read_manifest(manifest_path);
  fs::path dir = manifest_path.parent_path().empty() ? fs::path(".") : manifest_path.parent_path();
  dir = fs::weakly_canonical(dir);
  const fs::path target = dir.parent_path() / (dir.filename().string() + ".plotdata");
  fs::create_directories(target);
  std::vector<fs::path> written;
  for (const auto& f : m.files) {
    const fs::path src = dir / f.path;
    const fs::path dst = target / fs::path(f.path).replace_extension(".dat");
    fs::create_directories(dst.parent_path());
    const auto ext = fs::path(f.path).extension();
    if (ext == ".dswf") {
      const WaveField psi = decode_dswf(read_bytes(src));
      flatten_field(dst, psi.grid(), "re im abs2", [&](std::ofstream& out, std::size_t i) {
        out << ' ' << format_double(psi[i].real()) << ' ' << format_double(psi[i].imag()) << ' '
            << format_double(std::norm(psi[i]));
      });
    } else if (ext == ".dsrf") {
      const RealField field = decode_real_field(read_bytes(src));
      flatten_field(dst, field.grid, "value", [&](std::ofstream& out, std::size_t i) {
        out << ' ' << format_double(field.values[i]);
      });
    } else if (ext == ".csv") {
      flatten_csv(src, dst);
    } else {
      continue;
    }
    written.push_back(dst);
  }
  return written;
}

}  // namespace dscale
