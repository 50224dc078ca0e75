#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dscale/error.hpp"

namespace dscale {

inline constexpr int kSchemaVersion = 1;

enum class ScenarioKind {
  coherent_validate,
  free_spread,
  hbar_sweep,
  factorize_2body,
  manybody_hartree,
  manybody_delta_compare,
  double_slit,
};

std::string to_string(ScenarioKind kind);
std::optional<ScenarioKind> scenario_kind_from(std::string_view name);

// Every problem found in a document, one message per entry.
class ConfigErrors : public ConfigurationError {
 public:
  explicit ConfigErrors(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const noexcept { return messages_; }

 private:
  std::vector<std::string> messages_;
};

// A validated scenario description. Values are stored by "section.key";
// numeric entries are evaluated (arithmetic with pi, optional unit suffix
// checked against the key's dimension).
class ScenarioConfig {
 public:
  ScenarioKind kind() const noexcept { return kind_; }
  int schema_version() const noexcept { return schema_version_; }

  bool has(std::string_view key) const;
  double number(std::string_view key) const;
  double number(std::string_view key, double fallback) const;
  std::vector<double> numbers(std::string_view key) const;
  std::vector<double> numbers(std::string_view key, std::vector<double> fallback) const;
  long long integer(std::string_view key) const;
  long long integer(std::string_view key, long long fallback) const;
  std::string text(std::string_view key) const;
  std::string text(std::string_view key, std::string fallback) const;

  // Keys of the [tolerances] section.
  std::map<std::string, double> tolerances() const;

  // Sorted "section.key = value" lines with evaluated numbers; stable under
  // reformatting and comments.
  std::string canonical() const;

  void set_number(std::string_view key, double value);

 private:
  friend ScenarioConfig parse_config(std::string_view text);
  ScenarioKind kind_ = ScenarioKind::coherent_validate;
  int schema_version_ = kSchemaVersion;
  std::map<std::string, std::vector<double>, std::less<>> numbers_;
  std::map<std::string, std::string, std::less<>> texts_;
};

// Parses `key = value` lines grouped under `[section]` headers; `#` and `;`
// start comments. Throws ConfigErrors listing every problem: syntax,
// duplicate keys (with both line numbers), unknown keys, missing required
// keys, bad values and unit mismatches.
ScenarioConfig parse_config(std::string_view text);

// Arithmetic on numbers, pi, + - * / and parentheses.
double evaluate_expression(std::string_view text);

}  // namespace dscale
