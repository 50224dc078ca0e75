#include "dscale/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "dscale/csv.hpp"
#include "dscale/grid.hpp"

namespace dscale {
namespace {

// Exponents of length, time and mass.
struct Dimension {
  int length = 0;
  int time = 0;
  int mass = 0;
  friend bool operator==(const Dimension&, const Dimension&) = default;
};

constexpr Dimension kNone{};
constexpr Dimension kLength{1, 0, 0};
constexpr Dimension kTime{0, 1, 0};
constexpr Dimension kMass{0, 0, 1};
constexpr Dimension kFrequency{0, -1, 0};
constexpr Dimension kVelocity{1, -1, 0};
constexpr Dimension kAcceleration{1, -2, 0};
constexpr Dimension kEnergy{2, -2, 1};
constexpr Dimension kAction{2, -1, 1};
constexpr Dimension kStiffness{0, -2, 1};
constexpr Dimension kEnergyLength{3, -2, 1};

std::string describe(const Dimension& d) {
  if (d == kNone) return "dimensionless";
  std::string out;
  auto part = [&](const char* name, int e) {
    if (e == 0) return;
    if (!out.empty()) out += "*";
    out += name;
    if (e != 1) out += "^" + std::to_string(e);
  };
  part("kg", d.mass);
  part("m", d.length);
  part("s", d.time);
  return out;
}

enum class Type { number, number_list, integer, integer_list, text, choice };

using KindMask = unsigned;
constexpr KindMask bit(ScenarioKind k) { return 1u << static_cast<unsigned>(k); }
constexpr KindMask CV = bit(ScenarioKind::coherent_validate);
constexpr KindMask FS = bit(ScenarioKind::free_spread);
constexpr KindMask HS = bit(ScenarioKind::hbar_sweep);
constexpr KindMask F2 = bit(ScenarioKind::factorize_2body);
constexpr KindMask MH = bit(ScenarioKind::manybody_hartree);
constexpr KindMask MD = bit(ScenarioKind::manybody_delta_compare);
constexpr KindMask DS = bit(ScenarioKind::double_slit);
constexpr KindMask ALL = CV | FS | HS | F2 | MH | MD | DS;

struct KeySpec {
  std::string_view name;  // section.key
  Type type;
  Dimension dim;
  KindMask allowed;
  KindMask required;
  std::vector<std::string_view> choices = {};
};

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> table = {
      {"scenario.schema_version", Type::integer, kNone, ALL, ALL},
      {"scenario.kind", Type::text, kNone, ALL, ALL},
      {"scenario.name", Type::text, kNone, ALL, 0},
      {"grid.dim", Type::integer, kNone, ALL, ALL},
      {"grid.lower", Type::number_list, kLength, ALL, ALL},
      {"grid.upper", Type::number_list, kLength, ALL, ALL},
      {"grid.points", Type::integer_list, kNone, ALL, ALL},
      {"physics.hbar", Type::number, kAction, ALL & ~HS, ALL & ~HS},
      {"physics.mass", Type::number, kMass, CV | FS | HS | DS | MH | MD, CV | FS | HS | DS | MH | MD},
      {"physics.omega", Type::number, kFrequency, CV, CV},
      {"physics.potential", Type::choice, kNone, HS, 0, {"free", "linear"}},
      {"physics.gravity", Type::number_list, kAcceleration, HS | F2, 0},
      {"physics.mass1", Type::number, kMass, F2, F2},
      {"physics.mass2", Type::number, kMass, F2, F2},
      {"physics.coupling", Type::choice, kNone, MH | MD, 0, {"spring", "soft_coulomb"}},
      {"physics.stiffness", Type::number, kStiffness, F2 | MH | MD, F2},
      {"physics.rest_length", Type::number, kLength, F2 | MH | MD, 0},
      {"physics.charge_product", Type::number, kEnergyLength, MH | MD, 0},
      {"physics.softening", Type::number, kLength, MH | MD, 0},
      {"packet.center", Type::number_list, kLength, CV | FS | HS | DS | F2, CV | FS | HS | DS | F2},
      {"packet.velocity", Type::number_list, kVelocity, CV | FS | HS | DS | F2, 0},
      {"packet.width", Type::number_list, kLength, FS | HS | DS | F2, FS | HS | DS | F2},
      {"relative.center", Type::number, kLength, F2, F2},
      {"relative.velocity", Type::number, kVelocity, F2, 0},
      {"relative.width", Type::number, kLength, F2, 0},
      {"factors.points", Type::integer, kNone, F2, 0},
      {"factors.external_lower", Type::number, kLength, F2, 0},
      {"factors.external_upper", Type::number, kLength, F2, 0},
      {"factors.relative_lower", Type::number, kLength, F2, 0},
      {"factors.relative_upper", Type::number, kLength, F2, 0},
      {"time.dt", Type::number, kTime, ALL, ALL},
      {"time.steps", Type::integer, kNone, ALL & ~HS, 0},
      {"time.periods", Type::number, kNone, CV | F2 | MH | MD, 0},
      {"time.store_every", Type::integer, kNone, ALL, 0},
      {"time.diagnostics_every", Type::integer, kNone, ALL & ~(MH | MD), 0},
      {"time.scheme", Type::choice, kNone, ALL & ~(MH | MD), 0, {"strang", "yoshida4"}},
      {"ensemble.count", Type::integer, kNone, CV | FS | HS | DS, DS},
      {"ensemble.seed", Type::integer, kNone, CV | FS | HS | DS, 0},
      {"ensemble.substeps", Type::integer, kNone, CV | FS | HS | DS, 0},
      {"sweep.hbars", Type::number_list, kAction, HS, HS},
      {"sweep.target_time", Type::number, kTime, HS, HS},
      {"sweep.trajectory_offset", Type::number, kLength, HS, 0},
      {"barrier.axis", Type::integer, kNone, DS, 0},
      {"barrier.wall_position", Type::number, kLength, DS, DS},
      {"barrier.thickness", Type::number, kLength, DS, DS},
      {"barrier.slit_centers", Type::number_list, kLength, DS, DS},
      {"barrier.slit_widths", Type::number_list, kLength, DS, DS},
      {"barrier.height", Type::number, kEnergy, DS, DS},
      {"barrier.smoothing", Type::number, kLength, DS, 0},
      {"screen.position", Type::number, kLength, DS, DS},
      {"screen.peak_fraction", Type::number, kNone, DS, 0},
      {"manybody.centers", Type::number_list, kLength, MH | MD, MH | MD},
      {"manybody.velocities", Type::number_list, kVelocity, MH | MD, 0},
      {"manybody.width", Type::number, kLength, MH, MH},
      {"manybody.widths", Type::number_list, kLength, MD, MD},
      {"manybody.overlap_threshold", Type::number, kNone, MH | MD, 0},
      {"output.dir", Type::text, kNone, ALL, 0},
  };
  return table;
}

// Tolerance names accepted in [tolerances] for each kind.
std::vector<std::string_view> tolerance_names(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::coherent_validate: return {"l2", "norm", "energy", "width", "rigidity", "ks"};
    case ScenarioKind::free_spread: return {"width", "norm", "energy", "ks"};
    case ScenarioKind::hbar_sweep: return {"ks"};
    case ScenarioKind::factorize_2body: return {"factorization", "norm"};
    case ScenarioKind::manybody_hartree: return {"norm", "momentum"};
    case ScenarioKind::manybody_delta_compare: return {"delta"};
    case ScenarioKind::double_slit: return {"min_maxima", "norm"};
  }
  return {};
}

const KeySpec* find_spec(std::string_view name) {
  for (const auto& s : schema()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  // Parses the longest arithmetic prefix; `rest` receives what follows.
  double parse(std::string& rest) {
    const double v = sum();
    skip();
    rest = trim(text_.substr(pos_));
    return v;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  double sum() {
    double v = product();
    for (;;) {
      if (accept('+')) {
        v += product();
      } else if (accept('-')) {
        v -= product();
      } else {
        return v;
      }
    }
  }
  double product() {
    double v = unary();
    for (;;) {
      const std::size_t save = pos_;
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        // A '/' followed by a unit name belongs to the unit suffix.
        skip();
        if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])) &&
            text_.substr(pos_, 2) != "pi") {
          pos_ = save;
          return v;
        }
        v /= unary();
      } else {
        return v;
      }
    }
  }
  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return primary();
  }
  double primary() {
    skip();
    if (accept('(')) {
      const double v = sum();
      if (!accept(')')) throw std::invalid_argument("missing ')'");
      return v;
    }
    if (text_.substr(pos_, 2) == "pi" &&
        (pos_ + 2 >= text_.size() || !std::isalnum(static_cast<unsigned char>(text_[pos_ + 2])))) {
      pos_ += 2;
      return std::numbers::pi;
    }
    double v = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin) {
      throw std::invalid_argument("expected a number at '" + std::string(text_.substr(pos_)) + "'");
    }
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

Dimension parse_unit(std::string_view unit) {
  Dimension d;
  std::size_t pos = 0;
  int sign = 1;
  bool expect_name = true;
  while (pos < unit.size()) {
    const char c = unit[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
      continue;
    }
    if (!expect_name && (c == '*' || c == '/')) {
      sign = c == '*' ? 1 : -1;
      expect_name = true;
      ++pos;
      continue;
    }
    if (!expect_name) throw std::invalid_argument("malformed unit '" + std::string(unit) + "'");
    std::size_t end = pos;
    while (end < unit.size() && (std::isalnum(static_cast<unsigned char>(unit[end])))) ++end;
    const std::string_view name = unit.substr(pos, end - pos);
    pos = end;
    int power = 1;
    if (pos < unit.size() && unit[pos] == '^') {
      ++pos;
      std::size_t e = pos;
      if (e < unit.size() && unit[e] == '-') ++e;
      while (e < unit.size() && std::isdigit(static_cast<unsigned char>(unit[e]))) ++e;
      const auto [ptr, ec] = std::from_chars(unit.data() + pos, unit.data() + e, power);
      if (ec != std::errc() || ptr != unit.data() + e) {
        throw std::invalid_argument("bad exponent in unit '" + std::string(unit) + "'");
      }
      pos = e;
    }
    Dimension base;
    if (name == "m") {
      base = kLength;
    } else if (name == "s") {
      base = kTime;
    } else if (name == "kg") {
      base = kMass;
    } else if (name == "J") {
      base = kEnergy;
    } else if (name == "N") {
      base = {1, -2, 1};
    } else if (name == "Hz") {
      base = kFrequency;
    } else if (name == "1") {
      base = kNone;
    } else {
      throw std::invalid_argument("unknown unit '" + std::string(name) + "'");
    }
    const int e = sign * power;
    d.length += e * base.length;
    d.time += e * base.time;
    d.mass += e * base.mass;
    expect_name = false;
  }
  if (expect_name && !unit.empty()) throw std::invalid_argument("dangling operator in unit");
  return d;
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> items;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= value.size(); ++i) {
    if (i == value.size() || (value[i] == ',' && depth == 0)) {
      items.push_back(trim(value.substr(start, i - start)));
      start = i + 1;
    } else if (value[i] == '(') {
      ++depth;
    } else if (value[i] == ')') {
      --depth;
    }
  }
  return items;
}

struct RawEntry {
  std::string value;
  int line = 0;
};

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::coherent_validate: return "coherent-validate";
    case ScenarioKind::free_spread: return "free-spread";
    case ScenarioKind::hbar_sweep: return "hbar-sweep";
    case ScenarioKind::factorize_2body: return "factorize-2body";
    case ScenarioKind::manybody_hartree: return "manybody-hartree";
    case ScenarioKind::manybody_delta_compare: return "manybody-delta-compare";
    case ScenarioKind::double_slit: return "double-slit";
  }
  return "unknown";
}

std::optional<ScenarioKind> scenario_kind_from(std::string_view name) {
  for (int k = 0; k <= static_cast<int>(ScenarioKind::double_slit); ++k) {
    const auto kind = static_cast<ScenarioKind>(k);
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace {

std::string join_messages(const std::vector<std::string>& messages) {
  std::string out = "invalid configuration:";
  for (const auto& m : messages) out += "\n  " + m;
  return out;
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<std::string> messages)
    : ConfigurationError(join_messages(messages)), messages_(std::move(messages)) {}

double evaluate_expression(std::string_view text) {
  std::string rest;
  const double v = ExpressionParser(text).parse(rest);
  if (!rest.empty()) throw ConfigurationError("trailing text '" + rest + "' in expression");
  return v;
}

bool ScenarioConfig::has(std::string_view key) const {
  return numbers_.find(key) != numbers_.end() || texts_.find(key) != texts_.end();
}

double ScenarioConfig::number(std::string_view key) const {
  const auto it = numbers_.find(key);
  if (it == numbers_.end() || it->second.empty()) {
    throw ConfigurationError("missing numeric key '" + std::string(key) + "'");
  }
  return it->second.front();
}

double ScenarioConfig::number(std::string_view key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::vector<double> ScenarioConfig::numbers(std::string_view key) const {
  const auto it = numbers_.find(key);
  if (it == numbers_.end()) throw ConfigurationError("missing numeric key '" + std::string(key) + "'");
  return it->second;
}

std::vector<double> ScenarioConfig::numbers(std::string_view key,
                                            std::vector<double> fallback) const {
  return has(key) ? numbers(key) : fallback;
}

long long ScenarioConfig::integer(std::string_view key) const {
  return std::llround(number(key));
}

long long ScenarioConfig::integer(std::string_view key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::string ScenarioConfig::text(std::string_view key) const {
  const auto it = texts_.find(key);
  if (it == texts_.end()) throw ConfigurationError("missing key '" + std::string(key) + "'");
  return it->second;
}

std::string ScenarioConfig::text(std::string_view key, std::string fallback) const {
  const auto it = texts_.find(key);
  return it == texts_.end() ? fallback : it->second;
}

std::map<std::string, double> ScenarioConfig::tolerances() const {
  std::map<std::string, double> out;
  constexpr std::string_view prefix = "tolerances.";
  for (const auto& [key, values] : numbers_) {
    if (key.starts_with(prefix)) out[key.substr(prefix.size())] = values.front();
  }
  return out;
}

std::string ScenarioConfig::canonical() const {
  std::map<std::string, std::string> lines;
  for (const auto& [key, values] : numbers_) {
    std::string v;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) v += ", ";
      v += format_double(values[i]);
    }
    lines[key] = v;
  }
  for (const auto& [key, value] : texts_) lines[key] = value;
  std::string out;
  for (const auto& [key, value] : lines) out += key + " = " + value + "\n";
  return out;
}

void ScenarioConfig::set_number(std::string_view key, double value) {
  numbers_[std::string(key)] = {value};
}

ScenarioConfig parse_config(std::string_view text) {
  std::vector<std::string> errors;
  std::map<std::string, RawEntry> entries;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        errors.push_back("line " + std::to_string(line_no) + ": malformed section header");
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": empty key");
      continue;
    }
    if (section.empty()) {
      errors.push_back("line " + std::to_string(line_no) + ": key '" + key +
                       "' appears before any [section]");
      continue;
    }
    const std::string full = section + "." + key;
    if (const auto it = entries.find(full); it != entries.end()) {
      errors.push_back("duplicate key '" + full + "' at lines " + std::to_string(it->second.line) +
                       " and " + std::to_string(line_no));
      continue;
    }
    entries[full] = {value, line_no};
  }

  ScenarioConfig config;
  std::optional<ScenarioKind> kind;
  if (const auto it = entries.find("scenario.kind"); it != entries.end()) {
    kind = scenario_kind_from(it->second.value);
    if (!kind) {
      errors.push_back("line " + std::to_string(it->second.line) + ": unknown scenario kind '" +
                       it->second.value + "'");
    }
  }
  const KindMask mask = kind ? bit(*kind) : ALL;

  for (const auto& [name, entry] : entries) {
    const std::string where = "line " + std::to_string(entry.line) + ": ";
    if (name.starts_with("tolerances.")) {
      const std::string tol = name.substr(std::string_view("tolerances.").size());
      if (kind) {
        const auto allowed = tolerance_names(*kind);
        if (std::find(allowed.begin(), allowed.end(), tol) == allowed.end()) {
          errors.push_back(where + "unknown key '" + name + "' for kind " + to_string(*kind));
          continue;
        }
      }
      try {
        const double v = evaluate_expression(entry.value);
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigurationError("must be positive");
        config.numbers_[name] = {v};
      } catch (const std::exception& e) {
        errors.push_back(where + "bad value for '" + name + "': " + e.what());
      }
      continue;
    }
    const KeySpec* spec = find_spec(name);
    if (!spec) {
      errors.push_back(where + "unknown key '" + name + "'");
      continue;
    }
    if (kind && !(spec->allowed & mask)) {
      errors.push_back(where + "key '" + name + "' does not apply to kind " + to_string(*kind));
      continue;
    }
    if (spec->type == Type::text) {
      config.texts_[name] = entry.value;
      continue;
    }
    if (spec->type == Type::choice) {
      if (std::find(spec->choices.begin(), spec->choices.end(), entry.value) == spec->choices.end()) {
        std::string options;
        for (auto c : spec->choices) options += (options.empty() ? "" : ", ") + std::string(c);
        errors.push_back(where + "'" + name + "' must be one of: " + options);
        continue;
      }
      config.texts_[name] = entry.value;
      continue;
    }
    const bool is_list = spec->type == Type::number_list || spec->type == Type::integer_list;
    const bool is_integer = spec->type == Type::integer || spec->type == Type::integer_list;
    const auto items = is_list ? split_list(entry.value) : std::vector<std::string>{entry.value};
    std::vector<double> values;
    bool ok = true;
    for (const auto& item : items) {
      try {
        if (item.empty()) throw std::invalid_argument("empty value");
        std::string unit;
        const double v = ExpressionParser(item).parse(unit);
        if (!std::isfinite(v)) throw std::invalid_argument("value is not finite");
        if (!unit.empty()) {
          const Dimension d = parse_unit(unit);
          if (!(d == spec->dim)) {
            throw std::invalid_argument("unit '" + unit + "' is " + describe(d) + ", expected " +
                                        describe(spec->dim));
          }
        }
        if (is_integer && (v != std::floor(v) || std::abs(v) > 9007199254740992.0)) {
          throw std::invalid_argument("expected an integer, got " + format_double(v));
        }
        values.push_back(v);
      } catch (const std::exception& e) {
        errors.push_back(where + "bad value for '" + name + "': " + e.what());
        ok = false;
        break;
      }
    }
    if (ok) config.numbers_[name] = std::move(values);
  }

  if (kind) {
    config.kind_ = *kind;
    for (const auto& spec : schema()) {
      if ((spec.required & mask) && entries.find(std::string(spec.name)) == entries.end()) {
        errors.push_back("missing required key '" + std::string(spec.name) + "' for kind " +
                         to_string(*kind));
      }
    }
    auto present = [&](std::string_view k) { return entries.count(std::string(k)) > 0; };
    if (present("ensemble.count") && !present("ensemble.seed")) {
      errors.push_back("missing required key 'ensemble.seed': an ensemble needs a seed");
    }
    if (present("ensemble.seed") && config.has("ensemble.seed") && config.number("ensemble.seed") < 0) {
      errors.push_back("'ensemble.seed' must be non-negative");
    }
    const bool timed = *kind != ScenarioKind::hbar_sweep;
    if (timed && !present("time.steps") && !present("time.periods")) {
      errors.push_back("missing required key 'time.steps' (or 'time.periods') for kind " +
                       to_string(*kind));
    }
    if (present("time.steps") && present("time.periods")) {
      errors.push_back("'time.steps' and 'time.periods' are mutually exclusive");
    }
    if (config.text("physics.coupling", "spring") == "spring" &&
        (*kind == ScenarioKind::manybody_hartree || *kind == ScenarioKind::manybody_delta_compare) &&
        !present("physics.stiffness")) {
      errors.push_back("missing required key 'physics.stiffness' for a spring coupling");
    }
    if (config.text("physics.coupling", "spring") == "soft_coulomb" &&
        !present("physics.charge_product")) {
      errors.push_back("missing required key 'physics.charge_product' for a soft_coulomb coupling");
    }
  } else if (entries.find("scenario.kind") == entries.end()) {
    errors.push_back("missing required key 'scenario.kind'");
  }

  if (const auto it = config.numbers_.find("scenario.schema_version"); it != config.numbers_.end()) {
    config.schema_version_ = static_cast<int>(it->second.front());
    if (config.schema_version_ != kSchemaVersion) {
      errors.push_back("unsupported schema_version " + std::to_string(config.schema_version_) +
                       " (this build reads " + std::to_string(kSchemaVersion) + ")");
    }
  }
  for (const auto& key : {"physics.hbar", "physics.mass", "physics.omega", "physics.mass1",
                          "physics.mass2", "time.dt", "packet.width", "sweep.target_time"}) {
    if (config.has(key) && !(config.number(key) > 0.0)) {
      errors.push_back("'" + std::string(key) + "' must be positive");
    }
  }

  if (config.has("grid.dim")) {
    const double dim = config.number("grid.dim");
    if (dim != 1.0 && dim != 2.0) {
      errors.push_back("'grid.dim' must be 1 or 2");
    } else {
      const auto n = static_cast<std::size_t>(dim);
      for (const auto& key : {"grid.lower", "grid.upper", "grid.points"}) {
        if (config.has(key) && config.numbers(key).size() != 1 && config.numbers(key).size() != n) {
          errors.push_back("'" + std::string(key) + "' needs 1 or " + std::to_string(n) + " entries");
        }
      }
    }
  }
  if (config.has("grid.points")) {
    for (double p : config.numbers("grid.points")) {
      if (!(p >= 16.0) || !is_power_of_two(static_cast<std::size_t>(p))) {
        errors.push_back("'grid.points' entries must be powers of two >= 16");
        break;
      }
    }
  }
  if (config.has("grid.lower") && config.has("grid.upper")) {
    const auto lo = config.numbers("grid.lower");
    const auto hi = config.numbers("grid.upper");
    for (std::size_t a = 0; a < std::max(lo.size(), hi.size()); ++a) {
      if (!(hi[std::min(a, hi.size() - 1)] > lo[std::min(a, lo.size() - 1)])) {
        errors.push_back("'grid.upper' must exceed 'grid.lower' on every axis");
        break;
      }
    }
  }

  if (!errors.empty()) throw ConfigErrors(std::move(errors));
  return config;
}

}  // namespace dscale
