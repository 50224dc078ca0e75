#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dscale/config.hpp"

using namespace dscale;

namespace {

const char* kMinimalCoherent = R"(
[scenario]
schema_version = 1
kind = coherent-validate
[grid]
dim = 2
lower = -8
upper = 8
points = 256
[physics]
hbar = 1
mass = 1
omega = 1
[packet]
center = 2, 0
velocity = 0, 1.5
[time]
dt = 2*pi/1000
periods = 1
)";

std::vector<std::string> errors_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const ConfigErrors& e) {
    return e.messages();
  }
  return {};
}

bool mentions(const std::vector<std::string>& messages, std::string_view needle) {
  for (const auto& m : messages) {
    if (m.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal coherent config is valid") {
    const ScenarioConfig c = parse_config(kMinimalCoherent);
    CHECK(c.kind() == ScenarioKind::coherent_validate);
    CHECK(c.schema_version() == 1);
    CHECK(c.number("time.dt") == doctest::Approx(2 * std::numbers::pi / 1000).epsilon(1e-15));
    CHECK(c.numbers("packet.velocity") == std::vector<double>{0, 1.5});
    CHECK(c.integer("grid.points") == 256);
    CHECK(c.text("time.scheme", "strang") == "strang");
  }

  TEST_CASE("every cookbook scenario parses") {
    for (const char* name : {"coherent-validate", "coherent-ensemble", "free-spread", "hbar-sweep",
                             "factorize-2body", "manybody-hartree", "manybody-delta-compare",
                             "double-slit"}) {
      CAPTURE(name);
      const std::string text = read_file(std::string(DSCALE_SCENARIO_DIR) + "/" + name + ".ini");
      REQUIRE_FALSE(text.empty());
      CHECK_NOTHROW(parse_config(text));
    }
  }

  TEST_CASE("ensemble without a seed names the key") {
    const std::string text = read_file(std::string(DSCALE_SCENARIO_DIR) + "/hbar-sweep.ini") +
                             "\n[ensemble]\ncount = 100\n";
    const auto errors = errors_of(text);
    REQUIRE_FALSE(errors.empty());
    CHECK(mentions(errors, "ensemble.seed"));
  }

  TEST_CASE("duplicate keys report both lines") {
    const std::string text = std::string(kMinimalCoherent) + "[physics]\nmass = 2\n";
    const auto errors = errors_of(text);
    REQUIRE(errors.size() == 1);
    CHECK(mentions(errors, "physics.mass"));
    CHECK(mentions(errors, "lines 12 and 21"));
  }

  TEST_CASE("all problems are reported together") {
    const std::string text = R"(
[scenario]
schema_version = 1
kind = free-spread
[grid]
dim = 1
lower = -8 s
upper = 8
points = 100
colour = red
[physics]
hbar = 1
mass = 1
[packet]
center = 0
velocity = 1
width = 1
[time]
steps = 10
)";
    const auto errors = errors_of(text);
    CHECK(errors.size() >= 4);
    CHECK(mentions(errors, "grid.colour"));
    CHECK(mentions(errors, "time.dt"));
    CHECK(mentions(errors, "unit 's'"));
    CHECK(mentions(errors, "grid.points"));
  }

  TEST_CASE("keys of another kind are rejected") {
    const std::string text = std::string(kMinimalCoherent) + "[barrier]\nheight = 5\n";
    CHECK(mentions(errors_of(text), "barrier.height"));
  }

  TEST_CASE("units are checked against the key dimension") {
    std::string ok = kMinimalCoherent;
    ok.replace(ok.find("velocity = 0, 1.5"), 17, "velocity = 0 m/s, 1.5 m*s^-1");
    CHECK(parse_config(ok).numbers("packet.velocity")[1] == 1.5);
    std::string bad = kMinimalCoherent;
    bad.replace(bad.find("omega = 1"), 9, "omega = 1 kg");
    CHECK(mentions(errors_of(bad), "physics.omega"));
    std::string energy = kMinimalCoherent;
    energy.replace(energy.find("hbar = 1"), 8, "hbar = 1 kg*m^2/s");
    CHECK_NOTHROW(parse_config(energy));
  }

  TEST_CASE("schema version and kind") {
    std::string v2 = kMinimalCoherent;
    v2.replace(v2.find("schema_version = 1"), 18, "schema_version = 2");
    CHECK(mentions(errors_of(v2), "schema_version"));
    std::string kind = kMinimalCoherent;
    kind.replace(kind.find("coherent-validate"), 17, "teleport");
    CHECK(mentions(errors_of(kind), "teleport"));
    CHECK(scenario_kind_from("double-slit") == ScenarioKind::double_slit);
    CHECK_FALSE(scenario_kind_from("nope").has_value());
    CHECK(to_string(ScenarioKind::manybody_delta_compare) == "manybody-delta-compare");
  }

  TEST_CASE("arithmetic expressions") {
    CHECK(evaluate_expression("2*pi/1000") == doctest::Approx(2 * std::numbers::pi / 1000));
    CHECK(evaluate_expression("(1 + 2) * 3") == 9.0);
    CHECK(evaluate_expression("-1/8") == -0.125);
    CHECK(evaluate_expression("1e-3") == 0.001);
    CHECK_THROWS(evaluate_expression("2 +"));
    CHECK_THROWS(evaluate_expression("(1"));
  }

  TEST_CASE("canonical form ignores layout and comments") {
    const std::string spaced = "# comment\n" + std::string(kMinimalCoherent) + "\n; trailing\n";
    std::string reordered = kMinimalCoherent;
    reordered.replace(reordered.find("hbar = 1\nmass = 1"), 17, "mass = 1.0\nhbar=1");
    CHECK(parse_config(spaced).canonical() == parse_config(kMinimalCoherent).canonical());
    CHECK(parse_config(reordered).canonical() == parse_config(kMinimalCoherent).canonical());
    ScenarioConfig c = parse_config(kMinimalCoherent);
    c.set_number("physics.mass", 2.0);
    CHECK(c.canonical() != parse_config(kMinimalCoherent).canonical());
  }

  TEST_CASE("tolerances section") {
    const std::string text = std::string(kMinimalCoherent) + "[tolerances]\nl2 = 1e-7\n";
    const auto t = parse_config(text).tolerances();
    CHECK(t.at("l2") == 1e-7);
    CHECK(mentions(errors_of(std::string(kMinimalCoherent) + "[tolerances]\nfoo = 1\n"), "foo"));
  }
}
