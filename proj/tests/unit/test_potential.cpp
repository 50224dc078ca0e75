#include <doctest.h>

#include <cmath>

#include "dscale/error.hpp"
#include "dscale/potential.hpp"

using namespace dscale;

TEST_SUITE("potential") {
  TEST_CASE("external kinds scale with mass") {
    const auto lin = PotentialSpec::linear({9.8, 0});
    CHECK(lin.external({2, 0}, 3.0, 1) == doctest::Approx(3.0 * 9.8 * 2));
    CHECK(lin.gradient({2, 0}, 3.0, 1)[0] == doctest::Approx(3.0 * 9.8));
    const auto h = PotentialSpec::harmonic({2, 1}, {1, 0});
    CHECK(h.external({2, 3}, 1.5, 2) == doctest::Approx(0.5 * 1.5 * (4 * 1 + 1 * 9)));
    const Point g = h.gradient({2, 3}, 1.5, 2);
    CHECK(g[0] == doctest::Approx(1.5 * 4 * 1));
    CHECK(g[1] == doctest::Approx(1.5 * 3));
    CHECK(PotentialSpec::free().external({5, 5}, 2.0) == 0.0);
    CHECK(h.has_closed_form());
    CHECK_FALSE(PotentialSpec::soft_coulomb(1.0, 1.0).has_closed_form());
    CHECK_THROWS_AS(PotentialSpec::barrier({}), ConfigurationError);
  }

  TEST_CASE("pair kinds") {
    const auto s = PotentialSpec::spring(2.0, 1.0);
    CHECK(s.is_pair());
    CHECK(s.pair(3.0) == doctest::Approx(0.5 * 2.0 * 4.0));
    const auto c = PotentialSpec::soft_coulomb(2.0, 0.5);
    CHECK(c.pair(0.0) == doctest::Approx(4.0));
    CHECK(c.pair(1.0) == doctest::Approx(2.0 / std::sqrt(1.25)));
    const auto t = PotentialSpec::radial_table(0.5, {1.0, 3.0, 5.0});
    CHECK(t.pair(0.25) == doctest::Approx(2.0));
    CHECK(t.pair(10.0) == doctest::Approx(5.0));
    CHECK(PotentialSpec::free().pair(1.0) == 0.0);
  }

  TEST_CASE("barrier is open in the slits and closed on the wall") {
    BarrierParams b;
    b.axis = 0;
    b.wall_position = 0.0;
    b.thickness = 1.0;
    b.slit_centers = {-1.0, 1.0};
    b.slit_widths = {0.5, 0.5};
    b.height = 100.0;
    b.smoothing = 0.1;
    const auto v = PotentialSpec::barrier(b);
    CHECK(v.external({0, 0}, 1.0, 2) == doctest::Approx(100.0));
    CHECK(v.external({0, 1}, 1.0, 2) == doctest::Approx(0.0));
    CHECK(v.external({0, -1}, 1.0, 2) == doctest::Approx(0.0));
    CHECK(v.external({2, 0}, 1.0, 2) == doctest::Approx(0.0));
    CHECK(v.external({0, 3}, 1.0, 2) == doctest::Approx(100.0));
    // Mid-edge value of a symmetric ramp is half height.
    CHECK(v.external({0.5, 3}, 1.0, 2) == doctest::Approx(50.0));
  }

  TEST_CASE("tabulated values are interpolated") {
    const Grid g = make_line(0, 16, 16);
    std::vector<double> values(16);
    for (std::size_t i = 0; i < 16; ++i) values[i] = 2.0 * static_cast<double>(i);
    const auto t = PotentialSpec::tabulated(g, values);
    CHECK(t.external({3.5, 0}, 7.0, 1) == doctest::Approx(7.0));
    CHECK(t.gradient({3.5, 0}, 7.0, 1)[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK_THROWS_AS(PotentialSpec::tabulated(g, {1.0, 2.0}), GridMismatchError);
  }

  TEST_CASE("sampling on a grid") {
    const Grid g = make_line(-4, 4, 16);
    const auto v = PotentialSpec::harmonic({1, 0}).sample(g, 2.0);
    for (std::size_t i = 0; i < 16; ++i) {
      const double x = g.point(i)[0];
      CHECK(v[i] == doctest::Approx(x * x));
    }
    const auto u = PotentialSpec::spring(1.0).sample_pair(g);
    CHECK(u[0] == doctest::Approx(8.0));
  }

  TEST_CASE("names") {
    CHECK(to_string(PotentialKind::pair_soft_coulomb).size() > 0);
    CHECK(to_string(PotentialKind::free) != to_string(PotentialKind::linear));
  }
}
