#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dscale/coherent.hpp"
#include "dscale/error.hpp"
#include "dscale/propagator.hpp"
#include "oracles.hpp"

using namespace dscale;

namespace {

double l2_to_oracle(const WaveField& f, double t, double x0, double v, double sigma) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.grid().size(); ++i) {
    const Complex exact =
        oracle::free_gaussian(f.grid().point(i)[0], t, x0, v, sigma, f.hbar(), f.mass());
    acc += std::norm(f[i] - exact);
  }
  return std::sqrt(acc * f.grid().cell_volume());
}

Point joint_mean(const WaveField& f) {
  return expectation_position(f);
}

}  // namespace

TEST_SUITE("propagator") {
  TEST_CASE("free Gaussian spreads to sqrt 2 at t = 2") {
    const Grid g = make_line(-32, 32, 1024);
    const WaveField f = gaussian_packet(g, {0, 0}, {0, 0}, 1.0, 1.0, 1.0);
    EvolutionOptions opt;
    opt.dt = 0.01;
    opt.steps = 200;
    opt.store_every = 200;
    const auto rec = split_step_evolve(f, PotentialSpec::free(), opt);
    const WaveField& last = rec.snapshots.back();
    CHECK(rec.times.back() == doctest::Approx(2.0));
    const double width = std::sqrt(position_variance(last)[0]);
    CHECK(width == doctest::Approx(oracle::free_width(2.0, 1.0, 1.0, 1.0)).epsilon(1e-10));
    CHECK(width == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(l2_to_oracle(last, 2.0, 0.0, 0.0, 1.0) <= 1e-10);
  }

  TEST_CASE("moving free Gaussian matches the closed form") {
    const Grid g = make_line(-32, 32, 1024);
    const WaveField f = gaussian_packet(g, {-4, 0}, {1.5, 0}, 0.8, 1.0, 2.0);
    EvolutionOptions opt;
    opt.dt = 0.005;
    opt.steps = 600;
    opt.store_every = 300;
    const auto rec = split_step_evolve(f, PotentialSpec::free(), opt);
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      CHECK(l2_to_oracle(rec.snapshots[k], rec.times[k], -4.0, 1.5, 0.8) <= 1e-10);
    }
  }

  TEST_CASE("zero steps is the identity") {
    const Grid g = make_line(-10, 10, 256);
    const WaveField f = gaussian_packet(g, {0, 0}, {1, 0}, 1.0, 1.0, 1.0);
    EvolutionOptions opt;
    opt.dt = 0.01;
    opt.steps = 0;
    const auto rec = split_step_evolve(f, PotentialSpec::free(), opt);
    REQUIRE(rec.snapshots.size() == 1);
    CHECK(l2_distance(rec.snapshots[0], f) == 0.0);
  }

  TEST_CASE("coherent state returns after one period") {
    CoherentParams p;
    p.x0 = {1.0, 0.0};
    p.v0 = {0.0, 1.0};
    const Grid g = make_plane(-8, 8, 64, -8, 8, 64);
    const WaveField psi0 = coherent_field(p, 0.0, g);
    EvolutionOptions opt;
    opt.dt = 2 * std::numbers::pi / 1000;
    opt.steps = 1000;
    opt.store_every = 1000;
    opt.scheme = SplitScheme::yoshida4;
    opt.diagnostics_every = 0;
    const auto rec = split_step_evolve(psi0, p.potential(), opt);
    const WaveField exact = coherent_field(p, rec.times.back(), g);
    CHECK(l2_distance(rec.snapshots.back(), exact) <= 1e-6);
  }

  TEST_CASE("non-interacting pair stays a product") {
    const Grid g = make_plane(-12, 12, 128, -12, 12, 128);
    const Point s{1.0, 0.7};
    const std::array<double, 2> m{1.0, 2.0};
    std::vector<Complex> amp(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.point(i);
      amp[i] = oracle::free_gaussian(x[0], 0, -2, 1, s[0], 1, m[0]) *
               oracle::free_gaussian(x[1], 0, 2, -0.5, s[1], 1, m[1]);
    }
    const WaveField psi0 = normalize(WaveField(g, amp, 1.0, 3.0));
    EvolutionOptions opt;
    opt.dt = 0.01;
    opt.steps = 150;
    opt.store_every = 150;
    const auto rec = evolve_full_two_body(psi0, m, PotentialSpec::free(), PotentialSpec::free(), opt);
    const auto rho = density(rec.snapshots.back());
    const std::size_t n = 128;
    std::vector<double> m0(n, 0.0), m1(n, 0.0);
    const double dx = g.axis(0).spacing();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        m0[i] += rho[g.index(i, j)] * dx;
        m1[j] += rho[g.index(i, j)] * dx;
      }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        worst = std::max(worst, std::abs(rho[g.index(i, j)] - m0[i] * m1[j]));
      }
    }
    CHECK(worst <= 1e-8);
  }

  TEST_CASE("spring pair: center of mass moves uniformly") {
    const Grid g = make_plane(-12, 12, 128, -12, 12, 128);
    const std::array<double, 2> m{1.0, 1.0};
    std::vector<Complex> amp(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.point(i);
      amp[i] = oracle::free_gaussian(x[0], 0, -1.5, 0.6, 0.8, 1, 1) *
               oracle::free_gaussian(x[1], 0, 1.0, 0.2, 0.8, 1, 1);
    }
    const WaveField psi0 = normalize(WaveField(g, amp, 1.0, 2.0));
    EvolutionOptions opt;
    opt.dt = 0.01;
    opt.steps = 300;
    opt.store_every = 30;
    const auto rec =
        evolve_full_two_body(psi0, m, PotentialSpec::spring(1.0), PotentialSpec::free(), opt);
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      const Point mean = joint_mean(rec.snapshots[k]);
      const double xg = 0.5 * (mean[0] + mean[1]);
      CHECK(xg == doctest::Approx(-0.25 + 0.4 * rec.times[k]).epsilon(1e-9));
    }
  }

  TEST_CASE("uniform field: center of mass falls on a parabola") {
    const Grid g = make_plane(-16, 16, 128, -16, 16, 128);
    const std::array<double, 2> m{1.0, 3.0};
    const double grav = 0.8;
    std::vector<Complex> amp(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.point(i);
      amp[i] = oracle::free_gaussian(x[0], 0, -1, 1.0, 1.0, 1, m[0]) *
               oracle::free_gaussian(x[1], 0, 2, 1.0, 1.0, 1, m[1]);
    }
    const WaveField psi0 = normalize(WaveField(g, amp, 1.0, 4.0));
    EvolutionOptions opt;
    opt.dt = 0.01;
    opt.steps = 200;
    opt.store_every = 50;
    const auto rec = evolve_full_two_body(psi0, m, PotentialSpec::spring(0.5, 1.0),
                                          PotentialSpec::linear({grav, 0}), opt);
    const double xg0 = (m[0] * -1 + m[1] * 2) / 4.0;
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      const Point mean = joint_mean(rec.snapshots[k]);
      const double xg = (m[0] * mean[0] + m[1] * mean[1]) / 4.0;
      const double t = rec.times[k];
      CHECK(std::abs(xg - (xg0 + 1.0 * t - 0.5 * grav * t * t)) <= 1e-6);
    }
  }

  TEST_CASE("halving the step quarters the Strang error") {
    const Grid g = make_line(-16, 16, 512);
    const WaveField f = gaussian_packet(g, {1, 0}, {0.5, 0}, 0.7, 1.0, 1.0);
    const auto v = PotentialSpec::harmonic({1.3, 0});
    auto run = [&](double dt) {
      EvolutionOptions opt;
      opt.dt = dt;
      opt.steps = static_cast<std::size_t>(std::llround(1.0 / dt));
      opt.store_every = opt.steps;
      opt.diagnostics_every = 0;
      return split_step_evolve(f, v, opt).snapshots.back();
    };
    const WaveField ref = run(0.0025);
    const double e1 = l2_distance(run(0.02), ref);
    const double e2 = l2_distance(run(0.01), ref);
    CHECK(e1 / e2 >= 3.5);
    CHECK(e1 / e2 <= 4.5);
  }

  TEST_CASE("diagnostics, advisories and divergence") {
    const Grid g = make_line(-10, 10, 256);
    const WaveField f = gaussian_packet(g, {0, 0}, {0, 0}, 1.0, 1.0, 1.0);
    EvolutionOptions opt;
    opt.dt = 1.0;
    opt.steps = 2;
    const auto rec = split_step_evolve(f, PotentialSpec::free(), opt);
    CHECK_FALSE(rec.advisories.empty());
    CHECK(rec.diagnostics.size() == 3);
    std::vector<double> bad(g.size(), 0.0);
    bad[10] = std::nan("");
    opt.dt = 0.01;
    CHECK_THROWS_AS(split_step_evolve(f, bad, opt), ConfigurationError);
    std::vector<Complex> poisoned(f.amplitudes().begin(), f.amplitudes().end());
    poisoned[100] = Complex(std::nan(""), 0.0);
    try {
      split_step_evolve(f.with_amplitudes(poisoned), PotentialSpec::free(), opt);
      FAIL("expected divergence");
    } catch (const DivergenceError& e) {
      CHECK(e.step() == 1);
    }
    opt.dt = -1.0;
    CHECK_THROWS_AS(split_step_evolve(f, PotentialSpec::free(), opt), ConfigurationError);
  }

  TEST_CASE("stability limit") {
    const Grid g = make_line(-10, 10, 256);
    const double dx = g.axis(0).spacing();
    CHECK(stability_limit(g, 1.0, {2.0, 2.0}) == doctest::Approx(2.0 * dx * dx / std::numbers::pi));
  }
}
