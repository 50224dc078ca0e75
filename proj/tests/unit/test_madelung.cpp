#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dscale/coherent.hpp"
#include "dscale/error.hpp"
#include "dscale/madelung.hpp"
#include "dscale/propagator.hpp"

using namespace dscale;

namespace {

// Q(x) for a static Gaussian of width s, written out by hand.
double gaussian_q(double x, double x0, double s, double hbar, double mass) {
  const double d = x - x0;
  return hbar * hbar / (2 * mass) * (1 / (2 * s * s) - d * d / (4 * s * s * s * s));
}

EvolutionRecord free_record(std::size_t points) {
  const Grid g = make_line(-16, 16, points);
  const WaveField f = gaussian_packet(g, {-1, 0}, {1, 0}, 1.0, 1.0, 1.0);
  EvolutionOptions opt;
  opt.dt = 0.001;
  opt.steps = 40;
  opt.store_every = 10;
  return split_step_evolve(f, PotentialSpec::free(), opt);
}

double worst_residual(const std::vector<ResidualSample>& r, bool hj) {
  double w = 0.0;
  for (const auto& s : r) w = std::max(w, hj ? s.hamilton_jacobi : s.continuity);
  return w;
}

EvolutionRecord coherent_record(const CoherentParams& p, const Grid& g, double dt, int n) {
  EvolutionRecord rec;
  for (int k = 0; k < n; ++k) {
    rec.times.push_back(k * dt);
    rec.snapshots.push_back(coherent_field(p, k * dt, g));
  }
  return rec;
}

}  // namespace

TEST_SUITE("madelung") {
  TEST_CASE("plane-phase Gaussian has uniform velocity") {
    const Grid g = make_line(-10, 10, 512);
    const WaveField f = gaussian_packet(g, {0, 0}, {3, 0}, 1.0, 1.0, 1.0);
    const PolarField p = to_polar(f);
    CHECK_FALSE(p.disconnected);
    const VelocityField v = velocity_field(p);
    std::size_t used = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!v.valid[i]) continue;
      CHECK(v.velocity[i][0] == doctest::Approx(3.0).epsilon(1e-9));
      ++used;
    }
    CHECK(used > 200u);
  }

  TEST_CASE("coherent action is affine with slope m v(t)") {
    CoherentParams p;
    p.x0 = {1.0, 0.5};
    p.v0 = {0.3, 1.0};
    const Grid g = make_plane(-6, 6, 64, -6, 6, 64);
    const double t = 0.7;
    const PolarField polar = to_polar(coherent_field(p, t, g));
    const VelocityField v = velocity_field(polar);
    const PhaseSpacePoint cl = classical_oscillator(p, t);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!v.valid[i]) continue;
      CHECK(v.velocity[i][0] == doctest::Approx(cl.velocity[0]).epsilon(1e-9));
      CHECK(v.velocity[i][1] == doctest::Approx(cl.velocity[1]).epsilon(1e-9));
    }
  }

  TEST_CASE("real positive field has constant zero action") {
    const Grid g = make_line(-10, 10, 256);
    const WaveField f = gaussian_packet(g, {0, 0}, {0, 0}, 1.0, 1.0, 1.0);
    const PolarField p = to_polar(f);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (p.valid[i]) CHECK(std::abs(p.action[i]) <= 1e-15);
      else CHECK(std::isnan(p.action[i]));
    }
    const VelocityField v = velocity_field(p);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (v.valid[i]) CHECK(std::abs(v.velocity[i][0]) <= 1e-15);
    }
  }

  TEST_CASE("quantum potential of a static Gaussian") {
    const double s = 1.0;
    auto worst_error = [&](std::size_t n) {
      const Grid g = make_line(-10, 10, n);
      const WaveField f = gaussian_packet(g, {0, 0}, {0, 0}, s, 1.0, 1.0);
      const MaskedField q = quantum_potential(f);
      double w = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.point(i)[0];
        if (std::abs(x) > 3.0) continue;
        REQUIRE(q.valid[i]);
        w = std::max(w, std::abs(q.values[i] - gaussian_q(x, 0, s, 1.0, 1.0)));
      }
      if (n == 256) CHECK(q.values[128] == doctest::Approx(1.0 / 4.0).epsilon(1e-3));
      return w;
    };
    const double e1 = worst_error(256);
    const double e2 = worst_error(512);
    CHECK(e1 <= 1e-2);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("plane wave has zero quantum potential") {
    const Grid g = make_line(0, 2 * std::numbers::pi, 64);
    std::vector<Complex> amp(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) amp[i] = std::polar(1.0, 3.0 * g.point(i)[0]);
    const WaveField f = normalize(WaveField(g, amp, 1.0, 1.0));
    const MaskedField q = quantum_potential(f);
    std::size_t used = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!q.valid[i]) continue;
      CHECK(std::abs(q.values[i]) <= 1e-10);
      ++used;
    }
    CHECK(used >= g.size() - 2);
  }

  TEST_CASE("coherent quantum potential uses the oscillator width") {
    CoherentParams p;
    p.omega = 2.0;
    p.x0 = {0.5, 0};
    const Grid g = make_plane(-4, 4, 128, -4, 4, 128);
    const double t = 0.3;
    const MaskedField q = quantum_potential(coherent_field(p, t, g));
    const Point c = classical_oscillator(p, t).position;
    const double s = p.sigma();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point x = g.point(i);
      if (std::hypot(x[0] - c[0], x[1] - c[1]) > 3 * s) continue;
      // Two independent axes, each contributing the 1D formula.
      const double expected = gaussian_q(x[0], c[0], s, 1, 1) + gaussian_q(x[1], c[1], s, 1, 1);
      CHECK(q.values[i] == doctest::Approx(expected).epsilon(2e-2).scale(1.0));
    }
  }

  TEST_CASE("velocity of a linear action") {
    const Grid g = make_line(-10, 10, 256);
    PolarField polar;
    polar.grid = g;
    polar.hbar = 1.0;
    polar.mass = 2.0;
    polar.rho.assign(g.size(), 0.05);
    polar.valid.assign(g.size(), 1);
    polar.component.assign(g.size(), 0);
    polar.component_count = 1;
    for (std::size_t i = 0; i < g.size(); ++i) polar.action.push_back(2.0 * 0.4 * g.point(i)[0]);
    const VelocityField v = velocity_field(polar);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
      if (v.valid[i]) CHECK(v.velocity[i][0] == doctest::Approx(0.4).epsilon(1e-12));
    }
  }

  TEST_CASE("disconnected support is reported per component") {
    const Grid g = make_line(-20, 20, 512);
    const WaveField a = gaussian_packet(g, {-8, 0}, {1, 0}, 0.5, 1.0, 1.0);
    const WaveField b = gaussian_packet(g, {8, 0}, {-1, 0}, 0.5, 1.0, 1.0);
    std::vector<Complex> amp(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) amp[i] = a[i] + b[i];
    const PolarField p = to_polar(normalize(a.with_amplitudes(amp)));
    CHECK(p.disconnected);
    CHECK(p.component_count == 2);
    CHECK(velocity_field(p).disconnected);
  }

  TEST_CASE("analytic coherent record: residuals vanish under refinement") {
    CoherentParams p;
    p.x0 = {1, 0};
    p.v0 = {0, 0.5};
    const auto coarse =
        madelung_residuals(coherent_record(p, make_plane(-6, 6, 64, -6, 6, 64), 0.02, 5),
                           p.potential());
    const auto fine =
        madelung_residuals(coherent_record(p, make_plane(-6, 6, 128, -6, 6, 128), 0.01, 5),
                           p.potential());
    const double hj_ratio = worst_residual(coarse, true) / worst_residual(fine, true);
    const double c_ratio = worst_residual(coarse, false) / worst_residual(fine, false);
    CHECK(hj_ratio >= 3.0);
    CHECK(c_ratio >= 3.0);
  }

  TEST_CASE("free Gaussian residuals drop about four times with dx halved") {
    const auto r1 = madelung_residuals(free_record(256), PotentialSpec::free());
    const auto r2 = madelung_residuals(free_record(512), PotentialSpec::free());
    const double hj = worst_residual(r1, true) / worst_residual(r2, true);
    const double cont = worst_residual(r1, false) / worst_residual(r2, false);
    CHECK(hj >= 3.0);
    CHECK(hj <= 5.0);
    CHECK(cont >= 3.0);
    CHECK(cont <= 5.0);
  }

  TEST_CASE("a unit potential offset shows up in the action residual") {
    const auto rec = free_record(256);
    const auto base = madelung_residuals(rec, PotentialSpec::free());
    const auto shifted =
        madelung_residuals(rec, PotentialSpec::tabulated(rec.grid(), std::vector<double>(256, 1.0)));
    const double dv = rec.grid().cell_volume();
    for (std::size_t k = 0; k < base.size(); ++k) {
      const double unit = std::sqrt(static_cast<double>(shifted[k].points) * dv);
      CHECK(std::abs(shifted[k].hamilton_jacobi - unit) <= base[k].hamilton_jacobi + 1e-12);
      CHECK(shifted[k].continuity == base[k].continuity);
    }
  }

  TEST_CASE("residuals need three uniformly spaced snapshots") {
    auto rec = free_record(256);
    rec.snapshots.resize(2);
    rec.times.resize(2);
    CHECK_THROWS_AS(madelung_residuals(rec, PotentialSpec::free()), PreconditionError);
    auto uneven = free_record(256);
    uneven.times[2] += 0.001;
    CHECK_THROWS_AS(madelung_residuals(uneven, PotentialSpec::free()), PreconditionError);
  }
}
