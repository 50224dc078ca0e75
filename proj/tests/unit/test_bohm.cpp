#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "dscale/bohm.hpp"
#include "dscale/coherent.hpp"
#include "dscale/error.hpp"
#include "dscale/propagator.hpp"
#include "oracles.hpp"

using namespace dscale;

namespace {

EvolutionRecord free_record(double v, double t_end) {
  const Grid g = make_line(-32, 32, 1024);
  const WaveField f = gaussian_packet(g, {0, 0}, {v, 0}, 1.0, 1.0, 1.0);
  EvolutionOptions opt;
  opt.dt = 0.0025;
  opt.steps = static_cast<std::size_t>(std::llround(t_end / opt.dt));
  opt.store_every = 1;
  opt.diagnostics_every = 0;
  return split_step_evolve(f, PotentialSpec::free(), opt);
}

}  // namespace

TEST_SUITE("bohm") {
  TEST_CASE("coherent paths translate rigidly with the classical orbit") {
    CoherentParams p;
    p.x0 = {1.5, 0};
    p.v0 = {0, 1.0};
    const Grid g = make_plane(-7, 7, 64, -7, 7, 64);
    EvolutionRecord rec;
    const double dt = 2 * std::numbers::pi / 400;
    for (int k = 0; k <= 400; ++k) {
      rec.times.push_back(k * dt);
      rec.snapshots.push_back(coherent_field(p, k * dt, g));
    }
    const VelocityRecord vel = VelocityRecord::from(rec);
    const Point start0 = classical_oscillator(p, 0).position;
    for (const Point& x0 : {Point{1.5, 0}, Point{1.0, 0.3}, Point{2.1, -0.4}}) {
      const Trajectory tr = integrate_dbb(vel, x0, 4);
      REQUIRE_FALSE(tr.exited);
      double worst = 0.0;
      for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const Point cl = classical_oscillator(p, tr.times[k]).position;
        for (int a = 0; a < 2; ++a) {
          worst = std::max(worst, std::abs(tr.positions[k][a] - x0[a] - (cl[a] - start0[a])));
        }
      }
      CHECK(worst <= 1e-4 * 1.5);
    }
  }

  TEST_CASE("center of a plane-phase packet moves at v0") {
    const auto rec = free_record(1.0, 2.0);
    const Trajectory tr = integrate_dbb(rec, {0, 0}, 4);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      CHECK(std::abs(tr.positions[k][0] - tr.times[k]) <= 1e-6);
    }
  }

  TEST_CASE("spreading packet path follows the width law") {
    const auto rec = free_record(0.0, 2.0);
    const Trajectory tr = integrate_dbb(rec, {1.0, 0}, 4);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      const double expected = oracle::free_bohm_path(1.0, tr.times[k], 0, 0, 1.0, 1.0, 1.0);
      CHECK(std::abs(tr.positions[k][0] - expected) <= 1e-6);
    }
  }

  TEST_CASE("off-support start is a domain error") {
    const auto rec = free_record(0.0, 0.1);
    CHECK_THROWS_AS(integrate_dbb(rec, {30, 0}, 4), DomainError);
  }

  TEST_CASE("uniform density sampling") {
    const Grid g = make_line(0, 1, 1024);
    const std::vector<double> rho(1024, 1.0);
    const auto xs = sample_initial(g, rho, 100000, 99);
    double mean = 0.0;
    for (const Point& x : xs) {
      CHECK(x[0] >= -0.5 / 1024);
      CHECK(x[0] < 1.0);
      mean += x[0];
    }
    mean /= static_cast<double>(xs.size());
    CHECK(std::abs(mean - 0.5) <= 0.005);
    CHECK_THROWS(sample_initial(g, rho, 0, 1));
  }

  TEST_CASE("Gaussian sampling against the normal CDF") {
    const Grid g = make_line(-10, 10, 1024);
    const WaveField f = gaussian_packet(g, {0, 0}, {0, 0}, 1.0, 1.0, 1.0);
    const auto rho = density(f);
    std::vector<double> distances;
    for (std::uint64_t seed = 1; seed <= 21; ++seed) {
      const auto xs = sample_initial(g, rho, 10000, seed);
      std::vector<double> v;
      for (const Point& x : xs) v.push_back(x[0]);
      // |psi|^2 of width sigma is a normal law of standard deviation sigma.
      const double d = oracle::ks_distance(v, [](double x) { return oracle::normal_cdf(x); });
      const double ours = ks_distance(v, MarginalCdf(g, rho, 0));
      CHECK(std::abs(d - ours) <= 2e-3);
      distances.push_back(d);
    }
    std::nth_element(distances.begin(), distances.begin() + 10, distances.end());
    CHECK(distances[10] <= 0.01);
  }

  TEST_CASE("2D sampling uses conditional CDFs") {
    CoherentParams p;
    p.x0 = {1, -0.5};
    const Grid g = make_plane(-6, 6, 128, -6, 6, 128);
    const WaveField f = coherent_field(p, 0, g);
    const auto rho = density(f);
    const auto xs = sample_initial(g, rho, 20000, 5);
    std::vector<double> x0, x1;
    for (const Point& x : xs) {
      x0.push_back(x[0]);
      x1.push_back(x[1]);
    }
    const double s = p.sigma();
    CHECK(oracle::ks_distance(x0, [&](double x) { return oracle::normal_cdf((x - 1) / s); }) <= 0.02);
    CHECK(oracle::ks_distance(x1, [&](double x) { return oracle::normal_cdf((x + 0.5) / s); }) <= 0.02);
  }

  TEST_CASE("same seed, same positions") {
    const Grid g = make_line(-10, 10, 256);
    const auto rho = density(gaussian_packet(g, {0, 0}, {0, 0}, 1.0, 1.0, 1.0));
    CHECK(sample_initial(g, rho, 1000, 42) == sample_initial(g, rho, 1000, 42));
    CHECK(sample_initial(g, rho, 1000, 42) != sample_initial(g, rho, 1000, 43));
    for (std::uint64_t c = 0; c < 1000; ++c) {
      const double u = counter_uniform(3, 4, c);
      CHECK(u > 0.0);
      CHECK(u < 1.0);
    }
  }

  TEST_CASE("single-trajectory ensemble gives a large distance without error") {
    const auto rec = free_record(0.5, 0.5);
    const VelocityRecord vel = VelocityRecord::from(rec);
    const Ensemble e = make_ensemble(vel, 1, 7, 4);
    const auto ks = equivariance_check(rec, e);
    REQUIRE(ks.size() == rec.times.size());
    for (const auto& s : ks) {
      CHECK(s.ks[0] >= 0.5);
      CHECK(s.active == 1u);
    }
  }

  TEST_CASE("free ensemble stays equivariant") {
    const auto rec = free_record(1.0, 2.0);
    const VelocityRecord vel = VelocityRecord::from(rec);
    const Ensemble e = make_ensemble(vel, 4000, 17, 4, 4);
    for (const auto& s : equivariance_check(rec, e)) CHECK(s.ks[0] <= 0.03);
  }

  TEST_CASE("csv writers") {
    const auto rec = free_record(1.0, 0.1);
    const VelocityRecord vel = VelocityRecord::from(rec);
    const Ensemble e = make_ensemble(vel, 3, 1, 2);
    const auto dir = std::filesystem::temp_directory_path();
    write_trajectory_csv(dir / "dscale_unit_traj.csv", e.trajectories, 1);
    write_ensemble_csv(dir / "dscale_unit_ens.csv", equivariance_check(rec, e), 1);
    std::ifstream in(dir / "dscale_unit_traj.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "id,t,x,vx,exited");
    std::ifstream in2(dir / "dscale_unit_ens.csv");
    std::getline(in2, header);
    CHECK(header == "t,ks_x,n_active");
  }
}
