#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// O(N^2) DFT, unnormalized; sign = -1 forward, +1 backward.
std::vector<cplx> naive_dft(const std::vector<cplx>& in, int sign);

// Exact free evolution of (2 pi s^2)^(-1/4) exp(-(x - x0)^2 / 4 s^2 + i m v x / hbar).
cplx free_gaussian(double x, double t, double x0, double v, double sigma, double hbar, double mass);
double free_width(double t, double sigma, double hbar, double mass);

// Bohmian path in the free Gaussian above, started at x.
double free_bohm_path(double x_start, double t, double x0, double v, double sigma, double hbar,
                      double mass);

// Action of the stationary path of the trapezoid-discretized Lagrangian
// m/2 xdot^2 - m omega^2 x^2 / 2 with K segments, solved as a tridiagonal
// system.
double harmonic_path_action(double x0, double x, double t, double mass, double omega,
                            std::size_t segments);
// Richardson extrapolation of the above from K and 2K segments.
double harmonic_action(double x0, double x, double t, double mass, double omega,
                       std::size_t segments = 1024);

// Minimum value of f on [a, b] by golden-section search.
double golden_min(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

// Composite Simpson rule with n (even) intervals.
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n);

// Kolmogorov-Smirnov distance of samples to a continuous CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

// Standard normal CDF.
double normal_cdf(double z);

}  // namespace oracle
