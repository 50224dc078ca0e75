#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

std::vector<cplx> naive_dft(const std::vector<cplx>& in, int sign) {
  const std::size_t n = in.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) /
                           static_cast<double>(n);
      acc += in[j] * std::polar(1.0, angle);
    }
    out[k] = acc;
  }
  return out;
}

cplx free_gaussian(double x, double t, double x0, double v, double sigma, double hbar,
                   double mass) {
  const cplx spread = 1.0 + cplx(0.0, hbar * t / (2.0 * mass * sigma * sigma));
  const double k = mass * v / hbar;
  const double d = x - x0 - v * t;
  return std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25) / std::sqrt(spread) *
         std::exp(-d * d / (4.0 * sigma * sigma * spread) + cplx(0.0, k * (x - 0.5 * v * t)));
}

double free_width(double t, double sigma, double hbar, double mass) {
  const double tau = hbar * t / (2.0 * mass * sigma * sigma);
  return sigma * std::sqrt(1.0 + tau * tau);
}

double free_bohm_path(double x_start, double t, double x0, double v, double sigma, double hbar,
                      double mass) {
  return x0 + v * t + (x_start - x0) * free_width(t, sigma, hbar, mass) / sigma;
}

double harmonic_path_action(double x0, double x, double t, double mass, double omega,
                            std::size_t segments) {
  const std::size_t k = segments;
  const double h = t / static_cast<double>(k);
  // Interior unknowns x_1 .. x_{K-1}:
  //   (2m/h - h m w^2) x_i - (m/h)(x_{i-1} + x_{i+1}) = 0.
  const double diag = 2.0 * mass / h - h * mass * omega * omega;
  const double off = -mass / h;
  const std::size_t n = k - 1;
  std::vector<double> c(n), d(n), path(k + 1);
  for (std::size_t i = 0; i < n; ++i) {
    double rhs = 0.0;
    if (i == 0) rhs -= off * x0;
    if (i == n - 1) rhs -= off * x;
    const double denom = i == 0 ? diag : diag - off * c[i - 1];
    c[i] = off / denom;
    d[i] = i == 0 ? rhs / denom : (rhs - off * d[i - 1]) / denom;
  }
  path[0] = x0;
  path[k] = x;
  for (std::size_t i = n; i-- > 0;) path[i + 1] = d[i] - (i + 1 < n ? c[i] * path[i + 2] : 0.0);
  double action = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = path[i + 1] - path[i];
    const double v0 = 0.5 * mass * omega * omega * path[i] * path[i];
    const double v1 = 0.5 * mass * omega * omega * path[i + 1] * path[i + 1];
    action += 0.5 * mass * dx * dx / h - 0.5 * h * (v0 + v1);
  }
  return action;
}

double harmonic_action(double x0, double x, double t, double mass, double omega,
                       std::size_t segments) {
  const double coarse = harmonic_path_action(x0, x, t, mass, omega, segments);
  const double fine = harmonic_path_action(x0, x, t, mass, omega, 2 * segments);
  return (4.0 * fine - coarse) / 3.0;
}

double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return f(0.5 * (a + b));
}

double simpson(const std::function<double(double)>& f, double a, double b, std::size_t n) {
  if (n % 2) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * h);
  return s * h / 3.0;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace oracle
