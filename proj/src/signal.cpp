#include "gpeduet/signal.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gpeduet::signal {
namespace {

// Solves the 3x3 symmetric system by Cramer's rule; the normal matrix of
// {1, cos, sin} over many samples is well conditioned.
std::array<double, 3> solve3(const std::array<std::array<double, 3>, 3>& a,
                             const std::array<double, 3>& b) {
  auto det = [](const std::array<std::array<double, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d = det(a);
  std::array<double, 3> x{};
  for (int c = 0; c < 3; ++c) {
    auto m = a;
    for (int r = 0; r < 3; ++r) m[r][c] = b[r];
    x[c] = det(m) / d;
  }
  return x;
}

}  // namespace

SinusoidFit fit_at_frequency(std::span<const double> t, std::span<const double> y, double omega) {
  std::array<std::array<double, 3>, 3> a{};
  std::array<double, 3> b{};
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::array<double, 3> basis{1.0, std::cos(omega * t[i]), std::sin(omega * t[i])};
    for (int r = 0; r < 3; ++r) {
      b[r] += basis[r] * y[i];
      for (int c = 0; c < 3; ++c) a[r][c] += basis[r] * basis[c];
    }
  }
  const auto coef = solve3(a, b);
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - coef[0] - coef[1] * std::cos(omega * t[i]) - coef[2] * std::sin(omega * t[i]);
    ss += r * r;
  }
  return {omega, coef[0], coef[1], coef[2], std::sqrt(ss / static_cast<double>(t.size()))};
}

SinusoidFit fit_sinusoid(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size() || t.size() < 8) {
    throw std::invalid_argument("fit_sinusoid: need matching series of at least 8 samples");
  }
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  std::vector<double> crossings;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    const double a = y[i] - mean;
    const double b = y[i + 1] - mean;
    if (a < 0.0 && b >= 0.0) crossings.push_back(t[i] - a * (t[i + 1] - t[i]) / (b - a));
  }
  if (crossings.size() < 2) {
    throw std::invalid_argument("fit_sinusoid: signal completes fewer than one period");
  }
  const double period =
      (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  const double guess = 2.0 * std::numbers::pi / period;

  // Golden-section refinement on the fit residual.
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.95 * guess;
  double hi = 1.05 * guess;
  double m1 = hi - ratio * (hi - lo);
  double m2 = lo + ratio * (hi - lo);
  double f1 = fit_at_frequency(t, y, m1).rms_residual;
  double f2 = fit_at_frequency(t, y, m2).rms_residual;
  while (hi - lo > 1e-12 * guess) {
    if (f1 < f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - ratio * (hi - lo);
      f1 = fit_at_frequency(t, y, m1).rms_residual;
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + ratio * (hi - lo);
      f2 = fit_at_frequency(t, y, m2).rms_residual;
    }
  }
  return fit_at_frequency(t, y, 0.5 * (lo + hi));
}

}  // namespace gpeduet::signal
