#include "gpeduet/core.hpp"

#include "gpeduet/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gpeduet {
namespace {

using std::numbers::pi;

double require_finite_nonnegative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    std::ostringstream msg;
    msg << "params: " << name << " must be finite and >= 0 (attractive couplings are not supported), got "
        << value;
    throw std::invalid_argument(msg.str());
  }
  return value;
}

double require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    std::ostringstream msg;
    msg << "params: " << name << " must be finite and > 0, got " << value;
    throw std::invalid_argument(msg.str());
  }
  return value;
}

double sum_density(std::span<const Complex> psi) {
  double s = 0.0;
  for (const auto& z : psi) s += std::norm(z);
  return s;
}

double potential_energy(std::span<const Complex> psi, const Grid& grid, double omega) {
  const auto x = grid.points();
  double s = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) s += x[j] * x[j] * std::norm(psi[j]);
  return 0.5 * omega * omega * s * grid.dx();
}

double quartic(std::span<const Complex> psi, const Grid& grid) {
  double s = 0.0;
  for (const auto& z : psi) {
    const double n = std::norm(z);
    s += n * n;
  }
  return s * grid.dx();
}

double cross_density(const TwoComponentState& state) {
  const auto a = state.alpha();
  const auto b = state.beta();
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(a[j]) * std::norm(b[j]);
  return s * state.grid().dx();
}

}  // namespace

Grid::Grid(std::size_t n_points, double half_length) : n_points_(n_points), half_length_(half_length) {
  if (n_points < 64 || !std::has_single_bit(n_points)) {
    throw std::invalid_argument("grid: n_points must be a power of two >= 64, got " +
                                std::to_string(n_points));
  }
  if (!std::isfinite(half_length) || half_length <= 0.0) {
    throw std::invalid_argument("grid: half_length must be finite and > 0");
  }
  dx_ = 2.0 * half_length / static_cast<double>(n_points);
  std::vector<double> x(n_points);
  std::vector<double> k(n_points);
  const double dk = pi / half_length;
  const auto n = static_cast<long long>(n_points);
  for (long long j = 0; j < n; ++j) {
    x[static_cast<std::size_t>(j)] = -half_length + static_cast<double>(j) * dx_;
    const long long m = j < n / 2 ? j : j - n;
    k[static_cast<std::size_t>(j)] = static_cast<double>(m) * dk;
  }
  points_ = std::make_shared<const std::vector<double>>(std::move(x));
  wavenumbers_ = std::make_shared<const std::vector<double>>(std::move(k));
}

double Grid::k_max() const { return pi / dx_; }

double Grid::dk() const { return pi / half_length_; }

Grid make_grid(std::size_t n_points, double half_length) { return Grid(n_points, half_length); }

Params::Params(double g_alpha, double g_beta, double g_alphabeta, double omega, double n_alpha,
               double n_beta)
    : g_alpha_(require_finite_nonnegative(g_alpha, "g_alpha")),
      g_beta_(require_finite_nonnegative(g_beta, "g_beta")),
      g_alphabeta_(require_finite_nonnegative(g_alphabeta, "g_alphabeta")),
      omega_(require_positive(omega, "omega")),
      n_alpha_(require_positive(n_alpha, "n_alpha")),
      n_beta_(require_positive(n_beta, "n_beta")) {}

Params Params::with_g_alpha(double v) const {
  return {v, g_beta_, g_alphabeta_, omega_, n_alpha_, n_beta_};
}
Params Params::with_g_beta(double v) const {
  return {g_alpha_, v, g_alphabeta_, omega_, n_alpha_, n_beta_};
}
Params Params::with_g_alphabeta(double v) const {
  return {g_alpha_, g_beta_, v, omega_, n_alpha_, n_beta_};
}
Params Params::with_omega(double v) const {
  return {g_alpha_, g_beta_, g_alphabeta_, v, n_alpha_, n_beta_};
}
Params Params::with_n_alpha(double v) const {
  return {g_alpha_, g_beta_, g_alphabeta_, omega_, v, n_beta_};
}
Params Params::with_n_beta(double v) const {
  return {g_alpha_, g_beta_, g_alphabeta_, omega_, n_alpha_, v};
}

TwoComponentState::TwoComponentState(Grid grid, Field alpha, Field beta)
    : grid_(std::move(grid)), alpha_(std::move(alpha)), beta_(std::move(beta)) {
  if (alpha_.size() != grid_.n_points() || beta_.size() != grid_.n_points()) {
    throw std::invalid_argument("state: component length does not match grid.n_points");
  }
}

Field gaussian_packet(const Grid& grid, double n_particles, double x0, double p0, double width) {
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw std::invalid_argument("gaussian_packet: width must be finite and > 0");
  }
  if (!(n_particles > 0.0)) {
    throw std::invalid_argument("gaussian_packet: n_particles must be > 0");
  }
  if (!std::isfinite(x0) || !std::isfinite(p0) || std::abs(p0) >= grid.k_max()) {
    throw std::invalid_argument("gaussian_packet: momentum not resolved by the grid");
  }
  const auto x = grid.points();
  const double amplitude = std::sqrt(n_particles) / std::pow(2.0 * pi * width * width, 0.25);
  const double inv_four_w2 = 1.0 / (4.0 * width * width);
  Field psi(grid.n_points());
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const double d = x[j] - x0;
    psi[j] = amplitude * std::exp(-d * d * inv_four_w2) * std::polar(1.0, p0 * (x[j] - 0.5 * x0));
  }
  const double deficit = std::abs(norm(psi, grid) - n_particles) / n_particles;
  if (deficit > 1e-8) {
    std::ostringstream msg;
    msg << "gaussian_packet: packet (x0=" << x0 << ", W=" << width
        << ") is clipped by the box [-" << grid.half_length() << ", " << grid.half_length()
        << "), norm deficit " << deficit;
    throw std::invalid_argument(msg.str());
  }
  normalize(psi, grid, n_particles);
  return psi;
}

double norm(std::span<const Complex> psi, const Grid& grid) { return sum_density(psi) * grid.dx(); }

double mean_position(std::span<const Complex> psi, const Grid& grid) {
  const auto x = grid.points();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const double n = std::norm(psi[j]);
    num += x[j] * n;
    den += n;
  }
  return den > 0.0 ? num / den : 0.0;
}

double position_spread(std::span<const Complex> psi, const Grid& grid) {
  const auto x = grid.points();
  const double c = mean_position(psi, grid);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    const double n = std::norm(psi[j]);
    const double d = x[j] - c;
    num += d * d * n;
    den += n;
  }
  return den > 0.0 ? std::sqrt(std::max(0.0, num / den)) : 0.0;
}

Field spectral_derivative(std::span<const Complex> psi, const Grid& grid) {
  Field f(psi.begin(), psi.end());
  fft::forward(f);
  const auto k = grid.wavenumbers();
  const std::size_t nyquist = grid.n_points() / 2;
  const double inv_n = 1.0 / static_cast<double>(grid.n_points());
  for (std::size_t j = 0; j < f.size(); ++j) {
    f[j] = j == nyquist ? Complex{} : Complex(0.0, k[j] * inv_n) * f[j];
  }
  fft::backward(f);
  return f;
}

double mean_momentum(std::span<const Complex> psi, const Grid& grid) {
  Field f(psi.begin(), psi.end());
  fft::forward(f);
  const auto k = grid.wavenumbers();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double a = std::norm(f[j]);
    num += k[j] * a;
    den += a;
  }
  return den > 0.0 ? num / den : 0.0;
}

double kinetic_energy(std::span<const Complex> psi, const Grid& grid) {
  Field f(psi.begin(), psi.end());
  fft::forward(f);
  const auto k = grid.wavenumbers();
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += k[j] * k[j] * std::norm(f[j]);
  return 0.5 * s * grid.dx() / static_cast<double>(grid.n_points());
}

void normalize(std::span<Complex> psi, const Grid& grid, double n_particles) {
  const double current = norm(psi, grid);
  if (!(current > 0.0) || !std::isfinite(current)) {
    throw std::invalid_argument("normalize: field has zero or non-finite norm");
  }
  const double scale = std::sqrt(n_particles / current);
  for (auto& z : psi) z *= scale;
}

double single_component_energy(std::span<const Complex> psi, const Grid& grid, double g,
                               double omega) {
  return kinetic_energy(psi, grid) + potential_energy(psi, grid, omega) +
         0.5 * g * quartic(psi, grid);
}

double total_energy(const TwoComponentState& state, const Params& params) {
  const Grid& grid = state.grid();
  return single_component_energy(state.alpha(), grid, params.g_alpha(), params.omega()) +
         single_component_energy(state.beta(), grid, params.g_beta(), params.omega()) +
         params.g_alphabeta() * cross_density(state);
}

double overlap_fraction(const TwoComponentState& state) {
  const auto a = state.alpha();
  const auto b = state.beta();
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::abs(a[j]) * std::abs(b[j]);
  const double na = sum_density(a);
  const double nb = sum_density(b);
  if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
  return std::clamp(s / std::sqrt(na * nb), 0.0, 1.0);
}

double chemical_potential(const TwoComponentState& state, const Params& params, Species s) {
  const Grid& grid = state.grid();
  const auto psi = state.component(s);
  const double n_s = norm(psi, grid);
  const double h = kinetic_energy(psi, grid) + potential_energy(psi, grid, params.omega()) +
                   params.g(s) * quartic(psi, grid) + params.g_alphabeta() * cross_density(state);
  return h / n_s;
}

Observables observables(const TwoComponentState& state, const Params& params) {
  const Grid& grid = state.grid();
  Observables o;
  o.norm_alpha = norm(state.alpha(), grid);
  o.norm_beta = norm(state.beta(), grid);
  for (const auto s : {Species::alpha, Species::beta}) {
    const double measured = s == Species::alpha ? o.norm_alpha : o.norm_beta;
    if (std::abs(measured - params.n(s)) > 1e-6 * params.n(s)) {
      std::ostringstream msg;
      msg << "observables: component " << (s == Species::alpha ? "alpha" : "beta")
          << " has norm " << measured << ", expected " << params.n(s);
      throw std::invalid_argument(msg.str());
    }
  }
  o.center_alpha = mean_position(state.alpha(), grid);
  o.center_beta = mean_position(state.beta(), grid);
  o.width_alpha = position_spread(state.alpha(), grid);
  o.width_beta = position_spread(state.beta(), grid);
  o.energy = total_energy(state, params);
  o.overlap_fraction = overlap_fraction(state);
  return o;
}

double thomas_fermi_mu(double g_times_n, double omega) {
  return std::pow(3.0 * g_times_n * omega / (4.0 * std::numbers::sqrt2), 2.0 / 3.0);
}

double minimum_half_length(const Params& params, double packet_width) {
  const double omega = params.omega();
  double extent = std::max(packet_width, 1.0 / std::sqrt(omega));
  for (const auto s : {Species::alpha, Species::beta}) {
    const double gn = params.g(s) * params.n(s) + params.g_alphabeta() * params.n(other(s));
    if (gn > 0.0) extent = std::max(extent, std::sqrt(2.0 * thomas_fermi_mu(gn, omega)) / omega);
  }
  return 8.0 * extent;
}

}  // namespace gpeduet
