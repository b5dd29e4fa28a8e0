#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace gpeduet {

/// Blow-up, non-convergence and other failures of an otherwise valid run.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Complex = std::complex<double>;
using Field = std::vector<Complex>;

enum class Species { alpha, beta };

constexpr Species other(Species s) { return s == Species::alpha ? Species::beta : Species::alpha; }

/// Uniform periodic grid on [-L, L) with FFT-ordered wavenumbers.
///
/// Copies share the underlying sample arrays, so a Grid is cheap to pass by
/// value and immutable once built.
class Grid {
 public:
  /// Throws std::invalid_argument unless n_points is a power of two >= 64 and
  /// half_length is finite and positive.
  Grid(std::size_t n_points, double half_length);

  std::size_t n_points() const { return n_points_; }
  double half_length() const { return half_length_; }
  double dx() const { return dx_; }
  /// Largest |k| represented (the Nyquist wavenumber pi/dx).
  double k_max() const;
  /// Wavenumber spacing 2*pi / (2L).
  double dk() const;

  std::span<const double> points() const { return *points_; }
  std::span<const double> wavenumbers() const { return *wavenumbers_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_points_ == b.n_points_ && a.half_length_ == b.half_length_;
  }

 private:
  std::size_t n_points_;
  double half_length_;
  double dx_;
  std::shared_ptr<const std::vector<double>> points_;
  std::shared_ptr<const std::vector<double>> wavenumbers_;
};

Grid make_grid(std::size_t n_points, double half_length);

/// Dimensionless couplings and trap of the rescaled coupled GPE
/// i dpsi_s/dt = (-1/2 d^2/dx^2 + Omega^2 x^2 / 2 + g_s |psi_s|^2 + g_ab |psi_s'|^2) psi_s.
class Params {
 public:
  /// Rejects attractive (negative) or non-finite couplings, omega <= 0 and
  /// non-positive particle numbers.
  Params(double g_alpha, double g_beta, double g_alphabeta, double omega, double n_alpha,
         double n_beta);

  double g_alpha() const { return g_alpha_; }
  double g_beta() const { return g_beta_; }
  double g_alphabeta() const { return g_alphabeta_; }
  double omega() const { return omega_; }
  double n_alpha() const { return n_alpha_; }
  double n_beta() const { return n_beta_; }

  double g(Species s) const { return s == Species::alpha ? g_alpha_ : g_beta_; }
  double n(Species s) const { return s == Species::alpha ? n_alpha_ : n_beta_; }
  double total_particles() const { return n_alpha_ + n_beta_; }

  Params with_g_alpha(double v) const;
  Params with_g_beta(double v) const;
  Params with_g_alphabeta(double v) const;
  Params with_omega(double v) const;
  Params with_n_alpha(double v) const;
  Params with_n_beta(double v) const;

 private:
  double g_alpha_;
  double g_beta_;
  double g_alphabeta_;
  double omega_;
  double n_alpha_;
  double n_beta_;
};

/// Pair of wavefunctions sampled on a shared grid.
class TwoComponentState {
 public:
  /// Throws std::invalid_argument if either field length differs from the grid.
  TwoComponentState(Grid grid, Field alpha, Field beta);

  const Grid& grid() const { return grid_; }

  std::span<Complex> alpha() { return alpha_; }
  std::span<Complex> beta() { return beta_; }
  std::span<const Complex> alpha() const { return alpha_; }
  std::span<const Complex> beta() const { return beta_; }

  std::span<Complex> component(Species s) { return s == Species::alpha ? alpha() : beta(); }
  std::span<const Complex> component(Species s) const {
    return s == Species::alpha ? alpha() : beta();
  }

 private:
  Grid grid_;
  Field alpha_;
  Field beta_;
};

struct Observables {
  double norm_alpha = 0.0;
  double norm_beta = 0.0;
  double center_alpha = 0.0;
  double center_beta = 0.0;
  double width_alpha = 0.0;
  double width_beta = 0.0;
  double energy = 0.0;
  double overlap_fraction = 0.0;
};

/// Traveling Gaussian sqrt(N) (2 pi W^2)^(-1/4) exp(-(x-x0)^2/4W^2) exp(i p0 (x - x0/2)),
/// renormalized to n_particles on the grid.
///
/// Throws std::invalid_argument when width <= 0, when |p0| is not resolved
/// by the grid, or when the box clips the packet (discrete norm deficit above
/// 1e-8 before renormalization).
Field gaussian_packet(const Grid& grid, double n_particles, double x0, double p0, double width);

// Single-field quadratures (rectangle rule with dx weight).
double norm(std::span<const Complex> psi, const Grid& grid);
double mean_position(std::span<const Complex> psi, const Grid& grid);
double position_spread(std::span<const Complex> psi, const Grid& grid);
/// <-i d/dx> per particle, evaluated spectrally.
double mean_momentum(std::span<const Complex> psi, const Grid& grid);
/// (1/2) int |dpsi/dx|^2 dx, evaluated in Fourier space.
double kinetic_energy(std::span<const Complex> psi, const Grid& grid);
/// Spectral first derivative; the Nyquist mode is dropped.
Field spectral_derivative(std::span<const Complex> psi, const Grid& grid);

void normalize(std::span<Complex> psi, const Grid& grid, double n_particles);

/// Energy of one component in isolation:
/// int [ |psi'|^2/2 + Omega^2 x^2 |psi|^2 / 2 + g |psi|^4 / 2 ] dx.
double single_component_energy(std::span<const Complex> psi, const Grid& grid, double g,
                               double omega);

/// Total coupled GPE energy functional.
double total_energy(const TwoComponentState& state, const Params& params);

/// int sqrt(n_a n_b) dx / sqrt(N_a N_b), clamped to [0, 1].
double overlap_fraction(const TwoComponentState& state);

/// Chemical potential estimate <H_s>/N_s for one component, with the
/// nonlinear terms of the GPE operator (not of the energy functional).
double chemical_potential(const TwoComponentState& state, const Params& params, Species s);

/// Throws std::invalid_argument if either component's norm deviates from the
/// particle numbers in params by more than 1e-6 relative.
Observables observables(const TwoComponentState& state, const Params& params);

/// 1D Thomas-Fermi chemical potential (3 g N Omega / (4 sqrt 2))^(2/3).
double thomas_fermi_mu(double g_times_n, double omega);

/// Smallest recommended half-length for the given parameters and packet
/// width: eight times the larger of the packet width, the Thomas-Fermi
/// radius and the oscillator length.
double minimum_half_length(const Params& params, double packet_width);

}  // namespace gpeduet
