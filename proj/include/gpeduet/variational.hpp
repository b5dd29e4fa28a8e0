#pragma once

#include "gpeduet/core.hpp"

#include <vector>

namespace gpeduet {

/// Phase point of the Gaussian-ansatz reduced model: packet centers, momenta,
/// widths W_s (standard deviation of |psi_s|^2) and width velocities dW_s/dt.
struct VariationalState {
  double x0_alpha = 0.0;
  double p0_alpha = 0.0;
  double x0_beta = 0.0;
  double p0_beta = 0.0;
  double w_alpha = 1.0;
  double v_alpha = 0.0;
  double w_beta = 1.0;
  double v_beta = 0.0;

  double delta_x() const { return x0_alpha - x0_beta; }
  /// W = sqrt(W_a^2 + W_b^2).
  double total_width() const;
  /// W_s / W_eq with W_eq = (4 Omega^2)^(-1/4), the non-interacting equilibrium width.
  double sigma_alpha(double omega) const;
  double sigma_beta(double omega) const;

  VariationalState& operator+=(const VariationalState& o);
  VariationalState& operator*=(double s);
  friend VariationalState operator+(VariationalState a, const VariationalState& b) { return a += b; }
  friend VariationalState operator*(double s, VariationalState a) { return a *= s; }
  friend bool operator==(const VariationalState&, const VariationalState&) = default;
};

/// Equilibrium width of a non-interacting Gaussian, (4 Omega^2)^(-1/4).
double free_equilibrium_width(double omega);

struct ReducedModelOptions {
  /// Use the beta-bracket [1 + 2 x0_b dx / W^2] instead of the alpha<->beta
  /// image [1 - 2 x0_b dx / W^2].
  bool literal_mode = false;
  /// Drop the chirp contribution (dW/dt)^2 to the second-moment kinetic
  /// energy, i.e. integrate W W'' + W'^2 = RHS instead of W W'' = RHS.
  bool printed_width_kinetics = false;

  /// Both literal variants at once.
  static ReducedModelOptions literal() { return {true, true}; }
};

/// Time derivative of the reduced model. Centers obey x0' = p0 and
///   p0_a' = -Omega^2 x0_a + N_b g_ab dx exp(-dx^2 / 2W^2) / (sqrt(2 pi) W^3),
///   p0_b' = -Omega^2 x0_b - N_a g_ab dx exp(-dx^2 / 2W^2) / (sqrt(2 pi) W^3),
/// and widths obey W_s W_s'' = 1/(4W_s^2) - Omega^2 W_s^2 + g_s N_s / (4 sqrt(pi) W_s)
///   + (g_ab / 2) N_s' exp(-dx^2 / 2W^2) [1 +- 2 x0_s dx / W^2] / sqrt(2 pi W^2).
/// Throws std::invalid_argument if either width is not positive.
VariationalState ehrenfest_rhs(const VariationalState& v, const Params& params,
                               const ReducedModelOptions& options = {});

struct VariationalSample {
  double t = 0.0;
  VariationalState state;
};

/// Classic RK4 over ehrenfest_rhs, keeping t = 0, every record_every-th
/// step and the final step. Throws NumericalError with the offending time if
/// a width collapses to <= 0.
std::vector<VariationalSample> integrate(const VariationalState& v0, const Params& params, double dt,
                                         double t_final, const ReducedModelOptions& options = {},
                                         int record_every = 1);

/// (P^2 + Omega^2 X^2) / 2 for the particle-weighted center of mass; conserved
/// by the exact dynamics for any couplings.
double center_of_mass_energy(const VariationalState& v, const Params& params);

struct EquilibriumWidths {
  double w_alpha_eq = 0.0;
  double w_beta_eq = 0.0;
  double residual_alpha = 0.0;
  double residual_beta = 0.0;
  int iterations = 0;
};

/// Overlapped (x0_a = x0_b) stationary widths: simultaneous roots of
///   0 = 1/(4W_s^2) - Omega^2 W_s^2 + g_s N_s / (4 sqrt(pi) W_s) + g_ab N_s' / (2 sqrt(2 pi) W).
/// Damped Newton from the non-interacting width with a bisection sweep as
/// fallback. Throws NumericalError if the residuals do not fall below 1e-12.
EquilibriumWidths equilibrium_widths(const Params& params);

/// Stationarity residuals used by equilibrium_widths.
std::pair<double, double> width_residuals(const Params& params, double w_alpha, double w_beta);

/// Potential of the relative coordinate:
/// V_eff = Omega^2 dx^2 / 2 + (N / sqrt(2 pi)) (g_ab / w) exp(-dx^2 / 2 w^2), N = N_a + N_b.
double effective_potential(double delta_x, const Params& params, double w);

}  // namespace gpeduet
