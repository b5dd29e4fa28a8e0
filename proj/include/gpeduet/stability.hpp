#pragma once

#include "gpeduet/core.hpp"
#include "gpeduet/variational.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace gpeduet {

/// Linearized width oscillation about the overlapped equilibrium. The
/// coefficients are in units where Omega^2 is explicit (they carry it), and
/// omega_plus_sq / omega_minus_sq are the squared normal-mode frequencies.
struct WidthModeReport {
  double omega_a1 = 0.0;
  double omega_a2 = 0.0;
  double omega_b1 = 0.0;
  double omega_b2 = 0.0;
  double omega_plus_sq = 0.0;
  double omega_minus_sq = 0.0;
  bool stable = false;
  double sigma_alpha_eq = 1.0;
  double sigma_beta_eq = 1.0;
};

/// Roots of det [[a1 - w^2, a2], [b2, b1 - w^2]] = 0 in w^2. A negative
/// discriminant leaves both fields NaN. Stable iff both roots are real and
/// positive.
WidthModeReport normal_modes_from_coefficients(double a1, double a2, double b1, double b2);

/// Coefficients at sigma_s = W_s,eq / (4 Omega^2)^(-1/4):
///   omega_s1 = Omega^2 [2 + 2/sigma_s^4 + g_s N_s / sqrt(2 pi Omega) / sigma_s^3
///                       + g_ab N_s' / sqrt(pi Omega) / (sigma_a^2 + sigma_b^2)^(3/2)]
///   omega_s2 = Omega^2 (sigma_s' / sigma_s) g_ab N_s' / sqrt(pi Omega) / (sigma_a^2 + sigma_b^2)^(3/2)
WidthModeReport width_normal_modes(const Params& params, const EquilibriumWidths& eq);

/// Squared breathing frequencies of far-separated packets (overlap dropped),
/// each evaluated at its own single-species equilibrium.
struct DecoupledWidthFrequencies {
  double omega_tilde_alpha = 0.0;
  double omega_tilde_beta = 0.0;
};

DecoupledWidthFrequencies decoupled_width_frequencies(const Params& params);

struct FixedPoint {
  double x_alpha = 0.0;
  double x_beta = 0.0;
};

struct CenterStabilityReport {
  double g_tilde = 0.0;                 // g_ab / (sqrt(2 pi) W^3)
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  std::vector<FixedPoint> fixed_points; // origin first, then the symmetric pair
  double separation = 0.0;              // Delta x* > 0 of the double-well minima, 0 if none
  double threshold_eigenvalue = 0.0;    // g_ab where lambda_plus = 0
  double threshold_printed = 0.0;       // sqrt(2 pi) Omega^2 W^2 / N
  double curvature_at_origin = 0.0;     // V_eff''(0)
  bool double_well = false;
};

/// Linear stability of the center equations at total width w.
CenterStabilityReport center_stability(const Params& params, double w);

/// V_eff''(0) = Omega^2 - N g_ab / (sqrt(2 pi) w^3).
double effective_potential_curvature(const Params& params, double w);

enum class LegendreScheme {
  /// Galerkin on polynomials with Gauss-Legendre quadrature: exact for the
  /// Legendre operator up to round-off.
  spectral,
  /// Conservative differences on cell centres; the flux vanishes at x = +-1
  /// where 1 - x^2 degenerates. Low eigenvalues come out exact.
  finite_difference,
};

struct LegendreMode {
  int n = 0;
  double epsilon_analytic = 0.0;
  double epsilon_numeric = 0.0;
};

/// sqrt(n (n + 1) / 2).
double legendre_epsilon(int n);

/// Eigenvalues lambda (ascending, including the zero mode) of
/// -(1 - x^2) eta'' + 2 x eta' = lambda eta discretized with n_grid unknowns.
std::vector<double> legendre_eigenvalues(int n_grid, LegendreScheme scheme);

/// Single-species excitation frequencies eps = sqrt(lambda / 2) for n = 1..n_modes.
/// Eigenvalues that move by more than 1e-3 relative between n_grid / 2 and
/// n_grid unknowns are discarded as unconverged. Throws std::invalid_argument
/// for n_grid < 200, and NumericalError when a retained mode misses the
/// analytic value by more than 1e-4.
std::vector<LegendreMode> legendre_spectrum_single(int n_modes, int n_grid,
                                                   LegendreScheme scheme = LegendreScheme::spectral);

/// Equal-coupling mode frequency sqrt(1 - c^2) sqrt(n (n + 1) / 2) in units of
/// the trap frequency. Throws std::invalid_argument outside c in [0, 1].
double coupled_mode_scaling(double c, int n);

struct Miscibility {
  bool separated = false;
  double margin = 0.0;  // g_ab - sqrt(g_a g_b)
};

Miscibility miscibility_criterion(const Params& params);

/// Thomas-Fermi background of an overlapping mixture sharing one chemical
/// potential. Central densities solve g_a n_a + g_ab n_b = mu and
/// g_b n_b + g_ab n_a = mu, and mu is fixed by the total particle number.
struct TFParams {
  double mu = 0.0;
  double xi = 0.0;  // Omega / (2 mu)
  double nbar_alpha = 0.0;
  double nbar_beta = 0.0;
  double c_alpha = 0.0;  // g_ab / g_a
  double c_beta = 0.0;   // g_ab / g_b
  std::optional<double> epsilon;  // equal-coupling mode frequency, when g_a == g_b
  bool thomas_fermi_valid = false;  // xi <= 0.1
};

/// Throws std::invalid_argument unless g_a, g_b > 0 and g_ab^2 < g_a g_b.
TFParams thomas_fermi_params(const Params& params, int mode_index = 1);

struct StabilityReport {
  EquilibriumWidths equilibrium;
  WidthModeReport widths;
  DecoupledWidthFrequencies decoupled;
  CenterStabilityReport center;
  Miscibility miscibility;
  std::vector<LegendreMode> legendre;
  std::optional<double> coupled_n1;  // coupled_mode_scaling(g_ab / g_a, 1) when g_a == g_b
};

StabilityReport analyze_stability(const Params& params, int legendre_modes = 5, int legendre_grid = 1000);

/// Flat `key = value` text, one entry per line.
void write_key_value(std::ostream& os, const Params& params, const StabilityReport& report);
std::string stability_csv_header();
std::string stability_csv_row(const Params& params, const StabilityReport& report);

}  // namespace gpeduet
