#include "gpeduet/stability.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gpeduet {
namespace {

using std::numbers::pi;
const double kSqrtTwoPi = std::sqrt(2.0 * pi);

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Newton iteration on P_n from the Tricomi initial guesses.
GaussLegendre gauss_legendre(int n) {
  GaussLegendre q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    q.nodes[static_cast<std::size_t>(i)] = x;
    q.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

std::vector<double> spectral_eigenvalues(int n) {
  const GaussLegendre q = gauss_legendre(n);
  const auto N = static_cast<Eigen::Index>(n);

  // Barycentric weights at Gauss points are proportional to
  // (-1)^j sqrt((1 - x_j^2) w_j).
  Eigen::VectorXd bary(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    const double x = q.nodes[static_cast<std::size_t>(j)];
    const double s = std::sqrt((1.0 - x * x) * q.weights[static_cast<std::size_t>(j)]);
    bary(j) = (j % 2 == 0) ? s : -s;
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    double diag = 0.0;
    for (Eigen::Index j = 0; j < N; ++j) {
      if (i == j) continue;
      const double v = (bary(j) / bary(i)) /
                       (q.nodes[static_cast<std::size_t>(i)] - q.nodes[static_cast<std::size_t>(j)]);
      d(i, j) = v;
      diag -= v;
    }
    d(i, i) = diag;
  }

  // Stiffness sum_k w_k (1 - x_k^2) l_i'(x_k) l_j'(x_k) and diagonal mass w;
  // Gauss quadrature integrates both exactly on polynomials of degree n - 1.
  Eigen::VectorXd flux(N);
  Eigen::VectorXd inv_sqrt_mass(N);
  for (Eigen::Index k = 0; k < N; ++k) {
    const double x = q.nodes[static_cast<std::size_t>(k)];
    const double w = q.weights[static_cast<std::size_t>(k)];
    flux(k) = w * (1.0 - x * x);
    inv_sqrt_mass(k) = 1.0 / std::sqrt(w);
  }
  Eigen::MatrixXd stiffness = d.transpose() * flux.asDiagonal() * d;
  Eigen::MatrixXd sym = inv_sqrt_mass.asDiagonal() * stiffness * inv_sqrt_mass.asDiagonal();
  sym = 0.5 * (sym + sym.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("legendre: eigen solver failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

std::vector<double> finite_difference_eigenvalues(int n) {
  const double h = 2.0 / n;
  const auto N = static_cast<Eigen::Index>(n);
  auto face = [&](Eigen::Index i) {  // coefficient at x_{i + 1/2}
    const double x = -1.0 + static_cast<double>(i + 1) * h;
    return (i < 0 || i >= N - 1) ? 0.0 : 1.0 - x * x;
  };
  Eigen::VectorXd diag(N);
  Eigen::VectorXd sub(N - 1);
  for (Eigen::Index i = 0; i < N; ++i) {
    diag(i) = (face(i) + face(i - 1)) / (h * h);
    if (i + 1 < N) sub(i) = -face(i) / (h * h);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("legendre: eigen solver failed");
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace

WidthModeReport normal_modes_from_coefficients(double a1, double a2, double b1, double b2) {
  WidthModeReport r;
  r.omega_a1 = a1;
  r.omega_a2 = a2;
  r.omega_b1 = b1;
  r.omega_b2 = b2;
  const double trace = a1 + b1;
  const double det = a1 * b1 - a2 * b2;
  const double radicand = (a1 - b1) * (a1 - b1) + 4.0 * a2 * b2;
  if (radicand < 0.0) {
    r.omega_plus_sq = std::numeric_limits<double>::quiet_NaN();
    r.omega_minus_sq = std::numeric_limits<double>::quiet_NaN();
    r.stable = false;
    return r;
  }
  const double disc = std::sqrt(radicand);
  // Larger-magnitude root first, the other from the product, to avoid cancellation.
  const double big = 0.5 * (trace + std::copysign(disc, trace));
  const double small = big != 0.0 ? det / big : 0.5 * (trace - std::copysign(disc, trace));
  r.omega_plus_sq = std::max(big, small);
  r.omega_minus_sq = std::min(big, small);
  r.stable = trace > 0.0 && det > 0.0;
  return r;
}

WidthModeReport width_normal_modes(const Params& params, const EquilibriumWidths& eq) {
  const double omega = params.omega();
  const double omega2 = omega * omega;
  const double w0 = free_equilibrium_width(omega);
  const double sa = eq.w_alpha_eq / w0;
  const double sb = eq.w_beta_eq / w0;
  const double s3 = std::pow(sa * sa + sb * sb, 1.5);
  const double self_a = params.g_alpha() * params.n_alpha() / std::sqrt(2.0 * pi * omega);
  const double self_b = params.g_beta() * params.n_beta() / std::sqrt(2.0 * pi * omega);
  const double cross_a = params.g_alphabeta() * params.n_beta() / std::sqrt(pi * omega);
  const double cross_b = params.g_alphabeta() * params.n_alpha() / std::sqrt(pi * omega);

  const double a1 = omega2 * (2.0 + 2.0 / std::pow(sa, 4) + self_a / (sa * sa * sa) + cross_a / s3);
  const double a2 = omega2 * (sb / sa) * cross_a / s3;
  const double b1 = omega2 * (2.0 + 2.0 / std::pow(sb, 4) + self_b / (sb * sb * sb) + cross_b / s3);
  const double b2 = omega2 * (sa / sb) * cross_b / s3;

  WidthModeReport r = normal_modes_from_coefficients(a1, a2, b1, b2);
  r.sigma_alpha_eq = sa;
  r.sigma_beta_eq = sb;
  return r;
}

DecoupledWidthFrequencies decoupled_width_frequencies(const Params& params) {
  const Params isolated = params.with_g_alphabeta(0.0);
  const WidthModeReport r = width_normal_modes(isolated, equilibrium_widths(isolated));
  return {r.omega_a1, r.omega_b1};
}

double effective_potential_curvature(const Params& params, double w) {
  if (!(w > 0.0)) throw std::invalid_argument("effective_potential_curvature: w must be > 0");
  return params.omega() * params.omega() -
         params.total_particles() * params.g_alphabeta() / (kSqrtTwoPi * w * w * w);
}

CenterStabilityReport center_stability(const Params& params, double w) {
  if (!(w > 0.0)) throw std::invalid_argument("center_stability: w must be > 0");
  const double omega2 = params.omega() * params.omega();
  const double n = params.total_particles();

  CenterStabilityReport r;
  r.g_tilde = params.g_alphabeta() / (kSqrtTwoPi * w * w * w);
  const double gn = r.g_tilde * n;
  r.lambda_plus = 0.5 * ((gn - 2.0 * omega2) + gn);
  r.lambda_minus = 0.5 * ((gn - 2.0 * omega2) - gn);
  r.threshold_eigenvalue = kSqrtTwoPi * omega2 * w * w * w / n;
  r.threshold_printed = kSqrtTwoPi * omega2 * w * w / n;
  r.curvature_at_origin = effective_potential_curvature(params, w);
  r.double_well = gn > omega2;
  r.fixed_points.push_back({0.0, 0.0});

  if (r.double_well) {
    // dV_eff/d(dx) = dx (Omega^2 - g~ N exp(-dx^2 / 2w^2)); bisect the bracket.
    auto bracket = [&](double dx) { return omega2 - gn * std::exp(-dx * dx / (2.0 * w * w)); };
    double lo = 0.0;
    double hi = 6.0 * w;
    while (bracket(hi) < 0.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (bracket(mid) < 0.0 ? lo : hi) = mid;
    }
    r.separation = 0.5 * (lo + hi);
    const double xa = params.n_beta() * r.separation / n;
    const double xb = -params.n_alpha() * r.separation / n;
    r.fixed_points.push_back({xa, xb});
    r.fixed_points.push_back({-xa, -xb});
  }
  return r;
}

double legendre_epsilon(int n) { return std::sqrt(0.5 * n * (n + 1.0)); }

std::vector<double> legendre_eigenvalues(int n_grid, LegendreScheme scheme) {
  if (n_grid < 2) throw std::invalid_argument("legendre_eigenvalues: n_grid must be >= 2");
  return scheme == LegendreScheme::spectral ? spectral_eigenvalues(n_grid)
                                            : finite_difference_eigenvalues(n_grid);
}

std::vector<LegendreMode> legendre_spectrum_single(int n_modes, int n_grid, LegendreScheme scheme) {
  if (n_grid < 200) throw std::invalid_argument("legendre_spectrum_single: n_grid must be >= 200");
  if (n_modes < 1 || n_modes > n_grid / 4) {
    throw std::invalid_argument("legendre_spectrum_single: n_modes must lie in [1, n_grid / 4]");
  }
  const std::vector<double> fine = legendre_eigenvalues(n_grid, scheme);
  const std::vector<double> coarse = legendre_eigenvalues(n_grid / 2, scheme);

  // Index 0 is the constant (zero) mode in both discretizations.
  std::vector<double> converged;
  for (std::size_t i = 1; i < coarse.size() && converged.size() < static_cast<std::size_t>(n_modes); ++i) {
    if (std::abs(fine[i] - coarse[i]) <= 1e-3 * std::abs(fine[i])) converged.push_back(fine[i]);
  }
  if (converged.size() < static_cast<std::size_t>(n_modes)) {
    throw NumericalError("legendre_spectrum_single: too few converged modes; refine n_grid");
  }

  std::vector<LegendreMode> modes;
  for (int n = 1; n <= n_modes; ++n) {
    LegendreMode m{n, legendre_epsilon(n), std::sqrt(0.5 * std::max(0.0, converged[static_cast<std::size_t>(n - 1)]))};
    if (std::abs(m.epsilon_numeric - m.epsilon_analytic) > 1e-4) {
      std::ostringstream msg;
      msg << "legendre_spectrum_single: discretization too coarse, mode " << n << " numeric "
          << m.epsilon_numeric << " vs analytic " << m.epsilon_analytic;
      throw NumericalError(msg.str());
    }
    modes.push_back(m);
  }
  return modes;
}

double coupled_mode_scaling(double c, int n) {
  if (!std::isfinite(c) || c < 0.0 || c > 1.0) {
    throw std::invalid_argument("coupled_mode_scaling: c must lie in [0, 1]");
  }
  if (n < 1) throw std::invalid_argument("coupled_mode_scaling: n must be >= 1");
  return std::sqrt(1.0 - c * c) * legendre_epsilon(n);
}

Miscibility miscibility_criterion(const Params& params) {
  const double gab = params.g_alphabeta();
  const double prod = params.g_alpha() * params.g_beta();
  return {gab * gab > prod, gab - std::sqrt(prod)};
}

TFParams thomas_fermi_params(const Params& params, int mode_index) {
  const double ga = params.g_alpha();
  const double gb = params.g_beta();
  const double gab = params.g_alphabeta();
  const double det = ga * gb - gab * gab;
  if (!(ga > 0.0) || !(gb > 0.0) || !(det > 0.0)) {
    throw std::invalid_argument("thomas_fermi_params: needs g_a, g_b > 0 and g_ab^2 < g_a g_b");
  }
  // Central densities per unit mu.
  const double da = (gb - gab) / det;
  const double db = (ga - gab) / det;
  if (!(da > 0.0) || !(db > 0.0)) {
    throw std::invalid_argument("thomas_fermi_params: one component is expelled from the overlap");
  }
  TFParams tf;
  const double omega = params.omega();
  tf.mu = std::pow(3.0 * params.total_particles() * omega / (4.0 * std::numbers::sqrt2 * (da + db)),
                   2.0 / 3.0);
  tf.xi = omega / (2.0 * tf.mu);
  tf.nbar_alpha = ga * da;
  tf.nbar_beta = gb * db;
  tf.c_alpha = gab / ga;
  tf.c_beta = gab / gb;
  if (ga == gb) tf.epsilon = coupled_mode_scaling(tf.c_alpha, mode_index);
  tf.thomas_fermi_valid = tf.xi <= 0.1;
  return tf;
}

StabilityReport analyze_stability(const Params& params, int legendre_modes, int legendre_grid) {
  StabilityReport r;
  r.equilibrium = equilibrium_widths(params);
  r.widths = width_normal_modes(params, r.equilibrium);
  r.decoupled = decoupled_width_frequencies(params);
  const double w = std::hypot(r.equilibrium.w_alpha_eq, r.equilibrium.w_beta_eq);
  r.center = center_stability(params, w);
  r.miscibility = miscibility_criterion(params);
  if (legendre_modes > 0) r.legendre = legendre_spectrum_single(legendre_modes, legendre_grid);
  if (params.g_alpha() == params.g_beta() && params.g_alpha() > 0.0 &&
      params.g_alphabeta() <= params.g_alpha()) {
    r.coupled_n1 = coupled_mode_scaling(params.g_alphabeta() / params.g_alpha(), 1);
  }
  return r;
}

void write_key_value(std::ostream& os, const Params& p, const StabilityReport& r) {
  const auto old_precision = os.precision(17);
  os << "g_alpha = " << p.g_alpha() << "\n"
     << "g_beta = " << p.g_beta() << "\n"
     << "g_alphabeta = " << p.g_alphabeta() << "\n"
     << "omega = " << p.omega() << "\n"
     << "n_alpha = " << p.n_alpha() << "\n"
     << "n_beta = " << p.n_beta() << "\n"
     << "w_alpha_eq = " << r.equilibrium.w_alpha_eq << "\n"
     << "w_beta_eq = " << r.equilibrium.w_beta_eq << "\n"
     << "sigma_alpha_eq = " << r.widths.sigma_alpha_eq << "\n"
     << "sigma_beta_eq = " << r.widths.sigma_beta_eq << "\n"
     << "omega_a1 = " << r.widths.omega_a1 << "\n"
     << "omega_a2 = " << r.widths.omega_a2 << "\n"
     << "omega_b1 = " << r.widths.omega_b1 << "\n"
     << "omega_b2 = " << r.widths.omega_b2 << "\n"
     << "omega_plus_sq = " << r.widths.omega_plus_sq << "\n"
     << "omega_minus_sq = " << r.widths.omega_minus_sq << "\n"
     << "width_modes_stable = " << (r.widths.stable ? "true" : "false") << "\n"
     << "omega_tilde_alpha = " << r.decoupled.omega_tilde_alpha << "\n"
     << "omega_tilde_beta = " << r.decoupled.omega_tilde_beta << "\n"
     << "g_tilde = " << r.center.g_tilde << "\n"
     << "lambda_plus = " << r.center.lambda_plus << "\n"
     << "lambda_minus = " << r.center.lambda_minus << "\n"
     << "threshold_eigenvalue = " << r.center.threshold_eigenvalue << "\n"
     << "threshold_printed = " << r.center.threshold_printed << "\n"
     << "veff_curvature_origin = " << r.center.curvature_at_origin << "\n"
     << "double_well = " << (r.center.double_well ? "true" : "false") << "\n"
     << "separation = " << r.center.separation << "\n"
     << "fixed_points = " << r.center.fixed_points.size() << "\n";
  for (std::size_t i = 0; i < r.center.fixed_points.size(); ++i) {
    os << "fixed_point." << i << " = " << r.center.fixed_points[i].x_alpha << ", "
       << r.center.fixed_points[i].x_beta << "\n";
  }
  os << "miscibility_separated = " << (r.miscibility.separated ? "true" : "false") << "\n"
     << "miscibility_margin = " << r.miscibility.margin << "\n";
  if (r.coupled_n1) os << "coupled_mode_scaling_n1 = " << *r.coupled_n1 << "\n";
  for (const auto& m : r.legendre) {
    os << "legendre." << m.n << " = " << m.epsilon_analytic << ", " << m.epsilon_numeric << "\n";
  }
  os.precision(old_precision);
}

std::string stability_csv_header() {
  return "g_alpha,g_beta,g_alphabeta,omega,n_alpha,n_beta,w_alpha_eq,w_beta_eq,omega_a1,omega_a2,"
         "omega_b1,omega_b2,omega_plus_sq,omega_minus_sq,width_stable,lambda_plus,lambda_minus,"
         "threshold_eigenvalue,threshold_printed,double_well,separation,miscibility_separated,"
         "miscibility_margin";
}

std::string stability_csv_row(const Params& p, const StabilityReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << p.g_alpha() << ',' << p.g_beta() << ',' << p.g_alphabeta() << ',' << p.omega() << ','
     << p.n_alpha() << ',' << p.n_beta() << ',' << r.equilibrium.w_alpha_eq << ','
     << r.equilibrium.w_beta_eq << ',' << r.widths.omega_a1 << ',' << r.widths.omega_a2 << ','
     << r.widths.omega_b1 << ',' << r.widths.omega_b2 << ',' << r.widths.omega_plus_sq << ','
     << r.widths.omega_minus_sq << ',' << (r.widths.stable ? 1 : 0) << ',' << r.center.lambda_plus
     << ',' << r.center.lambda_minus << ',' << r.center.threshold_eigenvalue << ','
     << r.center.threshold_printed << ',' << (r.center.double_well ? 1 : 0) << ','
     << r.center.separation << ',' << (r.miscibility.separated ? 1 : 0) << ','
     << r.miscibility.margin;
  return os.str();
}

}  // namespace gpeduet
