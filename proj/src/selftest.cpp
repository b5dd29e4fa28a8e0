#include "gpeduet/selftest.hpp"

#include "gpeduet/config.hpp"
#include "gpeduet/core.hpp"
#include "gpeduet/solver.hpp"
#include "gpeduet/stability.hpp"
#include "gpeduet/variational.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace gpeduet {
namespace {

using Check = std::function<double()>;  // returns the measured error

struct Case {
  const char* name;
  double tolerance;
  Check measure;
};

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double gaussian_moments() {
  const Grid grid(256, 8.0);
  const Field psi = gaussian_packet(grid, 1.0, 0.0, 0.0, 1.0);
  return std::max({std::abs(norm(psi, grid) - 1.0), std::abs(mean_position(psi, grid)),
                   std::abs(position_spread(psi, grid) - 1.0)});
}

double strang_norm() {
  const Grid grid(256, 12.0);
  const Params p(1.0, 0.8, 0.5, 1.0, 10.0, 5.0);
  TwoComponentState s(grid, gaussian_packet(grid, 10.0, 0.5, 0.3, 1.0), gaussian_packet(grid, 5.0, -0.5, 0.0, 0.8));
  s = step_real_time(std::move(s), p, 1e-3);
  return std::max(relative(norm(s.alpha(), grid), 10.0), relative(norm(s.beta(), grid), 5.0));
}

double kohn_period() {
  const Grid grid(128, 10.0);
  const Params p(0.0, 0.0, 0.0, 1.0, 1.0, 1.0);
  const double w = free_equilibrium_width(1.0);
  TwoComponentState s(grid, gaussian_packet(grid, 1.0, 1.0, 0.0, w), gaussian_packet(grid, 1.0, -1.0, 0.0, w));
  const int steps = 2000;
  const SplitStepPropagator prop(grid, p, 2.0 * std::numbers::pi / steps);
  for (int i = 0; i < steps; ++i) prop.step(s);
  return std::max(std::abs(mean_position(s.alpha(), grid) - 1.0), std::abs(mean_position(s.beta(), grid) + 1.0));
}

double momentum_balance() {
  const Params p(1.0, 2.0, 1.5, 1.3, 7.0, 3.0);
  VariationalState v;
  v.x0_alpha = 0.4;
  v.x0_beta = -0.2;
  v.w_alpha = 0.8;
  v.w_beta = 1.1;
  const VariationalState d = ehrenfest_rhs(v, p);
  const double lhs = p.n_alpha() * d.p0_alpha + p.n_beta() * d.p0_beta;
  const double rhs = -p.omega() * p.omega() * (p.n_alpha() * v.x0_alpha + p.n_beta() * v.x0_beta);
  return std::abs(lhs - rhs);
}

double equilibrium_residual() {
  const Params p(1.0, 0.7, 0.4, 1.0, 20.0, 30.0);
  const auto eq = equilibrium_widths(p);
  VariationalState v;
  v.w_alpha = eq.w_alpha_eq;
  v.w_beta = eq.w_beta_eq;
  const VariationalState d = ehrenfest_rhs(v, p);
  return std::max(std::abs(d.v_alpha), std::abs(d.v_beta));
}

double legendre_low_modes() {
  double err = 0.0;
  for (const auto& m : legendre_spectrum_single(3, 200)) {
    err = std::max(err, std::abs(m.epsilon_numeric - m.epsilon_analytic));
  }
  return err;
}

double normal_mode_identities() {
  const auto r = normal_modes_from_coefficients(5.0, 0.7, 4.0, 1.1);
  return std::max(std::abs(r.omega_plus_sq + r.omega_minus_sq - 9.0),
                  std::abs(r.omega_plus_sq * r.omega_minus_sq - (20.0 - 0.77)));
}

double coupled_endpoints() {
  return std::max(std::abs(coupled_mode_scaling(0.0, 2) - legendre_epsilon(2)),
                  std::abs(coupled_mode_scaling(1.0, 2)));
}

double config_defaults() {
  const ExperimentConfig c = parse_config("mode = ground\n");
  return c.n_points == 1024 && c.dt == 1e-3 && c.params.omega() == 1.0 ? 0.0 : 1.0;
}

}  // namespace

std::vector<SelfTestResult> run_selftest() {
  const Case cases[] = {
      {"gaussian_moments", 1e-6, gaussian_moments},
      {"strang_norm_conservation", 1e-12, strang_norm},
      {"kohn_period", 1e-6, kohn_period},
      {"reduced_momentum_balance", 1e-12, momentum_balance},
      {"equilibrium_width_residual", 1e-10, equilibrium_residual},
      {"legendre_low_modes", 1e-6, legendre_low_modes},
      {"normal_mode_identities", 1e-12, normal_mode_identities},
      {"coupled_scaling_endpoints", 0.0, coupled_endpoints},
      {"config_defaults", 0.0, config_defaults},
  };
  std::vector<SelfTestResult> out;
  for (const auto& c : cases) {
    SelfTestResult r{c.name, false, ""};
    try {
      const double err = c.measure();
      std::ostringstream msg;
      msg << "error " << err << " (tolerance " << c.tolerance << ")";
      r.passed = err <= c.tolerance;
      r.detail = msg.str();
    } catch (const std::exception& e) {
      r.detail = std::string("threw: ") + e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace gpeduet
