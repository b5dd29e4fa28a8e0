#include "gpeduet/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gpeduet {
namespace {

using std::numbers::pi;
const double kSqrtTwoPi = std::sqrt(2.0 * pi);
const double kSqrtPi = std::sqrt(pi);

struct Jacobian2 {
  double aa, ab, ba, bb;
};

Jacobian2 width_jacobian(const Params& p, double a, double b) {
  const double omega2 = p.omega() * p.omega();
  const double w2 = a * a + b * b;
  const double w3 = w2 * std::sqrt(w2);
  const double cross_a = p.g_alphabeta() * p.n_beta() / (2.0 * kSqrtTwoPi * w3);
  const double cross_b = p.g_alphabeta() * p.n_alpha() / (2.0 * kSqrtTwoPi * w3);
  return {
      -1.0 / (2.0 * a * a * a) - 2.0 * omega2 * a - p.g_alpha() * p.n_alpha() / (4.0 * kSqrtPi * a * a) -
          cross_a * a,
      -cross_a * b,
      -cross_b * a,
      -1.0 / (2.0 * b * b * b) - 2.0 * omega2 * b - p.g_beta() * p.n_beta() / (4.0 * kSqrtPi * b * b) -
          cross_b * b,
  };
}

double max_abs(std::pair<double, double> r) { return std::max(std::abs(r.first), std::abs(r.second)); }

// Root of a function decreasing in w on (0, inf).
template <typename F>
double bisect_decreasing(F f, double guess) {
  double lo = guess;
  double hi = guess;
  while (f(lo) < 0.0) lo *= 0.5;
  while (f(hi) > 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double VariationalState::total_width() const { return std::sqrt(w_alpha * w_alpha + w_beta * w_beta); }

double VariationalState::sigma_alpha(double omega) const { return w_alpha / free_equilibrium_width(omega); }

double VariationalState::sigma_beta(double omega) const { return w_beta / free_equilibrium_width(omega); }

VariationalState& VariationalState::operator+=(const VariationalState& o) {
  x0_alpha += o.x0_alpha;
  p0_alpha += o.p0_alpha;
  x0_beta += o.x0_beta;
  p0_beta += o.p0_beta;
  w_alpha += o.w_alpha;
  v_alpha += o.v_alpha;
  w_beta += o.w_beta;
  v_beta += o.v_beta;
  return *this;
}

VariationalState& VariationalState::operator*=(double s) {
  x0_alpha *= s;
  p0_alpha *= s;
  x0_beta *= s;
  p0_beta *= s;
  w_alpha *= s;
  v_alpha *= s;
  w_beta *= s;
  v_beta *= s;
  return *this;
}

double free_equilibrium_width(double omega) { return std::pow(4.0 * omega * omega, -0.25); }

VariationalState ehrenfest_rhs(const VariationalState& v, const Params& params,
                               const ReducedModelOptions& options) {
  if (!(v.w_alpha > 0.0) || !(v.w_beta > 0.0)) {
    throw std::invalid_argument("ehrenfest_rhs: widths must be > 0");
  }
  const double omega2 = params.omega() * params.omega();
  const double gab = params.g_alphabeta();
  const double dx = v.delta_x();
  const double w2 = v.w_alpha * v.w_alpha + v.w_beta * v.w_beta;
  const double w = std::sqrt(w2);
  const double gauss = std::exp(-dx * dx / (2.0 * w2));

  // Gaussian-overlap force on the relative coordinate, per unit partner number.
  const double force = gab * dx * gauss / (kSqrtTwoPi * w2 * w);

  const double overlap = 0.5 * gab * gauss / std::sqrt(2.0 * pi * w2);
  const double bracket_alpha = 1.0 + 2.0 * v.x0_alpha * dx / w2;
  const double bracket_beta =
      options.literal_mode ? 1.0 + 2.0 * v.x0_beta * dx / w2 : 1.0 - 2.0 * v.x0_beta * dx / w2;

  auto moment_rhs = [&](double ws, double g, double n, double n_partner, double bracket) {
    return 1.0 / (4.0 * ws * ws) - omega2 * ws * ws + g * n / (4.0 * kSqrtPi * ws) +
           overlap * n_partner * bracket;
  };
  const double rhs_alpha =
      moment_rhs(v.w_alpha, params.g_alpha(), params.n_alpha(), params.n_beta(), bracket_alpha);
  const double rhs_beta =
      moment_rhs(v.w_beta, params.g_beta(), params.n_beta(), params.n_alpha(), bracket_beta);

  const double chirp_alpha = options.printed_width_kinetics ? v.v_alpha * v.v_alpha : 0.0;
  const double chirp_beta = options.printed_width_kinetics ? v.v_beta * v.v_beta : 0.0;

  VariationalState d;
  d.x0_alpha = v.p0_alpha;
  d.p0_alpha = -omega2 * v.x0_alpha + params.n_beta() * force;
  d.x0_beta = v.p0_beta;
  d.p0_beta = -omega2 * v.x0_beta - params.n_alpha() * force;
  d.w_alpha = v.v_alpha;
  d.v_alpha = (rhs_alpha - chirp_alpha) / v.w_alpha;
  d.w_beta = v.v_beta;
  d.v_beta = (rhs_beta - chirp_beta) / v.w_beta;
  return d;
}

std::vector<VariationalSample> integrate(const VariationalState& v0, const Params& params, double dt,
                                         double t_final, const ReducedModelOptions& options,
                                         int record_every) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("integrate: dt must be > 0");
  if (!(t_final >= 0.0)) throw std::invalid_argument("integrate: t_final must be >= 0");
  if (record_every <= 0) throw std::invalid_argument("integrate: record_every must be > 0");
  if (!(v0.w_alpha > 0.0) || !(v0.w_beta > 0.0)) {
    throw std::invalid_argument("integrate: initial widths must be > 0");
  }

  const long n_steps = std::lround(t_final / dt);
  std::vector<VariationalSample> out;
  out.reserve(static_cast<std::size_t>(n_steps / record_every + 2));
  out.push_back({0.0, v0});

  auto collapse = [](double t) {
    std::ostringstream msg;
    msg << "integrate: width collapse at t = " << t;
    return NumericalError(msg.str());
  };

  VariationalState v = v0;
  for (long step = 1; step <= n_steps; ++step) {
    const double t = static_cast<double>(step) * dt;
    try {
      const VariationalState k1 = ehrenfest_rhs(v, params, options);
      const VariationalState k2 = ehrenfest_rhs(v + (0.5 * dt) * k1, params, options);
      const VariationalState k3 = ehrenfest_rhs(v + (0.5 * dt) * k2, params, options);
      const VariationalState k4 = ehrenfest_rhs(v + dt * k3, params, options);
      v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const std::invalid_argument&) {
      throw collapse(t);
    }
    if (!(v.w_alpha > 0.0) || !(v.w_beta > 0.0) || !std::isfinite(v.x0_alpha + v.x0_beta)) {
      throw collapse(t);
    }
    if (step % record_every == 0 || step == n_steps) out.push_back({t, v});
  }
  return out;
}

double center_of_mass_energy(const VariationalState& v, const Params& params) {
  const double n = params.total_particles();
  const double x = (params.n_alpha() * v.x0_alpha + params.n_beta() * v.x0_beta) / n;
  const double p = (params.n_alpha() * v.p0_alpha + params.n_beta() * v.p0_beta) / n;
  return 0.5 * (p * p + params.omega() * params.omega() * x * x);
}

std::pair<double, double> width_residuals(const Params& params, double w_alpha, double w_beta) {
  const double omega2 = params.omega() * params.omega();
  const double w = std::sqrt(w_alpha * w_alpha + w_beta * w_beta);
  const double cross = params.g_alphabeta() / (2.0 * kSqrtTwoPi * w);
  auto r = [&](double ws, double g, double n, double n_partner) {
    return 1.0 / (4.0 * ws * ws) - omega2 * ws * ws + g * n / (4.0 * kSqrtPi * ws) + cross * n_partner;
  };
  return {r(w_alpha, params.g_alpha(), params.n_alpha(), params.n_beta()),
          r(w_beta, params.g_beta(), params.n_beta(), params.n_alpha())};
}

EquilibriumWidths equilibrium_widths(const Params& params) {
  constexpr double kTarget = 1e-13;
  constexpr int kMaxNewton = 200;
  double a = free_equilibrium_width(params.omega());
  double b = a;
  int iterations = 0;

  auto newton = [&](int budget) {
    auto r = width_residuals(params, a, b);
    for (int it = 0; it < budget && max_abs(r) > kTarget; ++it, ++iterations) {
      const Jacobian2 j = width_jacobian(params, a, b);
      const double det = j.aa * j.bb - j.ab * j.ba;
      const double da = -(j.bb * r.first - j.ab * r.second) / det;
      const double db = -(-j.ba * r.first + j.aa * r.second) / det;
      double lambda = 1.0;
      bool accepted = false;
      for (int halving = 0; halving < 40; ++halving, lambda *= 0.5) {
        const double na = a + lambda * da;
        const double nb = b + lambda * db;
        if (!(na > 0.0) || !(nb > 0.0)) continue;
        const auto nr = width_residuals(params, na, nb);
        if (max_abs(nr) < max_abs(r)) {
          a = na;
          b = nb;
          r = nr;
          accepted = true;
          break;
        }
      }
      if (!accepted) return false;
    }
    return max_abs(r) <= kTarget;
  };

  if (!newton(kMaxNewton)) {
    // Each residual decreases monotonically in its own width, so alternating
    // one-dimensional bisections always bracket a root; Newton then polishes.
    for (int sweep = 0; sweep < 500; ++sweep, ++iterations) {
      const double prev_a = a;
      const double prev_b = b;
      a = bisect_decreasing([&](double w) { return width_residuals(params, w, b).first; }, a);
      b = bisect_decreasing([&](double w) { return width_residuals(params, a, w).second; }, b);
      if (std::abs(a - prev_a) < 1e-14 * a && std::abs(b - prev_b) < 1e-14 * b) break;
    }
    newton(kMaxNewton);
  }

  const auto r = width_residuals(params, a, b);
  if (!(max_abs(r) < 1e-12)) {
    std::ostringstream msg;
    msg << "equilibrium_widths: residuals (" << r.first << ", " << r.second
        << ") did not reach 1e-12";
    throw NumericalError(msg.str());
  }
  return {a, b, r.first, r.second, iterations};
}

double effective_potential(double delta_x, const Params& params, double w) {
  if (!(w > 0.0)) throw std::invalid_argument("effective_potential: w must be > 0");
  const double omega2 = params.omega() * params.omega();
  return 0.5 * omega2 * delta_x * delta_x +
         params.total_particles() / kSqrtTwoPi * params.g_alphabeta() / w *
             std::exp(-delta_x * delta_x / (2.0 * w * w));
}

}  // namespace gpeduet
