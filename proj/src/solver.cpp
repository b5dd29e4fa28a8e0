#include "gpeduet/solver.hpp"

#include "gpeduet/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace gpeduet {
namespace {

using std::numbers::pi;

void check_finite(const TwoComponentState& state) {
  for (const auto s : {Species::alpha, Species::beta}) {
    for (const auto& z : state.component(s)) {
      const double a = std::abs(z);
      if (!std::isfinite(a) || a > kBlowUpAmplitude) {
        std::ostringstream msg;
        msg << "split-step: blow-up detected in component " << (s == Species::alpha ? "alpha" : "beta")
            << " (|psi| = " << a << ")";
        throw NumericalError(msg.str());
      }
    }
  }
}

void apply_kinetic(std::span<Complex> psi, std::span<const Complex> factor) {
  fft::forward(psi);
  for (std::size_t j = 0; j < psi.size(); ++j) psi[j] *= factor[j];
  fft::backward(psi);
}

std::pair<double, double> chemical_potentials(const TwoComponentState& state, const Params& params) {
  return {chemical_potential(state, params, Species::alpha),
          chemical_potential(state, params, Species::beta)};
}

TwoComponentState initial_guess(const Params& params, const Grid& grid,
                                const GroundStateOptions& options) {
  const double omega = params.omega();
  const double oscillator_length = 1.0 / std::sqrt(omega);
  const double d = options.symmetry_breaking ? options.seed_displacement * oscillator_length : 0.0;

  auto width_for = [&](Species s) {
    // Harmonic width 1/sqrt(2 Omega), or the rms width R/sqrt(5) of a
    // Thomas-Fermi parabola when interactions dominate.
    const double gn = params.g(s) * params.n(s) + params.g_alphabeta() * params.n(other(s));
    const double r_tf = gn > 0.0 ? std::sqrt(2.0 * thomas_fermi_mu(gn, omega)) / omega : 0.0;
    return std::max(1.0 / std::sqrt(2.0 * omega), r_tf / std::sqrt(5.0));
  };

  Field alpha = gaussian_packet(grid, params.n_alpha(), -d, 0.0, width_for(Species::alpha));
  Field beta = gaussian_packet(grid, params.n_beta(), d, 0.0, width_for(Species::beta));

  if (options.symmetry_breaking && options.seed_noise > 0.0) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (Field* f : {&alpha, &beta}) {
      double peak = 0.0;
      for (const auto& z : *f) peak = std::max(peak, std::abs(z));
      for (auto& z : *f) z += options.seed_noise * peak * unit(rng);
    }
    normalize(alpha, grid, params.n_alpha());
    normalize(beta, grid, params.n_beta());
  }
  return {grid, std::move(alpha), std::move(beta)};
}

}  // namespace

void EvolutionConfig::validate(const Grid& grid) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("evolution: dt must be > 0");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) {
    throw std::invalid_argument("evolution: t_final must be > 0");
  }
  if (record_every <= 0) throw std::invalid_argument("evolution: record_every must be > 0");
  const double phase = dt * grid.k_max() * grid.k_max() / 2.0;
  if (!(phase < pi)) {
    std::ostringstream msg;
    msg << "evolution: dt * k_max^2 / 2 = " << phase
        << " >= pi; reduce dt or coarsen the grid";
    throw std::invalid_argument(msg.str());
  }
}

SplitStepPropagator::SplitStepPropagator(Grid grid, Params params, double dt, TimeKind kind)
    : grid_(std::move(grid)), params_(std::move(params)), dt_(dt), kind_(kind) {
  if (!std::isfinite(dt) || dt == 0.0) throw std::invalid_argument("propagator: dt must be finite and nonzero");
  const auto x = grid_.points();
  const auto k = grid_.wavenumbers();
  const double inv_n = 1.0 / static_cast<double>(grid_.n_points());
  trap_.resize(grid_.n_points());
  kinetic_.resize(grid_.n_points());
  for (std::size_t j = 0; j < grid_.n_points(); ++j) {
    trap_[j] = 0.5 * params_.omega() * params_.omega() * x[j] * x[j];
    const double e = 0.5 * k[j] * k[j] * dt_;
    kinetic_[j] = kind_ == TimeKind::real ? std::polar(inv_n, -e) : Complex(inv_n * std::exp(-e), 0.0);
  }
}

void SplitStepPropagator::potential_half_step(TwoComponentState& state) const {
  auto a = state.alpha();
  auto b = state.beta();
  const double h = 0.5 * dt_;
  const double ga = params_.g_alpha();
  const double gb = params_.g_beta();
  const double gab = params_.g_alphabeta();
  const std::size_t n = a.size();

  if (kind_ == TimeKind::real) {
    for (std::size_t j = 0; j < n; ++j) {
      const double na = std::norm(a[j]);
      const double nb = std::norm(b[j]);
      a[j] *= std::polar(1.0, -(trap_[j] + ga * na + gab * nb) * h);
      b[j] *= std::polar(1.0, -(trap_[j] + gb * nb + gab * na) * h);
    }
    return;
  }

  // In imaginary time the densities change during the sub-step. The mean
  // field is taken from the normalized midpoint densities of the projected
  // flow, which keeps the symmetric splitting second order.
  const double dx = grid_.dx();
  std::vector<double> ma(n);
  std::vector<double> mb(n);
  const double sa = params_.n_alpha() / norm(a, grid_);
  const double sb = params_.n_beta() / norm(b, grid_);
  double ta = 0.0;
  double tb = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double na = sa * std::norm(a[j]);
    const double nb = sb * std::norm(b[j]);
    ma[j] = na * std::exp(-(trap_[j] + ga * na + gab * nb) * h);
    mb[j] = nb * std::exp(-(trap_[j] + gb * nb + gab * na) * h);
    ta += ma[j];
    tb += mb[j];
  }
  const double ra = params_.n_alpha() / (ta * dx);
  const double rb = params_.n_beta() / (tb * dx);
  for (std::size_t j = 0; j < n; ++j) {
    const double na = ra * ma[j];
    const double nb = rb * mb[j];
    a[j] *= std::exp(-(trap_[j] + ga * na + gab * nb) * h);
    b[j] *= std::exp(-(trap_[j] + gb * nb + gab * na) * h);
  }
}

void SplitStepPropagator::step(TwoComponentState& state) const {
  if (!(state.grid() == grid_)) throw std::invalid_argument("propagator: state lives on a different grid");
  potential_half_step(state);
  apply_kinetic(state.alpha(), kinetic_);
  apply_kinetic(state.beta(), kinetic_);
  potential_half_step(state);
  check_finite(state);
}

TwoComponentState step_real_time(TwoComponentState state, const Params& params, double dt) {
  EvolutionConfig bound;
  bound.dt = std::abs(dt);
  bound.t_final = bound.dt;
  bound.validate(state.grid());
  SplitStepPropagator(state.grid(), params, dt).step(state);
  return state;
}

Trajectory evolve(TwoComponentState state, const Params& params, const EvolutionConfig& config) {
  config.validate(state.grid());
  const SplitStepPropagator propagator(state.grid(), params, config.dt);
  const long n_steps = std::max(1L, std::lround(config.t_final / config.dt));

  Trajectory traj;
  double e0 = 0.0;
  auto record = [&](long step) {
    const double t = static_cast<double>(step) * config.dt;
    Observables o = observables(state, params);
    if (step == 0) e0 = o.energy;
    const double drift = std::abs(o.energy - e0) / std::max(std::abs(e0), 1e-300);
    traj.max_energy_drift = std::max(traj.max_energy_drift, drift);
    traj.times.push_back(t);
    traj.snapshots.push_back(o);
    if (config.store_states) traj.states.push_back(state);
  };

  record(0);
  for (long step = 1; step <= n_steps; ++step) {
    try {
      propagator.step(state);
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << e.what() << " at t = " << static_cast<double>(step) * config.dt;
      throw NumericalError(msg.str());
    }
    if (step % config.record_every == 0 || step == n_steps) record(step);
  }
  traj.energy_drift_exceeded = traj.max_energy_drift > config.energy_drift_tolerance;
  return traj;
}

GroundState ground_state_imaginary_time(const Params& params, const Grid& grid, double tol,
                                        const GroundStateOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("ground_state: tol must be > 0");
  if (!(options.dtau > 0.0)) throw std::invalid_argument("ground_state: dtau must be > 0");
  if (options.check_every <= 0 || options.max_iterations <= 0) {
    throw std::invalid_argument("ground_state: check_every and max_iterations must be > 0");
  }

  TwoComponentState state = initial_guess(params, grid, options);
  long iterations = 0;

  struct Stage {
    double dtau;
    double tol;
  };
  const Stage stages[] = {{10.0 * options.dtau, 10.0 * tol}, {options.dtau, tol}};

  auto [mu_a, mu_b] = chemical_potentials(state, params);
  for (const Stage& stage : stages) {
    const SplitStepPropagator propagator(grid, params, stage.dtau, TimeKind::imaginary);
    bool converged = false;
    while (!converged) {
      const TwoComponentState previous = state;
      for (int i = 0; i < options.check_every; ++i) {
        try {
          propagator.step(state);
        } catch (const NumericalError& e) {
          throw NumericalError(std::string("ground_state: ") + e.what());
        }
        normalize(state.alpha(), grid, params.n_alpha());
        normalize(state.beta(), grid, params.n_beta());
      }
      iterations += options.check_every;
      const auto [next_a, next_b] = chemical_potentials(state, params);
      // The chemical potential is stationary in the state error, so it alone
      // stops too early; also require the per-unit-time state change
      // |dpsi/dtau| / sqrt(N) to fall below tol.
      const double elapsed = options.check_every * stage.dtau;
      double rate = 0.0;
      for (const auto s : {Species::alpha, Species::beta}) {
        const auto now = state.component(s);
        const auto before = previous.component(s);
        double d = 0.0;
        for (std::size_t j = 0; j < now.size(); ++j) d += std::norm(now[j] - before[j]);
        rate = std::max(rate, std::sqrt(d * grid.dx() / params.n(s)) / elapsed);
      }
      converged = std::abs(next_a - mu_a) < stage.tol && std::abs(next_b - mu_b) < stage.tol &&
                  rate < stage.tol;
      mu_a = next_a;
      mu_b = next_b;
      if (!converged && iterations >= options.max_iterations) {
        std::ostringstream msg;
        msg << "ground_state: no convergence after " << iterations << " iterations (mu = " << mu_a
            << ", " << mu_b << ")";
        throw NumericalError(msg.str());
      }
    }
  }
  return {std::move(state), mu_a, mu_b, iterations};
}

TwoComponentState displaced(const TwoComponentState& state, double shift, double p0) {
  const Grid& grid = state.grid();
  const auto x = grid.points();
  const auto k = grid.wavenumbers();
  const double inv_n = 1.0 / static_cast<double>(grid.n_points());
  const std::size_t nyquist = grid.n_points() / 2;
  auto move = [&](std::span<const Complex> psi) {
    Field f(psi.begin(), psi.end());
    fft::forward(f);
    for (std::size_t j = 0; j < f.size(); ++j) {
      f[j] = j == nyquist ? Complex{} : f[j] * std::polar(inv_n, -k[j] * shift);
    }
    fft::backward(f);
    for (std::size_t j = 0; j < f.size(); ++j) f[j] *= std::polar(1.0, p0 * (x[j] - 0.5 * shift));
    return f;
  };
  return {grid, move(state.alpha()), move(state.beta())};
}

std::vector<double> shape_deformation_series(std::span<const TwoComponentState> states,
                                             const TwoComponentState& reference) {
  const Grid& grid = reference.grid();
  const std::size_t n = grid.n_points();
  const auto k = grid.wavenumbers();
  const double inv_n = 1.0 / static_cast<double>(n);

  struct Reference {
    std::vector<double> density;
    Field spectrum;
    double norm;
    double center;
    double width;
  };
  auto prepare = [&](std::span<const Complex> psi) {
    std::vector<double> density(n);
    Field f(n);
    for (std::size_t j = 0; j < n; ++j) f[j] = density[j] = std::norm(psi[j]);
    fft::forward(f);
    return Reference{std::move(density), std::move(f), norm(psi, grid), mean_position(psi, grid),
                     position_spread(psi, grid)};
  };
  const Reference refs[] = {prepare(reference.alpha()), prepare(reference.beta())};

  Field shifted(n);
  auto l1_at = [&](const Reference& ref, std::span<const Complex> psi, double a) {
    if (a == 0.0) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += std::abs(std::norm(psi[j]) - ref.density[j]);
      return s * grid.dx() / (2.0 * ref.norm);
    }
    for (std::size_t j = 0; j < n; ++j) shifted[j] = ref.spectrum[j] * std::polar(inv_n, -k[j] * a);
    fft::backward(shifted);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::abs(std::norm(psi[j]) - shifted[j].real());
    return s * grid.dx() / (2.0 * ref.norm);
  };

  std::vector<double> series;
  series.reserve(states.size());
  for (const auto& state : states) {
    if (!(state.grid() == grid)) {
      throw std::invalid_argument("shape_deformation: state and reference grids differ");
    }
    double d_max = 0.0;
    for (const auto s : {Species::alpha, Species::beta}) {
      const Reference& ref = refs[s == Species::alpha ? 0 : 1];
      const auto psi = state.component(s);
      const double a0 = mean_position(psi, grid) - ref.center;
      const double half_window = std::max(0.5 * ref.width, 4.0 * grid.dx());
      // Golden-section search for the best rigid shift near the centroid offset.
      const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
      double lo = a0 - half_window;
      double hi = a0 + half_window;
      double m1 = hi - ratio * (hi - lo);
      double m2 = lo + ratio * (hi - lo);
      double f1 = l1_at(ref, psi, m1);
      double f2 = l1_at(ref, psi, m2);
      while (hi - lo > 1e-6 * grid.dx()) {
        if (f1 < f2) {
          hi = m2;
          m2 = m1;
          f2 = f1;
          m1 = hi - ratio * (hi - lo);
          f1 = l1_at(ref, psi, m1);
        } else {
          lo = m1;
          m1 = m2;
          f1 = f2;
          m2 = lo + ratio * (hi - lo);
          f2 = l1_at(ref, psi, m2);
        }
      }
      const double best = std::min({f1, f2, l1_at(ref, psi, a0)});
      d_max = std::max(d_max, best);
    }
    series.push_back(std::clamp(d_max, 0.0, 1.0));
  }
  return series;
}

double shape_deformation(std::span<const TwoComponentState> states,
                         const TwoComponentState& reference) {
  const auto series = shape_deformation_series(states, reference);
  return series.empty() ? 0.0 : *std::max_element(series.begin(), series.end());
}

}  // namespace gpeduet
