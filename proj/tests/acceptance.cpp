// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "gpeduet/config.hpp"
#include "gpeduet/experiment.hpp"
#include "gpeduet/signal.hpp"
#include "gpeduet/solver.hpp"
#include "gpeduet/stability.hpp"
#include "gpeduet/variational.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace gpeduet;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

TwoComponentState packets(const Grid& grid, const Params& p, double xa, double xb, double wa, double wb,
                          double pa = 0.0, double pb = 0.0) {
  return {grid, gaussian_packet(grid, p.n_alpha(), xa, pa, wa), gaussian_packet(grid, p.n_beta(), xb, pb, wb)};
}

TwoComponentState advance(TwoComponentState s, const Params& p, double dt, long steps) {
  const SplitStepPropagator prop(s.grid(), p, dt);
  for (long i = 0; i < steps; ++i) prop.step(s);
  return s;
}

double l2_distance(const TwoComponentState& a, const TwoComponentState& b) {
  double s = 0.0;
  for (const auto sp : {Species::alpha, Species::beta}) {
    const auto x = a.component(sp);
    const auto y = b.component(sp);
    for (std::size_t j = 0; j < x.size(); ++j) s += std::norm(x[j] - y[j]);
  }
  return std::sqrt(s * a.grid().dx());
}

double l2_norm(const TwoComponentState& a) { return std::sqrt(norm(a.alpha(), a.grid()) + norm(a.beta(), a.grid())); }

Params random_params(testing::Rng& rng) {
  return Params(rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0.5, 2.0), rng.uniform(1, 100),
                rng.uniform(1, 100));
}

double fitted(const std::vector<double>& t, const std::vector<double>& y) { return signal::fit_sinusoid(t, y).omega; }

// 1
void legendre(Outcome& o) {
  const auto modes = legendre_spectrum_single(5, 1000);
  double worst = 0.0;
  for (const auto& m : modes) worst = std::max(worst, std::abs(m.epsilon_numeric - std::sqrt(m.n * (m.n + 1) / 2.0)));
  o.require(modes.size() == 5, "five modes");
  o.require(worst < 1e-6, "match within 1e-6");
  o.require(modes[0].epsilon_analytic == 1.0 && std::abs(modes[0].epsilon_numeric - 1.0) < 1e-10, "n = 1 at Omega");
  o.detail << "max |eps_num - eps_n| = " << worst << ", eps_1 = " << modes[0].epsilon_numeric;
}

// 2
void coupled_scaling(Outcome& o) {
  double worst = 0.0;
  for (int n = 1; n <= 8; ++n) {
    for (int k = 0; k <= 20; ++k) {
      const double c = k / 20.0;
      const double expect = std::sqrt(1.0 - c * c) * std::sqrt(n * (n + 1) / 2.0);
      worst = std::max(worst, std::abs(coupled_mode_scaling(c, n) - expect));
    }
    o.require(coupled_mode_scaling(0.0, n) == legendre_epsilon(n), "C = 0 equals single species");
    o.require(coupled_mode_scaling(1.0, n) == 0.0, "C = 1 vanishes");
  }
  o.require(worst < 1e-14, "closed form");
  const auto marginal = miscibility_criterion(Params(1.0, 1.0, 1.0, 1.0, 1.0, 1.0));
  o.require(!marginal.separated && marginal.margin == 0.0, "C = 1 is the miscibility equality");
  o.detail << "max formula deviation = " << worst;
}

// 3
void kohn(Outcome& o) {
  const Grid grid(256, 16.0);
  const std::vector<std::pair<const char*, Params>> settings = {
      {"zero", Params(0.0, 0.0, 0.0, 1.0, 10.0, 10.0)},
      {"miscible", Params(1.0, 1.0, 0.5, 1.0, 10.0, 10.0)},
      {"immiscible", Params(1.0, 1.0, 2.0, 1.0, 10.0, 10.0)},
  };
  for (const auto& [name, p] : settings) {
    EvolutionConfig c;
    c.dt = 1e-3;
    c.t_final = 5 * 2 * pi / p.omega();
    c.record_every = 20;
    const Trajectory traj = evolve(packets(grid, p, 1.0, -0.5, 1.0, 1.0), p, c);
    std::vector<double> com;
    for (const auto& s : traj.snapshots) {
      com.push_back((p.n_alpha() * s.center_alpha + p.n_beta() * s.center_beta) / p.total_particles());
    }
    const double w = fitted(traj.times, com);
    const double err = std::abs(w / p.omega() - 1.0);
    o.require(err < 0.005, name);
    o.detail << name << " omega_fit = " << w << " (rel " << err << ") ";
  }
}

// 4
void breathing(Outcome& o) {
  const Params ideal(0.0, 0.0, 0.0, 1.0, 1.0, 1.0);
  const double weq = free_equilibrium_width(1.0);
  VariationalState v;
  v.w_alpha = v.w_beta = 1.2 * weq;
  std::vector<double> t, w;
  for (const auto& s : integrate(v, ideal, 1e-3, 5 * pi, {}, 10)) {
    t.push_back(s.t);
    w.push_back(s.state.w_alpha);
  }
  const double reduced = fitted(t, w);
  o.require(std::abs(reduced / 2.0 - 1.0) < 0.01, "reduced model at 2 Omega");

  const Grid grid(256, 12.0);
  EvolutionConfig c;
  c.t_final = 5 * pi;
  c.record_every = 10;
  const Trajectory traj = evolve(packets(grid, ideal, 0.0, 0.0, 1.2 * weq, 1.2 * weq), ideal, c);
  std::vector<double> wp;
  for (const auto& s : traj.snapshots) wp.push_back(s.width_alpha);
  const double pde = fitted(traj.times, wp);
  o.require(std::abs(pde / 2.0 - 1.0) < 0.01, "solver at 2 Omega");

  const Params dense(1.0, 1.0, 0.0, 1.0, 1e3, 1e3);
  const auto d = decoupled_width_frequencies(dense);
  const double formula = std::sqrt(d.omega_tilde_alpha);
  const auto eq = equilibrium_widths(dense);
  VariationalState near;
  near.w_alpha = 1.01 * eq.w_alpha_eq;
  near.w_beta = 1.01 * eq.w_beta_eq;
  t.clear();
  w.clear();
  for (const auto& s : integrate(near, dense, 1e-3, 6 * 2 * pi / std::sqrt(3.0), {}, 10)) {
    t.push_back(s.t);
    w.push_back(s.state.w_alpha);
  }
  const double large = fitted(t, w);
  o.require(std::abs(formula / std::sqrt(3.0) - 1.0) < 0.01, "decoupled frequency at sqrt 3");
  o.require(std::abs(large / std::sqrt(3.0) - 1.0) < 0.01, "integrated large-g breathing at sqrt 3");
  o.detail << "reduced = " << reduced << ", solver = " << pde << ", gN = 1e3: formula = " << formula
           << ", integrated = " << large;
}

// 5
void conservation(Outcome& o) {
  const Grid grid(256, 14.0);
  const Params p(1.0, 0.8, 0.6, 1.0, 10.0, 10.0);
  const TwoComponentState s0 = packets(grid, p, 1.0, -0.5, 1.0, 1.2, 0.3, 0.0);
  EvolutionConfig c;
  c.dt = 1e-3;
  c.t_final = 10.0;
  c.record_every = 100;
  c.store_states = true;
  const Trajectory traj = evolve(s0, p, c);
  const Observables& last = traj.snapshots.back();
  const double norm_drift = std::max(std::abs(last.norm_alpha - 10.0), std::abs(last.norm_beta - 10.0)) / 10.0;
  o.require(traj.times.size() == 101 && std::abs(traj.times.back() - 10.0) < 1e-9, "ten thousand steps");
  o.require(norm_drift < 1e-9, "norm");
  o.require(traj.max_energy_drift < 1e-8, "energy");

  const auto forward = advance(s0, p, 1e-3, 2000);
  const auto back = advance(forward, p, -1e-3, 2000);
  const double reversal = l2_distance(back, s0) / l2_norm(s0);
  o.require(reversal < 1e-8, "time reversal");
  // Not part of the verdict: the same run at half the step, for the ledger.
  c.dt = 5e-4;
  c.record_every = 200;
  c.store_states = false;
  const double half_step = evolve(s0, p, c).max_energy_drift;
  o.detail << "norm drift = " << norm_drift << ", energy drift = " << traj.max_energy_drift
           << " (dt = 5e-4: " << half_step << "), reversal = " << reversal;
}

// 6
void normal_modes(Outcome& o) {
  testing::Rng rng(6);
  double trace_err = 0.0;
  double det_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Params p = random_params(rng);
    const WidthModeReport r = width_normal_modes(p, equilibrium_widths(p));
    const double trace = r.omega_a1 + r.omega_b1;
    const double det = r.omega_a1 * r.omega_b1 - r.omega_a2 * r.omega_b2;
    trace_err = std::max(trace_err, std::abs(r.omega_plus_sq + r.omega_minus_sq - trace) / std::abs(trace));
    det_err = std::max(det_err, std::abs(r.omega_plus_sq * r.omega_minus_sq - det) / (r.omega_a1 * r.omega_b1));
    o.require(r.stable == (det > 0.0), "flag on physical draw");
  }
  o.require(trace_err < 1e-12, "trace identity");
  o.require(det_err < 1e-12, "determinant identity");

  int flips = 0;
  for (int i = 0; i < 100; ++i) {
    const double a1 = rng.uniform(0.5, 10);
    const double b1 = rng.uniform(0.5, 10);
    const double a2 = rng.uniform(0.5, 10);
    const double edge = a1 * b1 / a2;
    const bool below = normal_modes_from_coefficients(a1, a2, b1, edge * (1 - 1e-9)).stable;
    const bool above = normal_modes_from_coefficients(a1, a2, b1, edge * (1 + 1e-9)).stable;
    flips += below && !above ? 1 : 0;
  }
  o.require(flips == 100, "flag flips at the determinant sign change");
  o.detail << "trace rel err = " << trace_err << ", det rel err = " << det_err << ", flips = " << flips << "/100";
}

// 7
void thresholds(Outcome& o) {
  testing::Rng rng(7);
  double lambda_err = 0.0;
  double marginal = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Params p = random_params(rng);
    const double w = rng.uniform(0.3, 4);
    const auto c = center_stability(p, w);
    const double omega2 = p.omega() * p.omega();
    lambda_err = std::max(lambda_err, std::abs(c.lambda_minus + omega2));
    const auto m = center_stability(p.with_g_alphabeta(c.threshold_eigenvalue), w);
    marginal = std::max({marginal, std::abs(m.lambda_plus), std::abs(m.curvature_at_origin)});
  }
  o.require(lambda_err < 1e-12, "lambda_minus = -Omega^2");
  o.require(marginal < 1e-10, "lambda_plus = 0 with V''(0) = 0");

  const auto dir = std::filesystem::temp_directory_path() / "gpeduet_acceptance_veff";
  std::filesystem::remove_all(dir);
  const ExperimentConfig cfg = parse_config(
      "mode = veff-scan\nparams.n_alpha = 1\nparams.n_beta = 1\nveff.g_values = 0, 0.5, 4\nveff.width = 1\n"
      "veff.points = 801\noutput.prefix = veff\n");
  const RunResult run_result = run(cfg, dir);
  o.require(run_result.exit_status == 0, "veff-scan run");
  std::vector<int> minima;
  for (int k = 0; k < 3; ++k) {
    std::ifstream in(dir / ("veff_veff_" + std::to_string(k) + ".csv"));
    std::string line;
    std::getline(in, line);
    std::vector<double> dx, v;
    while (std::getline(in, line)) {
      const auto comma = line.find(',');
      dx.push_back(std::stod(line.substr(0, comma)));
      v.push_back(std::stod(line.substr(comma + 1)));
    }
    int count = 0;
    double left = 0.0, right = 0.0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] < v[i - 1] && v[i] < v[i + 1]) {
        ++count;
        (dx[i] < 0 ? left : right) = dx[i];
        o.require(v[i] <= v[v.size() / 2], "minimum below V(0)");
      }
    }
    if (count == 2) o.require(std::abs(left + right) < 1e-9, "symmetric minima");
    minima.push_back(count);
  }
  o.require(minima[0] == 1 && minima[1] == 1 && minima[2] == 2, "harmonic to double well");
  const Params above(0.0, 0.0, 4.0, 1.0, 1.0, 1.0);
  const auto c = center_stability(above, 1.0);
  o.require(c.double_well && c.fixed_points.size() == 3, "two symmetric fixed points above threshold");
  o.require(effective_potential(c.separation, above, 1.0) < effective_potential(0.0, above, 1.0), "V(dx*) < V(0)");
  o.detail << "lambda_minus err = " << lambda_err << ", marginal residual = " << marginal << ", minima per curve = "
           << minima[0] << "," << minima[1] << "," << minima[2] << ", dx* = " << c.separation;
  std::filesystem::remove_all(dir);
}

// 8
void miscibility(Outcome& o) {
  const ExperimentConfig cfg = parse_config(
      "mode = sweep\nparams.g_alpha = 1\nparams.g_beta = 1\nparams.n_alpha = 50\nparams.n_beta = 50\n"
      "grid.n_points = 512\nsweep.param = g_alphabeta\nsweep.start = 0.5\nsweep.stop = 1.5\nsweep.steps = 5\n");
  const auto points = run_sweep(cfg);
  double previous = 2.0;
  for (const auto& pt : points) {
    const double overlap = pt.observables.overlap_fraction;
    o.detail << pt.value << ":" << overlap << " ";
    if (pt.value < 1.0) {
      o.require(overlap > 0.99, "overlap > 0.99 below threshold");
    } else {
      o.require(overlap < previous, "monotone above threshold");
      previous = overlap;
    }
  }
  o.require(points.back().observables.overlap_fraction < 0.9, "below 0.9 at g_ab = 1.5");
}

// 9
void cross_validation(Outcome& o) {
  const ExperimentConfig cfg = parse_config(
      "mode = compare\nparams.g_alpha = 0.5\nparams.g_beta = 0.5\nparams.g_alphabeta = 0.2\nparams.n_alpha = 1\n"
      "params.n_beta = 1\ngrid.n_points = 256\nevolution.t_final = 3.1416\nevolution.record_every = 10\n"
      "initial.alpha.x0 = 0.5\ninitial.beta.x0 = -0.3\ninitial.alpha.width = 0.8\ninitial.beta.width = 0.8\n");
  const ModelComparison cmp = compare_models(cfg);
  const double center = cmp.max_center_deviation / cmp.center_excursion;
  o.require(center < 0.05, "centers within 5%");
  o.require(cmp.max_width_deviation < 0.05, "widths within 5%");
  o.detail << "center dev / excursion = " << center << ", width rel dev = " << cmp.max_width_deviation;
}

// 10
void coherent_state(Outcome& o) {
  const Grid grid(256, 16.0);
  const Params p(1.0, 1.0, 0.5, 1.0, 10.0, 10.0);
  const GroundState gs = ground_state_imaginary_time(p, grid, 1e-9);
  EvolutionConfig c;
  c.t_final = 3 * 2 * pi;
  c.record_every = 200;
  c.store_states = true;
  const Trajectory traj = evolve(displaced(gs.state, 1.0, 0.0), p, c);
  const double d = shape_deformation(traj.states, gs.state);
  o.require(d < 0.02, "D < 0.02");
  o.detail << "D = " << d;
}

// 11
void orders(Outcome& o) {
  const Grid grid(128, 8.0);
  const Params p(1.0, 1.0, 0.5, 1.0, 5.0, 5.0);
  const TwoComponentState s0 = packets(grid, p, 0.5, -0.5, 0.8, 0.8, 0.5, 0.0);
  const double t = 0.8;
  const double fine = 0.002 / 8.0;
  const auto reference = advance(s0, p, fine, std::lround(t / fine));
  std::vector<double> dts = {0.008, 0.004, 0.002};
  std::vector<double> errs;
  for (double dt : dts) errs.push_back(l2_distance(advance(s0, p, dt, std::lround(t / dt)), reference));
  const double strang = testing::loglog_slope(dts, errs);
  o.require(std::abs(strang - 2.0) < 0.2, "strang slope");

  const Params q(1.0, 0.8, 0.6, 1.0, 10.0, 10.0);
  VariationalState v;
  v.x0_alpha = 0.8;
  v.x0_beta = -0.4;
  v.p0_beta = 0.3;
  v.w_alpha = 1.0;
  v.w_beta = 1.3;
  const auto ref = integrate(v, q, 0.0025, 4.0).back().state;
  std::vector<double> hs = {0.08, 0.04, 0.02};
  std::vector<double> rk;
  for (double h : hs) {
    const auto s = integrate(v, q, h, 4.0).back().state;
    rk.push_back(std::abs(s.x0_alpha - ref.x0_alpha) + std::abs(s.w_alpha - ref.w_alpha) +
                 std::abs(s.w_beta - ref.w_beta));
  }
  const double rk4 = testing::loglog_slope(hs, rk);
  o.require(std::abs(rk4 - 4.0) < 0.2, "rk4 slope");
  o.detail << "strang slope = " << strang << ", rk4 slope = " << rk4;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"legendre spectrum", legendre},
      {"coupled mode scaling", coupled_scaling},
      {"kohn mode", kohn},
      {"breathing modes", breathing},
      {"conservation", conservation},
      {"normal-mode algebra", normal_modes},
      {"center-mode thresholds", thresholds},
      {"miscibility oracle", miscibility},
      {"reduced vs full", cross_validation},
      {"coherent-state shape", coherent_state},
      {"integrator orders", orders},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::printf("AC%-2zu %s  %-24s %s (%.1fs)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
