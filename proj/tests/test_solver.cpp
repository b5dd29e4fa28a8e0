#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpeduet/signal.hpp"
#include "gpeduet/solver.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace gpeduet;
using std::numbers::pi;

namespace {

double l2_distance(const TwoComponentState& a, const TwoComponentState& b) {
  double s = 0.0;
  for (const auto sp : {Species::alpha, Species::beta}) {
    const auto x = a.component(sp);
    const auto y = b.component(sp);
    for (std::size_t j = 0; j < x.size(); ++j) s += std::norm(x[j] - y[j]);
  }
  return std::sqrt(s * a.grid().dx());
}

double l2_norm(const TwoComponentState& a) {
  return std::sqrt(norm(a.alpha(), a.grid()) + norm(a.beta(), a.grid()));
}

TwoComponentState packets(const Grid& grid, const Params& p, double xa, double xb, double wa, double wb,
                          double pa = 0.0, double pb = 0.0) {
  return {grid, gaussian_packet(grid, p.n_alpha(), xa, pa, wa), gaussian_packet(grid, p.n_beta(), xb, pb, wb)};
}

TwoComponentState advance(TwoComponentState s, const Params& p, double dt, long steps) {
  const SplitStepPropagator prop(s.grid(), p, dt);
  for (long i = 0; i < steps; ++i) prop.step(s);
  return s;
}

std::vector<double> center_of_mass(const Trajectory& traj, const Params& p) {
  std::vector<double> x;
  for (const auto& o : traj.snapshots) {
    x.push_back((p.n_alpha() * o.center_alpha + p.n_beta() * o.center_beta) / p.total_particles());
  }
  return x;
}

}  // namespace

TEST_CASE("evolution config enforces the kinetic phase bound") {
  EvolutionConfig c;
  CHECK_THROWS_AS(c.validate(Grid(1024, 16.0)), std::invalid_argument);
  CHECK_NOTHROW(c.validate(Grid(1024, 32.0)));
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(Grid(256, 16.0)), std::invalid_argument);
  c.dt = 1e-3;
  c.record_every = 0;
  CHECK_THROWS_AS(c.validate(Grid(256, 16.0)), std::invalid_argument);
}

TEST_CASE("linear ground state picks up only a global phase") {
  const Grid grid(256, 10.0);
  const Params p(0.0, 0.0, 0.0, 1.0, 1.0, 1.0);
  const double w = std::sqrt(0.5);
  const TwoComponentState s0 = packets(grid, p, 0.0, 0.0, w, w);
  const double dt = 1e-3;
  const TwoComponentState s1 = step_real_time(s0, p, dt);
  const Complex phase = std::polar(1.0, -0.5 * dt);
  double dev = 0.0;
  for (std::size_t j = 0; j < grid.n_points(); ++j) dev = std::max(dev, std::abs(s1.alpha()[j] - phase * s0.alpha()[j]));
  CHECK(dev < 1e-10);
}

TEST_CASE("displaced linear packet follows the classical orbit") {
  const Grid grid(256, 12.0);
  const Params p(0.0, 0.0, 0.0, 1.0, 1.0, 1.0);
  const double w = std::sqrt(0.5);
  const TwoComponentState s0 = packets(grid, p, 1.0, 1.0, w, w);
  // A coarse run against the exact orbit cos t, refined run checks the period.
  const int steps = 4000;
  const double dt = 2.0 * pi / steps;
  TwoComponentState s = s0;
  const SplitStepPropagator prop(grid, p, dt);
  double worst = 0.0;
  for (int i = 1; i <= steps; ++i) {
    prop.step(s);
    if (i % 250 == 0) worst = std::max(worst, std::abs(mean_position(s.alpha(), grid) - std::cos(i * dt)));
  }
  CHECK(worst < 1e-6);
  CHECK(std::abs(mean_position(s.alpha(), grid) - 1.0) < 1e-6);
  CHECK(std::abs(position_spread(s.alpha(), grid) - w) < 1e-6);
}

TEST_CASE("per-step norm conservation on random inputs") {
  testing::Rng rng(101);
  const Grid grid(256, 16.0);
  for (int trial = 0; trial < 25; ++trial) {
    const Params p(rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0, 5), rng.uniform(0.5, 2.0),
                   rng.uniform(1, 50), rng.uniform(1, 50));
    const TwoComponentState s0 = packets(grid, p, rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.5, 1.5),
                                         rng.uniform(0.5, 1.5), rng.uniform(-2, 2), rng.uniform(-2, 2));
    const TwoComponentState s1 = step_real_time(s0, p, 1e-3);
    CHECK(std::abs(norm(s1.alpha(), grid) - p.n_alpha()) / p.n_alpha() < 1e-12);
    CHECK(std::abs(norm(s1.beta(), grid) - p.n_beta()) / p.n_beta() < 1e-12);
  }
}

TEST_CASE("blow-up and grid mismatch are reported") {
  const Grid grid(64, 8.0);
  const Params p(1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
  TwoComponentState bad(grid, Field(64, Complex(2e6, 0.0)), Field(64, 1.0));
  const SplitStepPropagator prop(grid, p, 1e-3);
  CHECK_THROWS_AS(prop.step(bad), NumericalError);
  TwoComponentState nan(grid, Field(64, Complex(NAN, 0.0)), Field(64, 1.0));
  CHECK_THROWS_AS(prop.step(nan), NumericalError);
  TwoComponentState other(Grid(64, 4.0), Field(64, 1.0), Field(64, 1.0));
  CHECK_THROWS_AS(prop.step(other), std::invalid_argument);
}

TEST_CASE("trajectory bookkeeping") {
  const Grid grid(128, 10.0);
  const Params p(1.0, 0.5, 0.3, 1.0, 3.0, 2.0);
  EvolutionConfig c;
  c.t_final = 0.35;
  c.record_every = 100;
  c.store_states = true;
  const Trajectory t = evolve(packets(grid, p, 0.5, -0.5, 1.0, 1.0), p, c);
  REQUIRE(t.times.size() == 5);
  CHECK(t.times.back() == doctest::Approx(0.35));
  CHECK(t.snapshots.size() == t.times.size());
  CHECK(t.states.size() == t.times.size());
  for (std::size_t i = 1; i < t.times.size(); ++i) CHECK(t.times[i] > t.times[i - 1]);

  c.energy_drift_tolerance = 1e-16;
  c.store_states = false;
  const Trajectory flagged = evolve(packets(grid, p, 1.5, -0.5, 0.8, 1.0), p, c);
  CHECK(flagged.energy_drift_exceeded);
  CHECK(flagged.states.empty());
}

TEST_CASE("decoupled components evolve bit-identically") {
  const Grid grid(256, 12.0);
  const Params p(1.5, 0.7, 0.0, 1.0, 5.0, 3.0);
  const TwoComponentState first = packets(grid, p, 1.0, -2.0, 0.9, 1.2, 0.0, 0.5);
  const TwoComponentState second = packets(grid, p, 1.0, 0.5, 0.9, 0.6, 0.0, -1.0);
  const auto a = advance(first, p, 1e-3, 500);
  const auto b = advance(second, p, 1e-3, 500);
  bool identical = true;
  for (std::size_t j = 0; j < grid.n_points(); ++j) identical = identical && a.alpha()[j] == b.alpha()[j];
  CHECK(identical);
}

TEST_CASE("norm over ten thousand steps and time reversal") {
  const Grid grid(256, 14.0);
  const Params p(1.0, 0.8, 0.6, 1.0, 10.0, 10.0);
  const TwoComponentState s0 = packets(grid, p, 1.0, -0.5, 1.0, 1.2, 0.3, 0.0);
  const auto s1 = advance(s0, p, 1e-3, 10000);
  CHECK(std::abs(norm(s1.alpha(), grid) - 10.0) / 10.0 < 1e-9);
  CHECK(std::abs(norm(s1.beta(), grid) - 10.0) / 10.0 < 1e-9);

  const auto forward = advance(s0, p, 1e-3, 2000);
  const auto back = advance(forward, p, -1e-3, 2000);
  CHECK(l2_distance(back, s0) / l2_norm(s0) < 1e-8);
}

TEST_CASE("strang splitting is second order") {
  const Grid grid(128, 8.0);
  const Params p(1.0, 1.0, 0.5, 1.0, 5.0, 5.0);
  const TwoComponentState s0 = packets(grid, p, 0.5, -0.5, 0.8, 0.8, 0.5, 0.0);
  const double t_final = 0.8;
  const auto reference = advance(s0, p, 0.002 / 8.0, std::lround(t_final / (0.002 / 8.0)));
  std::vector<double> dts = {0.008, 0.004, 0.002};
  std::vector<double> errs;
  for (double dt : dts) errs.push_back(l2_distance(advance(s0, p, dt, std::lround(t_final / dt)), reference));
  CHECK(errs[1] / errs[0] == doctest::Approx(0.25).epsilon(0.1));
  CHECK(testing::loglog_slope(dts, errs) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("kohn mode for arbitrary couplings") {
  const Grid grid(256, 16.0);
  for (const Params& p : {Params(0.0, 0.0, 0.0, 1.0, 5.0, 5.0), Params(1.0, 2.0, 0.8, 1.3, 4.0, 9.0),
                          Params(1.0, 1.0, 2.0, 0.8, 10.0, 10.0)}) {
    const TwoComponentState s0 = packets(grid, p, 1.0, 1.0 - 1.5, 0.9, 1.1);
    EvolutionConfig c;
    c.dt = 2e-3;
    c.t_final = 5 * 2 * pi / p.omega();
    c.record_every = 10;
    const Trajectory traj = evolve(s0, p, c);
    const auto fit = signal::fit_sinusoid(traj.times, center_of_mass(traj, p));
    CHECK(fit.omega == doctest::Approx(p.omega()).epsilon(0.005));
  }
}

TEST_CASE("linear imaginary-time ground state") {
  const Grid grid(256, 10.0);
  const Params p(0.0, 0.0, 0.0, 1.0, 1.0, 2.0);
  const GroundState gs = ground_state_imaginary_time(p, grid, 1e-10);
  CHECK(std::abs(gs.mu_alpha - 0.5) < 1e-6);
  CHECK(std::abs(gs.mu_beta - 0.5) < 1e-6);
  CHECK(std::abs(position_spread(gs.state.alpha(), grid) - std::sqrt(0.5)) < 1e-6);
  CHECK(norm(gs.state.beta(), grid) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("strongly interacting ground state approaches thomas-fermi") {
  const Grid grid(512, 16.0);
  const Params p(1.0, 1.0, 0.0, 1.0, 50.0, 1.0);
  const GroundState gs = ground_state_imaginary_time(p, grid, 1e-9);
  // Oracle: N = int max(mu - x^2/2, 0) dx / g solved for mu by bisection.
  const double mu_tf = testing::bisect(
      [&](double m) {
        const double r = std::sqrt(2.0 * m);
        return testing::simpson([&](double x) { return m - 0.5 * x * x; }, -r, r, 200) - 50.0;
      },
      0.1, 100.0);
  CHECK(gs.mu_alpha == doctest::Approx(mu_tf).epsilon(0.02));
}

TEST_CASE("far past threshold the relaxed components separate") {
  const Grid grid(512, 20.0);
  const Params p(1.0, 1.0, 2.0, 1.0, 30.0, 30.0);
  const GroundState gs = ground_state_imaginary_time(p, grid, 1e-8);
  CHECK(overlap_fraction(gs.state) < 0.5);
  const GroundState again = ground_state_imaginary_time(p, grid, 1e-8);
  CHECK(again.mu_alpha == gs.mu_alpha);
}

TEST_CASE("ground state input validation and non-convergence") {
  const Grid grid(128, 10.0);
  const Params p(1.0, 1.0, 0.5, 1.0, 10.0, 10.0);
  CHECK_THROWS_AS(ground_state_imaginary_time(p, grid, 0.0), std::invalid_argument);
  GroundStateOptions o;
  o.max_iterations = 200;
  CHECK_THROWS_AS(ground_state_imaginary_time(p, grid, 1e-14, o), NumericalError);
}

TEST_CASE("relaxed state is stationary in real time") {
  const Grid grid(256, 16.0);
  const Params p(1.0, 0.8, 0.5, 1.0, 10.0, 10.0);
  const double tol = 1e-9;
  const GroundState gs = ground_state_imaginary_time(p, grid, tol);
  EvolutionConfig c;
  c.t_final = 10.0;
  c.record_every = 200;
  const Trajectory traj = evolve(gs.state, p, c);
  const Observables& o0 = traj.snapshots.front();
  double drift = 0.0;
  for (const auto& o : traj.snapshots) {
    drift = std::max({drift, std::abs(o.width_alpha - o0.width_alpha), std::abs(o.width_beta - o0.width_beta)});
  }
  CHECK(drift < 1e-6);
  CHECK(traj.max_energy_drift < 1e-8);

  // Over one trap period the widths hold to ten times the relaxation tolerance.
  const double loose = 1e-7;
  const GroundState coarse = ground_state_imaginary_time(p, grid, loose);
  c.t_final = 2 * pi;
  c.record_every = 50;
  const Trajectory period = evolve(coarse.state, p, c);
  double worst = 0.0;
  for (const auto& o : period.snapshots) {
    worst = std::max({worst, std::abs(o.width_alpha - period.snapshots[0].width_alpha),
                      std::abs(o.width_beta - period.snapshots[0].width_beta)});
  }
  CHECK(worst < 10 * loose);
}

TEST_CASE("displaced applies a rigid shift and boost") {
  const Grid grid(256, 12.0);
  const Params p(0.0, 0.0, 0.0, 1.0, 2.0, 3.0);
  const TwoComponentState s0 = packets(grid, p, 0.0, 0.0, 1.0, 0.7);
  const TwoComponentState s1 = displaced(s0, 1.5, 0.8);
  const TwoComponentState oracle = packets(grid, p, 1.5, 1.5, 1.0, 0.7, 0.8, 0.8);
  CHECK(l2_distance(s1, oracle) < 1e-10);
  // Shifting back leaves the boost with the constant phase exp(i 0.8 * 0.75).
  const TwoComponentState back = displaced(s1, -1.5, 0.0);
  const TwoComponentState boosted = displaced(s0, 0.0, 0.8);
  const Complex phase = std::polar(1.0, 0.8 * 0.75);
  double dev = 0.0;
  for (std::size_t j = 0; j < grid.n_points(); ++j) dev = std::max(dev, std::abs(back.beta()[j] - phase * boosted.beta()[j]));
  CHECK(dev < 1e-10);
}

TEST_CASE("shape deformation of identical and translated states vanishes") {
  const Grid grid(256, 12.0);
  const Params p(1.0, 1.0, 0.5, 1.0, 5.0, 5.0);
  const TwoComponentState ref = packets(grid, p, 0.0, 0.0, 1.0, 1.0);
  const std::vector<TwoComponentState> copies(3, ref);
  CHECK(shape_deformation(copies, ref) == 0.0);
  const std::vector<TwoComponentState> moved = {displaced(ref, 0.37, 1.0), displaced(ref, -2.0, 0.0)};
  CHECK(shape_deformation(moved, ref) < 1e-6);
  const std::vector<TwoComponentState> wider = {packets(grid, p, 0.0, 0.0, 2.0, 1.0)};
  CHECK(shape_deformation(wider, ref) > 0.1);
  CHECK(shape_deformation(std::span<const TwoComponentState>{}, ref) == 0.0);
}

TEST_CASE("free expansion deforms the packet monotonically") {
  const Grid grid(1024, 40.0);
  const Params p(0.0, 0.0, 0.0, 1e-8, 1.0, 1.0);
  const double w0 = 0.5;
  const TwoComponentState ref = packets(grid, p, 0.0, 0.0, w0, w0);
  EvolutionConfig c;
  c.dt = 1e-3;
  c.t_final = 3.0;
  c.record_every = 250;
  c.store_states = true;
  const Trajectory traj = evolve(ref, p, c);
  const auto d = shape_deformation_series(traj.states, ref);
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] > d[i - 1]);
  CHECK(d.back() > 0.1);
  // Spreading oracle W(t)^2 = W0^2 + t^2 / (4 W0^2).
  const double t = traj.times.back();
  CHECK(traj.snapshots.back().width_alpha == doctest::Approx(std::sqrt(w0 * w0 + t * t / (4 * w0 * w0))).epsilon(1e-8));
}

TEST_CASE("displaced miscible ground state keeps its shape") {
  const Grid grid(256, 16.0);
  const Params p(1.0, 1.0, 0.5, 1.0, 10.0, 10.0);
  const GroundState gs = ground_state_imaginary_time(p, grid, 1e-9);
  EvolutionConfig c;
  c.t_final = 2 * 2 * pi;
  c.record_every = 250;
  c.store_states = true;
  const Trajectory traj = evolve(displaced(gs.state, 1.0, 0.0), p, c);
  CHECK(shape_deformation(traj.states, gs.state) < 0.01);
}
