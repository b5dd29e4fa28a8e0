#pragma once

#include "gpeduet/core.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gpeduet {

struct EvolutionConfig {
  double dt = 1e-3;
  double t_final = 1.0;
  int record_every = 100;
  bool renormalize = false;  // imaginary time only
  bool store_states = false;
  double energy_drift_tolerance = 1e-8;

  /// Throws std::invalid_argument on non-positive entries or when the kinetic
  /// phase dt * k_max^2 / 2 reaches pi on the given grid.
  void validate(const Grid& grid) const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Observables> snapshots;
  std::vector<TwoComponentState> states;  // filled only with store_states
  double max_energy_drift = 0.0;          // max |E(t) - E(0)| / |E(0)|
  bool energy_drift_exceeded = false;
};

enum class TimeKind { real, imaginary };

/// Strang-split propagator for the coupled GPE: half step of trap plus
/// mean-field phase in real space, full kinetic step in Fourier space, half
/// step of trap plus mean field. Both mean-field half steps use the densities
/// at the start of that half step.
///
/// In imaginary time the phases become decay factors exp(-H dtau). The mean
/// field then uses densities rescaled to the particle numbers in params, and
/// the caller is responsible for renormalizing.
class SplitStepPropagator {
 public:
  SplitStepPropagator(Grid grid, Params params, double dt, TimeKind kind = TimeKind::real);

  /// Advances the state in place. Throws NumericalError if any amplitude is
  /// non-finite or exceeds 1e6 afterwards.
  void step(TwoComponentState& state) const;

  double dt() const { return dt_; }
  const Grid& grid() const { return grid_; }
  const Params& params() const { return params_; }

 private:
  void potential_half_step(TwoComponentState& state) const;

  Grid grid_;
  Params params_;
  double dt_;
  TimeKind kind_;
  std::vector<double> trap_;
  std::vector<Complex> kinetic_;  // includes the 1/n of the inverse transform
};

/// Largest |psi| allowed before a step is declared a blow-up.
inline constexpr double kBlowUpAmplitude = 1e6;

/// Returns the state advanced by one real-time Strang step of size dt.
TwoComponentState step_real_time(TwoComponentState state, const Params& params, double dt);

/// Repeated real-time stepping, recording observables at t = 0 and every
/// record_every steps (and at the final step).
Trajectory evolve(TwoComponentState state, const Params& params, const EvolutionConfig& config);

struct GroundStateOptions {
  double dtau = 1e-3;
  long max_iterations = 3'000'000;
  int check_every = 100;
  /// Displace the initial Gaussians antisymmetrically by +-seed_displacement
  /// oscillator lengths and add seed_noise relative amplitude noise.
  bool symmetry_breaking = true;
  double seed_displacement = 0.1;
  double seed_noise = 1e-6;
  std::uint64_t seed = 20240601;
};

struct GroundState {
  TwoComponentState state;
  double mu_alpha = 0.0;
  double mu_beta = 0.0;
  long iterations = 0;
};

/// Relaxes the coupled GPE in imaginary time, renormalizing both components
/// every step, until both chemical potential estimates change by less than
/// tol between successive diagnostics and |dpsi/dtau| / sqrt(N_s) < tol. A
/// coarse stage at ten times dtau runs first. Throws NumericalError on blow-up or when max_iterations is reached.
GroundState ground_state_imaginary_time(const Params& params, const Grid& grid, double tol,
                                        const GroundStateOptions& options = {});

/// Applies a rigid displacement and momentum boost
/// psi(x) -> psi(x - shift) exp(i p0 (x - shift/2)) to both components, using
/// a spectral shift.
TwoComponentState displaced(const TwoComponentState& state, double shift, double p0);

/// D(t) for every state: min over shifts a of || n_s(t) - n_s,ref(. - a) ||_1 / (2 N_s),
/// maximized over the two components. Values lie in [0, 1].
std::vector<double> shape_deformation_series(std::span<const TwoComponentState> states,
                                             const TwoComponentState& reference);

/// max_t D(t); zero for an empty sequence.
double shape_deformation(std::span<const TwoComponentState> states,
                         const TwoComponentState& reference);

}  // namespace gpeduet
