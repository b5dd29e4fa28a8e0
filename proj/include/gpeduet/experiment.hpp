#pragma once

#include "gpeduet/config.hpp"
#include "gpeduet/core.hpp"
#include "gpeduet/solver.hpp"
#include "gpeduet/stability.hpp"
#include "gpeduet/variational.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gpeduet {

/// Grid for a config. Without an explicit grid.half_length the box grows to
/// minimum_half_length (plus the largest initial offset) when the default is
/// too small; an explicit value that is too small only adds a warning.
Grid experiment_grid(const ExperimentConfig& config, std::vector<std::string>* warnings = nullptr);

ReducedModelOptions reduced_model_options(const ExperimentConfig& config);

/// Initial Gaussians of the reduced model; unset widths take the overlapped
/// equilibrium widths.
VariationalState initial_variational_state(const ExperimentConfig& config);

/// Initial wavefunctions: Gaussians matching initial_variational_state, or
/// the imaginary-time ground state with each component displaced and boosted
/// by its own x0, p0.
TwoComponentState initial_state(const ExperimentConfig& config, const Grid& grid);

GroundStateOptions ground_options(const ExperimentConfig& config);

struct ModelComparison {
  std::vector<double> times;
  std::vector<Observables> pde;
  std::vector<VariationalState> reduced;
  double max_center_deviation = 0.0;  // max |x_pde - x_reduced| over both species
  double center_excursion = 0.0;      // max |x_reduced - x_reduced(0)|, the scale for relative errors
  double max_width_deviation = 0.0;   // max |W_pde - W_reduced| / W_reduced
  double center_frequency_ratio = 0.0;  // NaN when either series does not oscillate
  double width_frequency_ratio = 0.0;
  /// Filled when the reduced model predicts a double well: its separation
  /// at the decoupled widths, and the imaginary-time packet separation.
  std::optional<double> reduced_separation;
  std::optional<double> pde_separation;
};

/// Runs the split-step solver and the reduced model from identical initial
/// Gaussians on identical sampling times.
ModelComparison compare_models(const ExperimentConfig& config);

struct SweepPoint {
  double value = 0.0;
  Params params;
  GroundState ground;
  Observables observables;
  Miscibility miscibility;
  CenterStabilityReport center;
  bool widths_stable = false;
};

/// Imaginary-time ground state and classifications at each of sweep_steps
/// evenly spaced values, computed concurrently and returned in scan order.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& config);

struct VeffCurve {
  double g_alphabeta = 0.0;
  double width = 0.0;
  CenterStabilityReport center;
  std::vector<double> dx;
  std::vector<double> v_eff;
};

/// Effective potential curves on a common dx window, one per veff.g_values
/// entry. The width is veff.width or the overlapped equilibrium width.
std::vector<VeffCurve> veff_scan(const ExperimentConfig& config);

struct RunResult {
  int exit_status = 0;
  std::vector<std::filesystem::path> files;
  std::vector<std::string> warnings;
  std::string error;
};

/// Dispatches on config.mode and writes outputs named <prefix>_*.csv/txt into
/// out_dir. On failure every file written so far is removed and exit_status
/// is nonzero.
RunResult run(const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace gpeduet
