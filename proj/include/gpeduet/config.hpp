#pragma once

#include "gpeduet/core.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gpeduet {

/// Raised for unknown keys, malformed values and invalid parameter sets.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { evolve, ground, variational, stability, sweep, veff_scan, compare };

std::string_view to_string(Mode mode);

enum class InitialProfile { gaussian, ground };

struct InitialComponent {
  double x0 = 0.0;
  double p0 = 0.0;
  std::optional<double> width;  // defaults to the reduced-model equilibrium width
};

struct ExperimentConfig {
  Mode mode = Mode::ground;
  Params params{0.0, 0.0, 0.0, 1.0, 1.0, 1.0};

  std::size_t n_points = 1024;
  double half_length = 32.0;
  bool half_length_given = false;

  double dt = 1e-3;
  double t_final = 10.0;
  int record_every = 100;
  bool snapshots = false;
  double energy_drift_tolerance = 1e-8;

  InitialProfile profile = InitialProfile::gaussian;
  InitialComponent alpha;
  InitialComponent beta;

  double ground_tol = 1e-9;
  double ground_dtau = 1e-3;
  long ground_max_iterations = 3'000'000;
  bool ground_symmetry_breaking = true;

  std::string sweep_param;
  double sweep_start = 0.0;
  double sweep_stop = 0.0;
  int sweep_steps = 0;
  int threads = 0;  // 0: hardware concurrency

  std::vector<double> veff_g_values;
  std::optional<double> veff_dx_max;
  int veff_points = 401;
  std::optional<double> veff_width;

  int legendre_modes = 5;
  int legendre_grid = 1000;

  std::string output_prefix = "run";
  bool literal_mode = false;
};

/// Names accepted by sweep.param.
const std::vector<std::string>& sweepable_parameters();

/// Returns params with the named field replaced; throws ConfigError for an
/// unknown name and propagates Params validation.
Params with_parameter(const Params& params, const std::string& name, double value);

/// Parses `key = value` lines with `#` comments and dotted section keys.
/// Unset keys keep their documented defaults. Throws ConfigError naming the
/// offending key or line.
ExperimentConfig parse_config(std::string_view text);

ExperimentConfig load_config(const std::string& path);

/// All keys parse_config accepts.
const std::vector<std::string>& known_config_keys();

}  // namespace gpeduet
