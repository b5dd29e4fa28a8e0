#include "gpeduet/experiment.hpp"

#include "gpeduet/csv.hpp"
#include "gpeduet/signal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace gpeduet {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double fitted_frequency(const std::vector<double>& t, const std::vector<double>& y) {
  try {
    return signal::fit_sinusoid(t, y).omega;
  } catch (const std::invalid_argument&) {
    return kNaN;
  }
}

// Tracks emitted files so a failed run can remove them.
class OutputSet {
 public:
  OutputSet(std::filesystem::path dir, std::string prefix) : dir_(std::move(dir)), prefix_(std::move(prefix)) {}

  std::ofstream open(const std::string& suffix) {
    const auto path = dir_ / (prefix_ + "_" + suffix);
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    files_.push_back(path);
    os.precision(17);
    return os;
  }

  void remove_all() noexcept {
    for (const auto& f : files_) {
      std::error_code ec;
      std::filesystem::remove(f, ec);
    }
  }

  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::string prefix_;
  std::vector<std::filesystem::path> files_;
};

void write_observables_block(std::ostream& os, const Observables& o) {
  os << "norm_alpha = " << o.norm_alpha << "\nnorm_beta = " << o.norm_beta
     << "\ncenter_alpha = " << o.center_alpha << "\ncenter_beta = " << o.center_beta
     << "\nwidth_alpha = " << o.width_alpha << "\nwidth_beta = " << o.width_beta
     << "\nenergy = " << o.energy << "\noverlap_fraction = " << o.overlap_fraction << '\n';
}

void write_grid_block(std::ostream& os, const Grid& grid) {
  os << "n_points = " << grid.n_points() << "\nhalf_length = " << grid.half_length() << '\n';
}

double largest_offset(const ExperimentConfig& c) {
  return std::max(std::abs(c.alpha.x0), std::abs(c.beta.x0));
}

EvolutionConfig evolution_config(const ExperimentConfig& c, bool store_states) {
  EvolutionConfig e;
  e.dt = c.dt;
  e.t_final = c.t_final;
  e.record_every = c.record_every;
  e.store_states = store_states;
  e.energy_drift_tolerance = c.energy_drift_tolerance;
  return e;
}

void run_evolve(const ExperimentConfig& c, const Grid& grid, OutputSet& out, RunResult& result) {
  const TwoComponentState psi0 = initial_state(c, grid);
  const Trajectory traj = evolve(psi0, c.params, evolution_config(c, c.snapshots));
  {
    auto os = out.open("observables.csv");
    csv::write_observables(os, traj);
  }
  if (c.snapshots) {
    auto os = out.open("snapshots.csv");
    csv::write_snapshots(os, traj.times, traj.states);
  }
  auto os = out.open("summary.txt");
  os << "mode = evolve\n";
  write_grid_block(os, grid);
  os << "dt = " << c.dt << "\nt_final = " << traj.times.back() << "\nmax_energy_drift = " << traj.max_energy_drift
     << "\nenergy_drift_exceeded = " << (traj.energy_drift_exceeded ? "true" : "false") << '\n';
  write_observables_block(os, traj.snapshots.back());
  if (traj.energy_drift_exceeded) {
    std::ostringstream msg;
    msg << "relative energy drift " << traj.max_energy_drift << " exceeds " << c.energy_drift_tolerance;
    result.warnings.push_back(msg.str());
  }
}

void run_ground(const ExperimentConfig& c, const Grid& grid, OutputSet& out) {
  const GroundState gs = ground_state_imaginary_time(c.params, grid, c.ground_tol, ground_options(c));
  const Observables obs = observables(gs.state, c.params);
  {
    auto os = out.open("ground.csv");
    const double t0 = 0.0;
    csv::write_snapshots(os, std::span(&t0, 1), std::span(&gs.state, 1));
  }
  auto os = out.open("ground.txt");
  os << "mode = ground\n";
  write_grid_block(os, grid);
  os << "mu_alpha = " << gs.mu_alpha << "\nmu_beta = " << gs.mu_beta << "\niterations = " << gs.iterations
     << '\n';
  write_observables_block(os, obs);
}

void run_variational(const ExperimentConfig& c, OutputSet& out) {
  const auto samples = integrate(initial_variational_state(c), c.params, c.dt, c.t_final,
                                 reduced_model_options(c), c.record_every);
  auto os = out.open("variational.csv");
  csv::write_variational(os, samples);
}

void run_stability(const ExperimentConfig& c, OutputSet& out) {
  const StabilityReport report = analyze_stability(c.params, c.legendre_modes, c.legendre_grid);
  {
    auto os = out.open("stability.txt");
    write_key_value(os, c.params, report);
  }
  {
    auto os = out.open("stability.csv");
    os << stability_csv_header() << '\n' << stability_csv_row(c.params, report) << '\n';
  }
  auto os = out.open("legendre.csv");
  os << "n,epsilon_analytic,epsilon_numeric\n";
  for (const auto& m : report.legendre) {
    os << m.n << ',' << m.epsilon_analytic << ',' << m.epsilon_numeric << '\n';
  }
}

void run_sweep_mode(const ExperimentConfig& c, OutputSet& out) {
  const auto points = run_sweep(c);
  auto os = out.open("sweep.csv");
  os << c.sweep_param
     << ",mu_alpha,mu_beta,iterations,norm_a,norm_b,center_a,center_b,width_a,width_b,energy,overlap,"
        "separated,miscibility_margin,double_well,lambda_plus,widths_stable\n";
  for (const auto& p : points) {
    const Observables& o = p.observables;
    os << p.value << ',' << p.ground.mu_alpha << ',' << p.ground.mu_beta << ',' << p.ground.iterations << ','
       << o.norm_alpha << ',' << o.norm_beta << ',' << o.center_alpha << ',' << o.center_beta << ','
       << o.width_alpha << ',' << o.width_beta << ',' << o.energy << ',' << o.overlap_fraction << ','
       << int(p.miscibility.separated) << ',' << p.miscibility.margin << ',' << int(p.center.double_well) << ','
       << p.center.lambda_plus << ',' << int(p.widths_stable) << '\n';
  }
}

void run_veff_mode(const ExperimentConfig& c, OutputSet& out) {
  const auto curves = veff_scan(c);
  for (std::size_t i = 0; i < curves.size(); ++i) {
    auto os = out.open("veff_" + std::to_string(i) + ".csv");
    csv::write_effective_potential(os, curves[i].dx, curves[i].v_eff);
  }
  auto os = out.open("veff_summary.csv");
  os << "index,g_alphabeta,width,curvature_at_origin,double_well,separation,v_eff_origin,v_eff_minimum\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& cv = curves[i];
    const Params p = c.params.with_g_alphabeta(cv.g_alphabeta);
    const double at_min = effective_potential(cv.center.separation, p, cv.width);
    os << i << ',' << cv.g_alphabeta << ',' << cv.width << ',' << cv.center.curvature_at_origin << ','
       << int(cv.center.double_well) << ',' << cv.center.separation << ','
       << effective_potential(0.0, p, cv.width) << ',' << at_min << '\n';
  }
}

void run_compare_mode(const ExperimentConfig& c, OutputSet& out) {
  const ModelComparison cmp = compare_models(c);
  {
    auto os = out.open("compare.csv");
    os << "t,pde_center_a,var_center_a,pde_center_b,var_center_b,pde_width_a,var_width_a,pde_width_b,"
          "var_width_b\n";
    for (std::size_t i = 0; i < cmp.times.size(); ++i) {
      const auto& p = cmp.pde[i];
      const auto& v = cmp.reduced[i];
      os << cmp.times[i] << ',' << p.center_alpha << ',' << v.x0_alpha << ',' << p.center_beta << ','
         << v.x0_beta << ',' << p.width_alpha << ',' << v.w_alpha << ',' << p.width_beta << ',' << v.w_beta
         << '\n';
    }
  }
  auto os = out.open("compare.txt");
  os << "max_center_deviation = " << cmp.max_center_deviation << "\ncenter_excursion = " << cmp.center_excursion
     << "\nmax_width_deviation = " << cmp.max_width_deviation
     << "\ncenter_frequency_ratio = " << cmp.center_frequency_ratio
     << "\nwidth_frequency_ratio = " << cmp.width_frequency_ratio << '\n';
  if (cmp.reduced_separation) {
    os << "reduced_separation = " << *cmp.reduced_separation << "\npde_separation = " << *cmp.pde_separation
       << '\n';
  }
}

}  // namespace

Grid experiment_grid(const ExperimentConfig& c, std::vector<std::string>* warnings) {
  double widest = std::max(c.alpha.width.value_or(0.0), c.beta.width.value_or(0.0));
  if (widest == 0.0) {
    const auto eq = equilibrium_widths(c.params);
    widest = std::max(eq.w_alpha_eq, eq.w_beta_eq);
  }
  Params reach = c.params;
  if (c.mode == Mode::sweep) {
    reach = with_parameter(c.params, c.sweep_param, std::max(c.sweep_start, c.sweep_stop));
  }
  const double needed = minimum_half_length(reach, widest) + largest_offset(c);
  if (c.half_length_given) {
    if (c.half_length < needed && warnings) {
      std::ostringstream msg;
      msg << "grid.half_length = " << c.half_length << " is below the recommended " << needed;
      warnings->push_back(msg.str());
    }
    return Grid(c.n_points, c.half_length);
  }
  return Grid(c.n_points, std::max(c.half_length, needed));
}

ReducedModelOptions reduced_model_options(const ExperimentConfig& c) {
  return c.literal_mode ? ReducedModelOptions::literal() : ReducedModelOptions{};
}

VariationalState initial_variational_state(const ExperimentConfig& c) {
  VariationalState v;
  if (!c.alpha.width || !c.beta.width) {
    const auto eq = equilibrium_widths(c.params);
    v.w_alpha = eq.w_alpha_eq;
    v.w_beta = eq.w_beta_eq;
  }
  if (c.alpha.width) v.w_alpha = *c.alpha.width;
  if (c.beta.width) v.w_beta = *c.beta.width;
  v.x0_alpha = c.alpha.x0;
  v.p0_alpha = c.alpha.p0;
  v.x0_beta = c.beta.x0;
  v.p0_beta = c.beta.p0;
  return v;
}

GroundStateOptions ground_options(const ExperimentConfig& c) {
  GroundStateOptions o;
  o.dtau = c.ground_dtau;
  o.max_iterations = c.ground_max_iterations;
  o.symmetry_breaking = c.ground_symmetry_breaking;
  return o;
}

TwoComponentState initial_state(const ExperimentConfig& c, const Grid& grid) {
  if (c.profile == InitialProfile::ground) {
    const GroundState gs = ground_state_imaginary_time(c.params, grid, c.ground_tol, ground_options(c));
    const auto a = displaced(gs.state, c.alpha.x0, c.alpha.p0);
    const auto b = displaced(gs.state, c.beta.x0, c.beta.p0);
    return TwoComponentState(grid, Field(a.alpha().begin(), a.alpha().end()),
                             Field(b.beta().begin(), b.beta().end()));
  }
  const VariationalState v = initial_variational_state(c);
  return TwoComponentState(grid, gaussian_packet(grid, c.params.n_alpha(), v.x0_alpha, v.p0_alpha, v.w_alpha),
                           gaussian_packet(grid, c.params.n_beta(), v.x0_beta, v.p0_beta, v.w_beta));
}

ModelComparison compare_models(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.profile = InitialProfile::gaussian;
  const Grid grid = experiment_grid(c);
  const Trajectory traj = evolve(initial_state(c, grid), c.params, evolution_config(c, false));
  const auto samples =
      integrate(initial_variational_state(c), c.params, c.dt, c.t_final, reduced_model_options(c), c.record_every);
  if (samples.size() != traj.times.size()) {
    throw NumericalError("compare_models: solver and reduced model sampled different times");
  }

  ModelComparison cmp;
  cmp.times = traj.times;
  cmp.pde = traj.snapshots;
  std::vector<double> xp, xv, wp, wv;
  const VariationalState& first = samples.front().state;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const VariationalState& v = samples[i].state;
    const Observables& o = traj.snapshots[i];
    cmp.reduced.push_back(v);
    cmp.max_center_deviation = std::max(
        {cmp.max_center_deviation, std::abs(o.center_alpha - v.x0_alpha), std::abs(o.center_beta - v.x0_beta)});
    cmp.center_excursion = std::max(
        {cmp.center_excursion, std::abs(v.x0_alpha - first.x0_alpha), std::abs(v.x0_beta - first.x0_beta)});
    cmp.max_width_deviation =
        std::max({cmp.max_width_deviation, std::abs(o.width_alpha - v.w_alpha) / v.w_alpha,
                  std::abs(o.width_beta - v.w_beta) / v.w_beta});
    xp.push_back(o.center_alpha);
    xv.push_back(v.x0_alpha);
    wp.push_back(o.width_alpha);
    wv.push_back(v.w_alpha);
  }
  cmp.center_frequency_ratio = fitted_frequency(cmp.times, xp) / fitted_frequency(cmp.times, xv);
  cmp.width_frequency_ratio = fitted_frequency(cmp.times, wp) / fitted_frequency(cmp.times, wv);

  const auto separated = equilibrium_widths(c.params.with_g_alphabeta(0.0));
  const double w = std::hypot(separated.w_alpha_eq, separated.w_beta_eq);
  const CenterStabilityReport center = center_stability(c.params, w);
  if (center.double_well) {
    const GroundState gs = ground_state_imaginary_time(c.params, grid, c.ground_tol, ground_options(c));
    const Observables o = observables(gs.state, c.params);
    cmp.reduced_separation = center.separation;
    cmp.pde_separation = std::abs(o.center_alpha - o.center_beta);
  }
  return cmp;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& c) {
  if (c.sweep_steps < 2) throw std::invalid_argument("run_sweep: sweep.steps must be >= 2");
  const Grid grid = experiment_grid(c);
  const auto n = static_cast<std::size_t>(c.sweep_steps);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = c.sweep_start + (c.sweep_stop - c.sweep_start) * static_cast<double>(i) / static_cast<double>(n - 1);
  }

  std::vector<std::optional<SweepPoint>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const Params p = with_parameter(c.params, c.sweep_param, values[i]);
        GroundState gs = ground_state_imaginary_time(p, grid, c.ground_tol, ground_options(c));
        const Observables obs = observables(gs.state, p);
        const auto eq = equilibrium_widths(p);
        results[i].emplace(SweepPoint{values[i], p, std::move(gs), obs, miscibility_criterion(p),
                                      center_stability(p, std::hypot(eq.w_alpha_eq, eq.w_beta_eq)),
                                      width_normal_modes(p, eq).stable});
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min<std::size_t>(n, c.threads > 0 ? static_cast<std::size_t>(c.threads) : hw);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<SweepPoint> out;
  out.reserve(n);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

std::vector<VeffCurve> veff_scan(const ExperimentConfig& c) {
  std::vector<VeffCurve> curves;
  double window = 0.0;
  for (double g : c.veff_g_values) {
    VeffCurve cv;
    cv.g_alphabeta = g;
    const Params p = c.params.with_g_alphabeta(g);
    if (c.veff_width) {
      cv.width = *c.veff_width;
    } else {
      const auto eq = equilibrium_widths(p);
      cv.width = std::hypot(eq.w_alpha_eq, eq.w_beta_eq);
    }
    cv.center = center_stability(p, cv.width);
    window = std::max({window, 4.0 * cv.width, 1.5 * cv.center.separation});
    curves.push_back(std::move(cv));
  }
  if (c.veff_dx_max) window = *c.veff_dx_max;

  for (auto& cv : curves) {
    const Params p = c.params.with_g_alphabeta(cv.g_alphabeta);
    const int m = c.veff_points;
    for (int i = 0; i < m; ++i) {
      const double dx = -window + 2.0 * window * i / (m - 1);
      cv.dx.push_back(dx);
      cv.v_eff.push_back(effective_potential(dx, p, cv.width));
    }
  }
  return curves;
}

RunResult run(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  RunResult result;
  OutputSet out(out_dir, config.output_prefix);
  try {
    std::filesystem::create_directories(out_dir);
    switch (config.mode) {
      case Mode::evolve: run_evolve(config, experiment_grid(config, &result.warnings), out, result); break;
      case Mode::ground: run_ground(config, experiment_grid(config, &result.warnings), out); break;
      case Mode::variational: run_variational(config, out); break;
      case Mode::stability: run_stability(config, out); break;
      case Mode::sweep:
        experiment_grid(config, &result.warnings);
        run_sweep_mode(config, out);
        break;
      case Mode::veff_scan: run_veff_mode(config, out); break;
      case Mode::compare:
        experiment_grid(config, &result.warnings);
        run_compare_mode(config, out);
        break;
    }
  } catch (const std::exception& e) {
    out.remove_all();
    result.exit_status = 1;
    result.error = std::string(to_string(config.mode)) + ": " + e.what();
    return result;
  }
  result.files = out.files();
  return result;
}

}  // namespace gpeduet
