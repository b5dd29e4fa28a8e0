#include "gpeduet/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace gpeduet {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void type_error(const std::string& key, std::string_view value, const char* expected) {
  throw ConfigError("config key '" + key + "': expected " + expected + ", got '" + std::string(value) +
                    "'");
}

double to_real(const std::string& key, std::string_view value) {
  double out = 0.0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size() || !std::isfinite(out)) {
    type_error(key, value, "a finite real number");
  }
  return out;
}

long to_integer(const std::string& key, std::string_view value) {
  long out = 0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size()) type_error(key, value, "an integer");
  return out;
}

long to_positive(const std::string& key, std::string_view value) {
  const long v = to_integer(key, value);
  if (v <= 0) type_error(key, value, "a positive integer");
  return v;
}

double to_positive_real(const std::string& key, std::string_view value) {
  const double v = to_real(key, value);
  if (!(v > 0.0)) type_error(key, value, "a positive real number");
  return v;
}

bool to_bool(const std::string& key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  type_error(key, value, "true or false");
}

std::vector<double> to_real_list(const std::string& key, std::string_view value) {
  std::vector<double> out;
  while (!value.empty()) {
    const auto comma = value.find(',');
    const auto item = trim(value.substr(0, comma));
    if (item.empty()) type_error(key, value, "a comma-separated list of reals");
    out.push_back(to_real(key, item));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  if (out.empty()) type_error(key, value, "a non-empty list");
  return out;
}

Mode to_mode(const std::string& key, std::string_view value) {
  static const std::map<std::string_view, Mode> modes = {
      {"evolve", Mode::evolve},       {"ground", Mode::ground},
      {"variational", Mode::variational}, {"stability", Mode::stability},
      {"sweep", Mode::sweep},         {"veff-scan", Mode::veff_scan},
      {"compare", Mode::compare},
  };
  const auto it = modes.find(value);
  if (it == modes.end()) {
    type_error(key, value, "one of evolve, ground, variational, stability, sweep, veff-scan, compare");
  }
  return it->second;
}

// Raw physical parameters collected before the Params invariants are checked.
struct RawParams {
  double g_alpha = 0.0, g_beta = 0.0, g_alphabeta = 0.0, omega = 1.0, n_alpha = 1.0, n_beta = 1.0;
};

using Setter = std::function<void(ExperimentConfig&, RawParams&, const std::string&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real_param = [](double RawParams::*field) {
      return [field](ExperimentConfig&, RawParams& p, const std::string& k, std::string_view v) {
        p.*field = to_real(k, v);
      };
    };
    t["params.g_alpha"] = real_param(&RawParams::g_alpha);
    t["params.g_beta"] = real_param(&RawParams::g_beta);
    t["params.g_alphabeta"] = real_param(&RawParams::g_alphabeta);
    t["params.omega"] = real_param(&RawParams::omega);
    t["params.n_alpha"] = real_param(&RawParams::n_alpha);
    t["params.n_beta"] = real_param(&RawParams::n_beta);

    t["mode"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.mode = to_mode(k, v);
    };
    t["grid.n_points"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.n_points = static_cast<std::size_t>(to_positive(k, v));
    };
    t["grid.half_length"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.half_length = to_positive_real(k, v);
      c.half_length_given = true;
    };
    t["evolution.dt"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.dt = to_positive_real(k, v);
    };
    t["evolution.t_final"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.t_final = to_positive_real(k, v);
    };
    t["evolution.record_every"] = [](ExperimentConfig& c, RawParams&, const std::string& k,
                                     std::string_view v) {
      c.record_every = static_cast<int>(to_positive(k, v));
    };
    t["evolution.snapshots"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.snapshots = to_bool(k, v);
    };
    t["evolution.energy_drift_tolerance"] = [](ExperimentConfig& c, RawParams&, const std::string& k,
                                               std::string_view v) {
      c.energy_drift_tolerance = to_positive_real(k, v);
    };
    t["initial.profile"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      if (v == "gaussian") {
        c.profile = InitialProfile::gaussian;
      } else if (v == "ground") {
        c.profile = InitialProfile::ground;
      } else {
        type_error(k, v, "gaussian or ground");
      }
    };
    for (const auto& [name, member] :
         {std::pair{"alpha", &ExperimentConfig::alpha}, std::pair{"beta", &ExperimentConfig::beta}}) {
      const std::string prefix = std::string("initial.") + name + ".";
      t[prefix + "x0"] = [member](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
        (c.*member).x0 = to_real(k, v);
      };
      t[prefix + "p0"] = [member](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
        (c.*member).p0 = to_real(k, v);
      };
      t[prefix + "width"] = [member](ExperimentConfig& c, RawParams&, const std::string& k,
                                     std::string_view v) { (c.*member).width = to_positive_real(k, v); };
    }
    t["ground.tol"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.ground_tol = to_positive_real(k, v);
    };
    t["ground.dtau"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.ground_dtau = to_positive_real(k, v);
    };
    t["ground.max_iterations"] = [](ExperimentConfig& c, RawParams&, const std::string& k,
                                    std::string_view v) { c.ground_max_iterations = to_positive(k, v); };
    t["ground.symmetry_breaking"] = [](ExperimentConfig& c, RawParams&, const std::string& k,
                                       std::string_view v) { c.ground_symmetry_breaking = to_bool(k, v); };
    t["sweep.param"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      const auto& names = sweepable_parameters();
      if (std::find(names.begin(), names.end(), v) == names.end()) {
        throw ConfigError("config key '" + k + "': unknown parameter '" + std::string(v) + "'");
      }
      c.sweep_param = std::string(v);
    };
    t["sweep.start"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.sweep_start = to_real(k, v);
    };
    t["sweep.stop"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.sweep_stop = to_real(k, v);
    };
    t["sweep.steps"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.sweep_steps = static_cast<int>(to_positive(k, v));
    };
    t["sweep.threads"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      const long n = to_integer(k, v);
      if (n < 0) type_error(k, v, "a non-negative integer");
      c.threads = static_cast<int>(n);
    };
    t["veff.g_values"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.veff_g_values = to_real_list(k, v);
      for (double g : c.veff_g_values) {
        if (g < 0.0) type_error(k, v, "non-negative couplings");
      }
    };
    t["veff.dx_max"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.veff_dx_max = to_positive_real(k, v);
    };
    t["veff.points"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      const long n = to_positive(k, v);
      if (n < 3) type_error(k, v, "at least 3 points");
      c.veff_points = static_cast<int>(n);
    };
    t["veff.width"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.veff_width = to_positive_real(k, v);
    };
    t["stability.legendre_modes"] = [](ExperimentConfig& c, RawParams&, const std::string& k,
                                       std::string_view v) {
      c.legendre_modes = static_cast<int>(to_positive(k, v));
    };
    t["stability.legendre_grid"] = [](ExperimentConfig& c, RawParams&, const std::string& k,
                                      std::string_view v) {
      c.legendre_grid = static_cast<int>(to_positive(k, v));
    };
    t["output.prefix"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      if (v.empty() || v.find('/') != std::string_view::npos) type_error(k, v, "a plain file name prefix");
      c.output_prefix = std::string(v);
    };
    t["literal_mode"] = [](ExperimentConfig& c, RawParams&, const std::string& k, std::string_view v) {
      c.literal_mode = to_bool(k, v);
    };
    return t;
  }();
  return table;
}

void validate(const ExperimentConfig& c) {
  try {
    Grid grid(c.n_points, c.half_length);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.mode == Mode::sweep) {
    if (c.sweep_param.empty()) throw ConfigError("sweep mode requires sweep.param");
    if (c.sweep_steps < 2) throw ConfigError("sweep mode requires sweep.steps >= 2");
    try {
      with_parameter(c.params, c.sweep_param, c.sweep_start);
      with_parameter(c.params, c.sweep_param, c.sweep_stop);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("sweep range: ") + e.what());
    }
  }
  if (c.mode == Mode::veff_scan && c.veff_g_values.empty()) {
    throw ConfigError("veff-scan mode requires veff.g_values");
  }
  if (c.legendre_modes > c.legendre_grid / 4) {
    throw ConfigError("stability.legendre_modes must not exceed stability.legendre_grid / 4");
  }
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::evolve: return "evolve";
    case Mode::ground: return "ground";
    case Mode::variational: return "variational";
    case Mode::stability: return "stability";
    case Mode::sweep: return "sweep";
    case Mode::veff_scan: return "veff-scan";
    case Mode::compare: return "compare";
  }
  return "unknown";
}

const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names = {"g_alpha", "g_beta", "g_alphabeta",
                                                 "omega",   "n_alpha", "n_beta"};
  return names;
}

Params with_parameter(const Params& params, const std::string& name, double value) {
  if (name == "g_alpha") return params.with_g_alpha(value);
  if (name == "g_beta") return params.with_g_beta(value);
  if (name == "g_alphabeta") return params.with_g_alphabeta(value);
  if (name == "omega") return params.with_omega(value);
  if (name == "n_alpha") return params.with_n_alpha(value);
  if (name == "n_beta") return params.with_n_beta(value);
  throw ConfigError("unknown parameter '" + name + "'");
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& entry : setters()) k.push_back(entry.first);
    return k;
  }();
  return keys;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  RawParams raw;
  std::set<std::string> seen;
  int line_number = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text.remove_prefix(newline == std::string_view::npos ? text.size() : newline + 1);
    ++line_number;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_number) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("line " + std::to_string(line_number) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_number) + ": duplicate key '" + key + "'");
    }
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(line_number) + ": key '" + key + "' has no value");
    }
    it->second(config, raw, key, value);
  }

  try {
    config.params = Params(raw.g_alpha, raw.g_beta, raw.g_alphabeta, raw.omega, raw.n_alpha, raw.n_beta);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace gpeduet
