#include "gpeduet/config.hpp"
#include "gpeduet/experiment.hpp"
#include "gpeduet/selftest.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int selftest() {
  int failures = 0;
  for (const auto& r : gpeduet::run_selftest()) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    failures += r.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-component condensate dynamics and stability experiments"};
  std::string config_path;
  std::string out_dir = ".";
  bool literal = false;
  bool run_selftest = false;
  app.add_option("config", config_path, "key = value experiment file");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--literal", literal, "literal reduced-model variant (chirp term and beta-bracket sign)");
  app.add_flag("--selftest", run_selftest, "run the embedded invariant checks and exit");
  CLI11_PARSE(app, argc, argv);

  if (run_selftest) return selftest();
  if (config_path.empty()) {
    std::cerr << "gpe-duet: a config path is required\n" << app.help();
    return 2;
  }

  gpeduet::ExperimentConfig config;
  try {
    config = gpeduet::load_config(config_path);
  } catch (const gpeduet::ConfigError& e) {
    std::cerr << "gpe-duet: " << e.what() << '\n';
    return 2;
  }
  if (literal) config.literal_mode = true;

  const auto result = gpeduet::run(config, out_dir);
  for (const auto& w : result.warnings) std::cerr << "gpe-duet: warning: " << w << '\n';
  if (result.exit_status != 0) {
    std::cerr << "gpe-duet: " << result.error << '\n';
    return result.exit_status;
  }
  for (const auto& f : result.files) std::cout << f.string() << '\n';
  return 0;
}
