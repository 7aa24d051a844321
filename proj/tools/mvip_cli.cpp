// Scenario runner for the maglev vibration-isolation platform simulator.
//
// mvip <scenario> [--config FILE] [--seed N] [--out DIR] [--duration S]
//                 [--no-noise]
//
// Scenarios: levitate | contour | sweep | identify | failure | alloc-compare
//            | design | loop-analysis

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mvip/config.hpp"
#include "mvip/scenarios.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw mvip::Config("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& scenario_name, const std::string& config_path,
        std::uint64_t seed, bool seed_given, const std::string& out_dir,
        double duration, bool no_noise) {
  mvip::HarnessConfig config;
  std::string config_text = mvip::reference_config_text();
  if (!config_path.empty()) {
    config_text = read_file(config_path);
    std::istringstream in(config_text);
    config = mvip::load_config(in);
  }

  mvip::ScenarioRequest req;
  req.kind = mvip::parse_scenario_kind(scenario_name);
  req.seed = seed;
  req.seed_given = seed_given;
  req.no_noise = no_noise;
  req.duration_override = duration;
  req.config_hash = mvip::fnv1a_hash(config_text);

  const mvip::ScenarioResult result = mvip::run_scenario(config, req);
  result.write_outputs(out_dir);
  std::cout << result.metrics.text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maglev vibration-isolation platform scenario harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  double duration = 0.0;
  bool no_noise = false;

  const std::vector<std::string> scenarios = {
      "levitate", "contour", "sweep", "identify",
      "failure",  "alloc-compare", "design", "loop-analysis"};
  for (const auto& name : scenarios) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file");
    sub->add_option("--seed", seed, "random seed (required when noise is on)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--duration", duration, "override run duration, seconds");
    sub->add_flag("--no-noise", no_noise,
                  "disable sensor noise and converter quantization");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const auto* sub = app.get_subcommands().front();
    const bool seed_given = sub->count("--seed") > 0;
    return run(sub->get_name(), config_path, seed, seed_given, out_dir, duration,
               no_noise);
  } catch (const mvip::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
}
