#include "latentlab/core.hpp"
#include "latentlab/experiments.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

namespace {

int run_command(const std::string& experiment, const std::string& config_path,
                const std::string& out_dir, int threads) {
  namespace exp = latentlab::experiments;
  nlohmann::json config = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config file " << config_path << "\n";
      return 2;
    }
    try {
      in >> config;
    } catch (const nlohmann::json::parse_error& e) {
      std::cerr << "error: config parse failure: " << e.what() << "\n";
      return 2;
    }
  }
  try {
    const std::string dir = exp::run_and_write(experiment, config, out_dir, threads);
    std::cout << dir << "\n";
    return 0;
  } catch (const exp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    const nlohmann::json diagnostic = {{"experiment", experiment},
                                       {"error", e.what()},
                                       {"version", exp::kVersion}};
    std::cerr << diagnostic.dump(2) << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latentlab: mixture/log-linear encoder simulations and baselines"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "print the experiment catalog");

  std::string experiment, config_path, out_dir = "out";
  int threads = latentlab::default_thread_count();
  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("experiment", experiment, "experiment name (see `latentlab list`)")->required();
  run->add_option("--config", config_path, "JSON config; must include \"seed\"");
  run->add_option("--out", out_dir, "output directory root");
  run->add_option("--threads", threads, "worker threads (default LATENTLAB_THREADS or hardware)");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    for (const auto& name : latentlab::experiments::experiment_names()) std::cout << name << "\n";
    return 0;
  }
  return run_command(experiment, config_path, out_dir, threads);
}
