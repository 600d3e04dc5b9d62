#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "beamstab/parallel.hpp"
#include "beamstab_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace beamstab::cli;
  CLI::App app{"beamstab: modal stability laboratory for thermoelastic beams"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1, 1);

  std::string config_path;
  int threads = 0;
  CommandOptions options;
  std::optional<double> lambda_min, lambda_max, t_min, t_max;
  std::optional<int> n_max, points;

  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " command");
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--threads", threads, "worker cap (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", options.out_dir, "output directory (overrides output.dir)");
    sub->add_option("--dump-modes", options.dump_modes, "write matrix-market files for modes 1..N")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--n-max", n_max, "mode cutoff override for sweep/spectrum/decay/check");
    sub->add_option("--points", points, "grid size override for sweep/decay");
    sub->add_option("--lambda-min", lambda_min, "sweep lower frequency");
    sub->add_option("--lambda-max", lambda_max, "sweep upper frequency");
    sub->add_option("--t-min", t_min, "decay start time");
    sub->add_option("--t-max", t_max, "decay end time");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    beamstab::set_max_threads(threads);
    nlohmann::json root;
    {
      std::ifstream in(config_path);
      root = nlohmann::json::parse(in);
    }
    if (n_max) {
      for (const char* block : {"sweep", "decay", "check"}) root[block]["n_max"] = *n_max;
    }
    if (points) {
      root["sweep"]["points"] = *points;
      root["decay"]["points"] = *points;
    }
    if (lambda_min) root["sweep"]["lambda_min"] = *lambda_min;
    if (lambda_max) root["sweep"]["lambda_max"] = *lambda_max;
    if (t_min) root["decay"]["t_min"] = *t_min;
    if (t_max) root["decay"]["t_max"] = *t_max;
    RunConfig config = parse_config(root);
    return run_command(command, config, options, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "beamstab " << command << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
}
