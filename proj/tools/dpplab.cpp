#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dpp/config.hpp"
#include "dpp/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Time-slice solver, game simulator and checks for the alpha-parabolic DPP"};
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool quiet = false;
  app.add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out_dir, "Output directory (overrides the config's `out`)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed (overrides the config's `seed`)");
  app.add_option("--threads", threads, "Worker threads, 0 = one per hardware thread")->capture_default_str();
  app.add_flag("--quiet", quiet, "No progress output");
  CLI11_PARSE(app, argc, argv);

  dpp::RunConfig config;
  try {
    config = dpp::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << config_path << ": " << e.what() << '\n';
    return dpp::kExitError;
  }
  if (*seed_opt) config.set_seed(seed);
  if (*out_opt) config.set_output(out_dir);

  dpp::RunOptions options;
  options.out_dir = config.text("out");
  options.threads = threads;
  options.log = quiet ? nullptr : &std::clog;
  const int code = dpp::run(config, options, std::cerr);
  if (!quiet) std::clog << dpp::command_name(config.command()) << ": exit " << code << '\n';
  return code;
}
