#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sagat/errors.hpp"
#include "sagat/harness.hpp"

using namespace sagat;

int main(int argc, char** argv) {
  CLI::App app{"Self-assessed grasp affordance transfer engine"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool exhaustive = false;
  app.add_option("--config", config_path, "Experiment config JSON");
  app.add_option("--output", output_dir, "Output directory (overrides config)");
  app.add_option("--seed", seed, "Single seed (overrides config seeds)")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_flag("--exhaustive", exhaustive,
               "Simulate every candidate instead of stopping at the first pass");

  auto* gen = app.add_subcommand("gen-demos", "Generate scripted demonstrations");
  std::string gen_task = "pour";
  int gen_count = 9;
  int gen_successful = 6;
  int gen_undesired = 3;
  gen->add_option("--task", gen_task, "Task label (pour|shake|handover)");
  gen->add_option("--count", gen_count, "Total demonstrations");
  gen->add_option("--successful", gen_successful, "Successful demonstrations");
  gen->add_option("--undesired", gen_undesired, "Undesired demonstrations");

  auto* build = app.add_subcommand("build-library", "Build the task affordance library");
  std::string library_path;
  build->add_option("--library", library_path, "Library output path");

  auto* dep = app.add_subcommand("deploy", "Deploy a task on an object");
  std::string dep_object, dep_task = "pour", dep_library;
  dep->add_option("--object", dep_object, "Builtin object id")->required();
  dep->add_option("--task", dep_task, "Task label");
  dep->add_option("--library", dep_library, "Library JSON path");

  auto* exp = app.add_subcommand("experiment", "Run an experiment");
  std::string exp_which, exp_library;
  exp->add_option("which", exp_which, "similarity|rejection|compare")->required();
  exp->add_option("--library", exp_library, "Library JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    ExperimentConfig config =
        config_path.empty() ? ExperimentConfig::defaults() : load_config(config_path);
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (seed_set) config.seeds = {seed};
    config.validate();

    const std::string default_library = config.output_dir + "/library.json";

    if (*gen) {
      cmd_gen_demos(config, task_from_string(gen_task), gen_count,
                    DemoMix{gen_successful, gen_undesired}, std::cout);
    } else if (*build) {
      if (library_path.empty()) library_path = default_library;
      cmd_build_library(config, library_path, std::cout);
    } else if (*dep) {
      if (dep_library.empty()) dep_library = default_library;
      const Library library = load_library(dep_library);
      cmd_deploy(config, dep_object, task_from_string(dep_task), library, exhaustive, std::cout);
    } else if (*exp) {
      if (exp_library.empty()) exp_library = default_library;
      const Library library = load_library(exp_library);
      cmd_experiment(config, exp_which, library, std::cout);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
