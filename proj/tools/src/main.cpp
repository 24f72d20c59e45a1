#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace qgi::cli;
  CLI::App app{"qgi: N-photon ghost imaging simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QGI_VERSION);

  RunOptions opt;
  std::string engine;

  for (const char* name : {"psf", "image", "resolve", "sweep", "speckle", "validate"}) {
    auto* sub = app.add_subcommand(name);
    auto* config = sub->add_option("--config", opt.config_path, "scenario YAML file");
    if (std::string(name) != "validate") config->required();
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--seed", opt.seed, "RNG seed (overrides the config)");
    sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--engine", engine, "analytic, numeric or both")
        ->check(CLI::IsMember({"analytic", "numeric", "both"}));
    if (std::string(name) == "validate") {
      sub->add_option("--inject-fault", opt.inject_fault)->group("");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (!engine.empty()) opt.engine = parse_engine(engine);
  return run_command(app.get_subcommands().front()->get_name(), opt, std::cout, std::cerr);
}
