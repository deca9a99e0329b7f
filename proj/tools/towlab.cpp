#include <cstdint>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "tow/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tug-of-war laboratory for weakly coupled infinity-Laplace systems"};
  app.require_subcommand(1);

  tow::CliOptions opt;
  std::uint64_t seed_value = 0;
  std::map<std::string, CLI::Option*> seed_opts;
  for (const std::string name :
       {"solve", "simulate", "analyze", "cones", "markov"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "config file path")->required();
    sub->add_option("--out", opt.out_dir, "output directory (overrides [output] dir)");
    seed_opts[name] = sub->add_option("--seed", seed_value, "RNG seed (overrides [game] seed)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* chosen = app.get_subcommands().front();
  opt.subcommand = chosen->get_name();
  if (seed_opts[opt.subcommand]->count() > 0) opt.seed = seed_value;
  return tow::run_subcommand(opt, std::cerr);
}
