// blowup: classify | profile | predict | solve | verify --config <file> --out <dir> [--sweep <param=list>]
//
// BLOWUP_TOL overrides the default numerical tolerance.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "blowup/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Large solutions of semilinear elliptic problems: weight classification, profiles, expansions, solver"};
  app.require_subcommand(1);

  std::string config, out = ".", sweep;
  for (const char* name : {"classify", "profile", "predict", "solve", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (created if missing)");
    sub->add_option("--sweep", sweep, "section.key=v1,v2,... : one run per value into <out>/<key>=<value>");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : blowup::cli::config_error;
  }

  const auto verb = blowup::parse_verb(app.get_subcommands().front()->get_name());
  std::ifstream in(config, std::ios::binary);
  if (!in) {
    std::cerr << "configuration error: cannot read " << config << '\n';
    return blowup::cli::config_error;
  }
  std::stringstream text;
  text << in.rdbuf();

  if (!sweep.empty()) return blowup::cli::run_sweep(*verb, text.str(), out, sweep, std::cout, std::cerr);
  return blowup::cli::run(*verb, text.str(), out, {}, std::cout, std::cerr);
}
