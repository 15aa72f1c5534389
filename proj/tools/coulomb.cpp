#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "coulomb/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Coulomb gas partition functions on the sphere and the torus: exact values, asymptotic expansions "
               "and verification suites"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> only;
  std::optional<std::string> out;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"verify-sphere", "residuals of the sphere expansion against exact values"},
      {"verify-torus", "torus expansion against the exact theta-weighted formula"},
      {"identities", "run the identity suites"},
      {"fit-b2", "fit the quadratic coefficient from Gram determinants"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "config file (flat TOML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "residual CSV output path");
    if (std::string(c.name) == "identities") sub->add_option("--only", only, "run a single suite");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : coulomb::harness::kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return coulomb::harness::run_command(command, config_path, only, out, std::cout);
}
