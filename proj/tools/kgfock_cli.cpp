#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "kgfock/app/golden.hpp"
#include "kgfock/app/runner.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Truncated Fock-space experiments for the charged P(phi)_2 model"};
  cli.require_subcommand(1);

  std::string config_path;
  for (const auto& name : kgfock::app::subcommands()) {
    auto* sub = cli.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "experiment config (JSON)")->required();
  }
  std::string suite_path;
  auto* golden = cli.add_subcommand("golden-check", "recompute pinned values and compare");
  golden->add_option("-s,--suite", suite_path, "golden suite (JSON)")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : kgfock::app::kValidation;
  }

  if (golden->parsed()) return kgfock::app::golden_check(suite_path, std::cout, std::cerr);
  const std::string name = cli.get_subcommands().front()->get_name();
  return kgfock::app::run_command(name, config_path, std::cout, std::cerr);
}
