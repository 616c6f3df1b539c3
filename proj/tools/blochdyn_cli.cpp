#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>

#include "blochdyn/commands.hpp"

int main(int argc, char** argv) {
  blochdyn::CommandOptions options;
  std::string scenario;

  CLI::App app{"Bloch-electron dynamics: band structure, semiclassical and quantum propagation"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--out", options.out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", options.threads, "Worker threads for k-space sweeps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", options.seed, "Seed for randomized acceptance checks")->capture_default_str();

  const std::map<std::string, std::string> help = {
      {"bands", "Band structure sweep over the zone"},
      {"wavepacket", "Wavepacket in a uniform field (semiclassical, optional split-step)"},
      {"cyclotron", "Symmetric-gauge cyclotron orbit"},
      {"compare-eom", "Symmetric-gauge equation versus the Lorentz force"},
      {"adiabatic", "Plane-wave basis propagation with adiabatic diagnostics"},
      {"conduction", "Band-filling velocity sum and conductor/insulator test"},
      {"solenoid", "Vector-potential shift from a solenoid"},
      {"validate", "Run the acceptance suite"},
  };
  for (const auto& name : blochdyn::command_names()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    if (name != "validate") sub->add_option("--scenario", scenario, "Scenario JSON file")->required();
    sub->callback([&options, name] { options.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : blochdyn::kExitConfig;
  }
  if (!scenario.empty()) options.scenario = scenario;
  return blochdyn::run_command(options, std::cout, std::cerr);
}
