#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace mcs_cli;
  CLI::App app{"Simulate macroscope protocols, verify them exhaustively and search for optimal ones"};
  app.set_version_flag("--version", std::string(mcs_version()));
  app.require_subcommand(1);

  std::string scenario, out = "-", format = "csv";
  auto* run = app.add_subcommand("run", "Run every input of every scenario and write a report");
  run->add_option("--scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--out", out, "Report path, - for standard output")->capture_default_str();
  run->add_option("--format", format, "csv or json")->capture_default_str();

  std::string protocol;
  uint32_t max_n = 0, d = 2;
  auto* verify = app.add_subcommand("verify", "Exhaustively verify a protocol on a family of small structures");
  verify->add_option("--protocol", protocol, "Protocol name")->required();
  verify->add_option("--max-n", max_n, "Largest input length")->required();
  verify->add_option("--d", d, "Alphabet size for constancy")->capture_default_str();

  SearchOptions so;
  auto* search = app.add_subcommand("search", "Find a minimum-cost protocol by exhaustive search");
  search->add_option("--function", so.function, "parity, constancy or bsf")->required();
  search->add_option("--n", so.n, "Input length")->required();
  search->add_option("--k", so.k, "Number of players")->required();
  search->add_option("--structure", so.structure,
                     "Structure JSON file, or partition | nof | even_cyclic | random_covering | singletons")
      ->required();
  search->add_option("--blindness", so.blindness, "sb or db")->capture_default_str();
  search->add_option("--budget", so.budget, "Largest total cost to try")->required();
  search->add_option("--d", so.d, "Alphabet size for constancy")->capture_default_str();
  search->add_option("--m", so.m, "Set size for even_cyclic");
  search->add_option("--seed", so.seed, "Seed for random_covering");

  auto* bounds = app.add_subcommand("bounds", "Print the cost formulas of every applicable protocol");
  bounds->add_option("--scenario", scenario, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*run) return run_command(scenario, out, format, std::cout, std::cerr);
  if (*verify) return verify_command(protocol, max_n, d, std::cout, std::cerr);
  if (*search) return search_command(so, std::cout, std::cerr);
  return bounds_command(scenario, std::cout, std::cerr);
}
