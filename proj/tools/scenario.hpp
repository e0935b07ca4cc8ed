#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "handles.hpp"

namespace mcs_cli {

enum class InputMode { Exhaustive, Explicit, Random };

// One concrete input. Discrete values are 0-based.
struct Input {
  uint64_t id = 0;
  std::vector<uint32_t> discrete;
  std::vector<double> real;
};

struct Scenario {
  std::string id;
  mcs_function function = MCS_PARITY;
  uint32_t alphabet = 2;
  double epsilon = 0.0;
  mcs_blindness blindness = MCS_SINGLE_BLIND;
  mcs_protocol protocol = MCS_SB_GENERIC;
  Structure structure;
  Macroscope macroscope;
  uint32_t n = 0;
  uint32_t k = 0;
  InputMode mode = InputMode::Exhaustive;
  std::vector<Input> explicit_inputs;
  uint64_t count = 0;
  uint64_t seed = 0;
  std::optional<uint64_t> expected_bound;
};

std::string function_name(mcs_function f);
mcs_function parse_function(const std::string& name);
std::string blindness_name(mcs_blindness b);
mcs_blindness parse_blindness(const std::string& name);

// Accepts a single scenario object or {"scenarios": [...]}. Relative
// structure file paths resolve against base_dir.
std::vector<Scenario> parse_scenarios(const std::string& text, const std::filesystem::path& base_dir = {});
std::vector<Scenario> load_scenarios(const std::filesystem::path& file);

// Builds a structure from a JSON file path or a generator kind.
Structure resolve_structure(const std::string& path_or_kind, uint32_t n, uint32_t k, uint32_t m, uint64_t seed);

std::vector<Input> expand_inputs(const Scenario& s, uint64_t ceiling);

}  // namespace mcs_cli
