#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "report.hpp"
#include "scenario.hpp"

namespace mcs_cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIncorrect = 1;
inline constexpr int kExitConfig = 2;

inline constexpr uint64_t kDefaultInputCeiling = uint64_t{1} << 20;

// MACROSCOPE_CEILING, if set.
std::optional<uint64_t> env_ceiling();

struct RunOutcome {
  std::vector<ReportRow> rows;
  uint64_t incorrect = 0;
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

RunOutcome run_scenarios(const std::vector<Scenario>& scenarios, uint64_t input_ceiling);

struct SearchOptions {
  std::string function;
  uint32_t n = 0;
  uint32_t k = 0;
  std::string structure;
  std::string blindness = "sb";
  uint32_t budget = 0;
  uint32_t d = 2;
  uint32_t m = 0;
  uint64_t seed = 0;
};

// Each returns a process exit code; diagnostics go to err.
int run_command(const std::filesystem::path& scenario, const std::string& out, const std::string& format,
                std::ostream& stdout_stream, std::ostream& err);
int bounds_command(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);
int verify_command(const std::string& protocol, uint32_t max_n, uint32_t d, std::ostream& out, std::ostream& err);
int search_command(const SearchOptions& options, std::ostream& out, std::ostream& err);

}  // namespace mcs_cli
