#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace mcs_cli {

struct ReportRow {
  std::string scenario_id;
  std::string function;
  uint32_t n = 0;
  uint32_t k = 0;
  std::string d_or_epsilon;
  std::string blindness;
  std::string structure_hash;
  uint32_t r = 0;
  uint64_t input_id = 0;
  uint64_t cost_bits = 0;
  uint64_t bound_bits = 0;
  bool correct = false;
  std::optional<double> max_abs_error;
};

enum class Format { Csv, Json };

Format parse_format(const std::string& name);

// Shortest text that reads back to the same double.
std::string format_double(double x);
std::string csv_field(const std::string& text);

// D for constancy, epsilon for average, empty otherwise.
std::string parameter_text(const Scenario& s);

void sort_rows(std::vector<ReportRow>& rows);
std::string to_csv(const std::vector<ReportRow>& rows);
std::string to_json(const std::vector<ReportRow>& rows);
std::string render(const std::vector<ReportRow>& rows, Format format);

}  // namespace mcs_cli
