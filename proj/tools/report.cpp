#include "report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <json.hpp>

namespace mcs_cli {

namespace {

const char* const kColumns[] = {"scenario_id", "function", "n", "k", "d_or_epsilon", "blindness", "structure_hash",
                                "r", "input_id", "cost_bits", "bound_bits", "correct", "max_abs_error"};

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw ConfigError("unknown format \"" + name + "\" (csv, json)");
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string parameter_text(const Scenario& s) {
  if (s.function == MCS_CONSTANCY) return std::to_string(s.alphabet);
  if (s.function == MCS_AVERAGE) return format_double(s.epsilon);
  return "";
}

void sort_rows(std::vector<ReportRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    if (a.scenario_id != b.scenario_id) return a.scenario_id < b.scenario_id;
    return a.input_id < b.input_id;
  });
}

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::string out;
  for (size_t i = 0; i < std::size(kColumns); ++i) {
    if (i) out += ',';
    out += kColumns[i];
  }
  out += "\r\n";
  for (const auto& r : rows) {
    out += csv_field(r.scenario_id) + ',' + csv_field(r.function) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.k) + ',' + csv_field(r.d_or_epsilon) + ',' + csv_field(r.blindness) + ',' +
           csv_field(r.structure_hash) + ',' + std::to_string(r.r) + ',' + std::to_string(r.input_id) + ',' +
           std::to_string(r.cost_bits) + ',' + std::to_string(r.bound_bits) + ',' + (r.correct ? "true" : "false") +
           ',' + (r.max_abs_error ? format_double(*r.max_abs_error) : std::string()) + "\r\n";
  }
  return out;
}

std::string to_json(const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["scenario_id"] = r.scenario_id;
    o["function"] = r.function;
    o["n"] = r.n;
    o["k"] = r.k;
    if (r.d_or_epsilon.empty()) {
      o["d_or_epsilon"] = nullptr;
    } else if (r.function == "average") {
      o["d_or_epsilon"] = std::stod(r.d_or_epsilon);
    } else {
      o["d_or_epsilon"] = std::stoull(r.d_or_epsilon);
    }
    o["blindness"] = r.blindness;
    o["structure_hash"] = r.structure_hash;
    o["r"] = r.r;
    o["input_id"] = r.input_id;
    o["cost_bits"] = r.cost_bits;
    o["bound_bits"] = r.bound_bits;
    o["correct"] = r.correct;
    if (r.max_abs_error) {
      o["max_abs_error"] = *r.max_abs_error;
    } else {
      o["max_abs_error"] = nullptr;
    }
    doc.push_back(std::move(o));
  }
  return doc.dump(2) + "\n";
}

std::string render(const std::vector<ReportRow>& rows, Format format) {
  return format == Format::Csv ? to_csv(rows) : to_json(rows);
}

}  // namespace mcs_cli
