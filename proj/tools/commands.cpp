#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>

namespace mcs_cli {

namespace {

uint32_t ceil_log2(uint64_t x) {
  uint32_t b = 0;
  while ((uint64_t{1} << b) < x) ++b;
  return b;
}

const char* formula(mcs_protocol p) {
  switch (p) {
    case MCS_SB_GENERIC: return "N*w, w = max(1, ceil(log2 D))";
    case MCS_DB_GENERIC: return "sum_i (N + |S_i|*w)";
    case MCS_SB_CONSTANCY: return "r*ceil(log2 D) + k";
    case MCS_DB_CONSTANCY: return "k*ceil(log2(D+1))";
    case MCS_DB_BSF: return "2k*ceil(log2(N+2))";
    case MCS_SB_BSF: return "k*(ceil(log2 N) + 2)";
    case MCS_SB_AVERAGE: return "k*b, b = min{b : eps*2^b >= k}";
  }
  return "";
}

std::string describe(const Scenario& s) {
  std::string text = function_name(s.function);
  if (s.function == MCS_CONSTANCY) text += " D=" + std::to_string(s.alphabet);
  if (s.function == MCS_AVERAGE) text += " eps=" + format_double(s.epsilon);
  return text + " N=" + std::to_string(s.n) + " k=" + std::to_string(s.k);
}

int report_config(const ConfigError& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  return kExitConfig;
}

}  // namespace

std::optional<uint64_t> env_ceiling() {
  const char* raw = std::getenv("MACROSCOPE_CEILING");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  std::string text = raw;
  uint64_t value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || value == 0) {
    throw ConfigError("MACROSCOPE_CEILING must be a positive integer, got \"" + text + "\"");
  }
  return value;
}

RunOutcome run_scenarios(const std::vector<Scenario>& scenarios, uint64_t input_ceiling) {
  RunOutcome outcome;
  for (const auto& s : scenarios) {
    const std::string hash = digest(s.structure.get());
    const uint32_t r = component_count(s.structure.get());
    uint64_t bound = 0;
    check(mcs_theoretical_bound(s.protocol, s.macroscope.get(), &bound), "scenario " + s.id);
    if (s.expected_bound && *s.expected_bound != bound) {
      outcome.problems.push_back("scenario " + s.id + ": bound_bits " + std::to_string(bound) + ", expected " +
                                 std::to_string(*s.expected_bound));
    }
    for (const auto& in : expand_inputs(s, input_ceiling)) {
      ReportRow row;
      row.scenario_id = s.id;
      row.function = function_name(s.function);
      row.n = s.n;
      row.k = s.k;
      row.d_or_epsilon = parameter_text(s);
      row.blindness = blindness_name(s.blindness);
      row.structure_hash = hash;
      row.r = r;
      row.input_id = in.id;
      row.bound_bits = bound;
      mcs_run_t raw = nullptr;
      int status = s.function == MCS_AVERAGE
                       ? mcs_run_real(&raw, s.protocol, s.macroscope.get(), in.real.data(), in.real.size())
                       : mcs_run_discrete(&raw, s.protocol, s.macroscope.get(), in.discrete.data(), in.discrete.size());
      if (status == MCS_ERR_PROTOCOL) {
        row.correct = false;
        outcome.problems.push_back("scenario " + s.id + " input " + std::to_string(in.id) + ": " + mcs_last_error());
      } else {
        check(status, "scenario " + s.id + " input " + std::to_string(in.id));
        Run run(raw);
        int correct = 0;
        check(mcs_run_cost_bits(run.get(), &row.cost_bits), "cost");
        check(mcs_run_correct(run.get(), &correct), "correct");
        row.correct = correct != 0 && row.cost_bits == bound;
        if (s.function == MCS_AVERAGE) {
          double e = 0;
          check(mcs_run_max_abs_error(run.get(), &e), "error");
          row.max_abs_error = e;
        }
        if (!row.correct) {
          outcome.problems.push_back("scenario " + s.id + " input " + std::to_string(in.id) +
                                     (correct ? ": cost " + std::to_string(row.cost_bits) + " differs from bound"
                                              : std::string(": wrong output")));
        }
      }
      if (!row.correct) ++outcome.incorrect;
      outcome.rows.push_back(std::move(row));
    }
  }
  sort_rows(outcome.rows);
  return outcome;
}

int run_command(const std::filesystem::path& scenario, const std::string& out, const std::string& format,
                std::ostream& stdout_stream, std::ostream& err) {
  try {
    Format fmt = parse_format(format);
    auto scenarios = load_scenarios(scenario);
    auto outcome = run_scenarios(scenarios, env_ceiling().value_or(kDefaultInputCeiling));
    std::string text = render(outcome.rows, fmt);
    if (out == "-") {
      stdout_stream << text;
    } else {
      std::ofstream file(out, std::ios::binary | std::ios::trunc);
      if (!file) throw ConfigError(out + ": cannot open for writing");
      file << text;
      file.close();
      if (!file) throw ConfigError(out + ": write failed");
    }
    if (!outcome.ok()) {
      err << outcome.incorrect << " of " << outcome.rows.size() << " rows incorrect, "
          << outcome.problems.size() << " problems\n";
      const size_t shown = std::min<size_t>(outcome.problems.size(), 10);
      for (size_t i = 0; i < shown; ++i) err << "  " << outcome.problems[i] << "\n";
      return kExitIncorrect;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    return report_config(e, err);
  }
}

int bounds_command(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err) {
  try {
    auto scenarios = load_scenarios(scenario);
    for (const auto& s : scenarios) {
      const uint32_t r = component_count(s.structure.get());
      out << "scenario " << s.id << ": " << describe(s) << " r=" << r << "\n";
      for (int i = 0; i < MCS_PROTOCOL_COUNT; ++i) {
        auto p = static_cast<mcs_protocol>(i);
        int supported = 0;
        check(mcs_protocol_supports(p, s.function, &supported), "protocol");
        if (!supported) continue;
        mcs_blindness b{};
        check(mcs_protocol_blindness(p, &b), "protocol");
        mcs_macroscope_t raw = nullptr;
        if (mcs_macroscope_create(&raw, s.structure.get(), s.function, s.alphabet, s.epsilon, b) != MCS_OK) {
          out << "  " << std::left << std::setw(14) << mcs_protocol_name(p) << "not applicable: " << mcs_last_error()
              << "\n";
          continue;
        }
        Macroscope m = adopt(raw);
        uint64_t bits = 0;
        check(mcs_theoretical_bound(p, m.get(), &bits), "bound");
        out << "  " << std::left << std::setw(14) << mcs_protocol_name(p) << std::setw(4) << blindness_name(b)
            << std::right << std::setw(8) << bits << "  " << formula(p) << "\n";
      }
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    return report_config(e, err);
  }
}

int verify_command(const std::string& protocol, uint32_t max_n, uint32_t d, std::ostream& out, std::ostream& err) {
  try {
    mcs_protocol p{};
    check(mcs_protocol_from_name(protocol.c_str(), &p), "--protocol");
    if (max_n < 1) throw ConfigError("--max-n must be at least 1");
    if (d < 2) throw ConfigError("--d must be at least 2");
    mcs_blindness b{};
    check(mcs_protocol_blindness(p, &b), "--protocol");
    std::vector<mcs_function> functions;
    for (auto f : {MCS_PARITY, MCS_CONSTANCY, MCS_BSF}) {
      int supported = 0;
      check(mcs_protocol_supports(p, f, &supported), "--protocol");
      if (supported) functions.push_back(f);
    }
    if (functions.empty()) {
      throw ConfigError(protocol + " takes real-valued inputs; exhaustive verification covers discrete functions");
    }
    const uint64_t ceiling = env_ceiling().value_or(kDefaultInputCeiling);
    const bool dary = std::find(functions.begin(), functions.end(), MCS_CONSTANCY) != functions.end();
    const uint64_t alphabet = dary ? std::max<uint32_t>(d, 2) : 2;
    uint64_t largest = 1;
    for (uint32_t i = 0; i < max_n; ++i) {
      if (largest > ceiling / alphabet) {
        throw ConfigError("--max-n " + std::to_string(max_n) + " needs more than the ceiling of " +
                          std::to_string(ceiling) + " inputs; lower it or raise MACROSCOPE_CEILING");
      }
      largest *= alphabet;
    }

    uint64_t cases = 0, failing = 0;
    for (uint32_t n = 1; n <= max_n; ++n) {
      std::vector<std::pair<std::string, Structure>> family;
      auto add_generated = [&](const std::string& label, const char* kind, uint32_t k, uint32_t m, uint64_t seed) {
        mcs_structure_t raw = nullptr;
        if (mcs_structure_generate(&raw, kind, n, k, m, seed) == MCS_OK) family.emplace_back(label, adopt(raw));
      };
      auto add_explicit = [&](const std::string& label, const std::vector<std::vector<uint32_t>>& sets) {
        std::vector<uint32_t> sizes, flat;
        for (const auto& set : sets) {
          sizes.push_back(static_cast<uint32_t>(set.size()));
          flat.insert(flat.end(), set.begin(), set.end());
        }
        mcs_structure_t raw = nullptr;
        check(mcs_structure_create(&raw, n, static_cast<uint32_t>(sets.size()), sizes.data(), flat.data()), label);
        family.emplace_back(label, adopt(raw));
      };
      for (uint32_t k = 1; k <= std::min<uint32_t>(n, 3); ++k) add_generated("partition", "partition", k, 0, 0);
      if (n > 3) add_generated("singletons", "partition", n, 0, 0);
      for (uint32_t k = 2; k <= std::min<uint32_t>(n, 3); ++k) add_generated("nof", "nof", k, 0, 0);
      if (n >= 3) add_generated("even_cyclic", "even_cyclic", n, 2, 0);
      if (n >= 2) {
        std::vector<std::vector<uint32_t>> chain;
        for (uint32_t i = 1; i < n; ++i) chain.push_back({i, i + 1});
        add_explicit("chain", chain);
        std::vector<uint32_t> all;
        for (uint32_t i = 1; i <= n; ++i) all.push_back(i);
        add_explicit("full_overlap", {all, all});
      }
      add_generated("random_covering", "random_covering", std::min<uint32_t>(n, 3), 0, n);

      std::set<std::string> seen;
      for (const auto& [label, structure] : family) {
        if (!seen.insert(digest(structure.get())).second) continue;
        uint32_t k = 0;
        check(mcs_structure_k(structure.get(), &k), label);
        for (auto f : functions) {
          mcs_macroscope_t raw = nullptr;
          if (mcs_macroscope_create(&raw, structure.get(), f, d, 0.0, b) != MCS_OK) continue;
          Macroscope m = adopt(raw);
          mcs_verify_t vraw = nullptr;
          check(mcs_verify(&vraw, p, m.get(), ceiling), "n=" + std::to_string(n) + " " + label);
          Verify v(vraw);
          uint64_t inputs = 0, failures = 0, mismatches = 0, bound = 0;
          int passed = 0;
          check(mcs_verify_inputs(v.get(), &inputs), "verify");
          check(mcs_verify_failures(v.get(), &failures), "verify");
          check(mcs_verify_cost_mismatches(v.get(), &mismatches), "verify");
          check(mcs_verify_bound_bits(v.get(), &bound), "verify");
          check(mcs_verify_passed(v.get(), &passed), "verify");
          ++cases;
          out << "n=" << n << " k=" << k << " " << label << " " << function_name(f);
          if (f == MCS_CONSTANCY) out << " D=" << d;
          out << " inputs=" << inputs << " failures=" << failures << " cost_mismatches=" << mismatches
              << " bound=" << bound << (passed ? " ok" : " FAILED") << "\n";
          if (!passed) {
            ++failing;
            for (size_t i = 0; i < 3 && i < failures; ++i) {
              out << "  " << read_text([&](char* buf, size_t len, size_t* need) {
                return mcs_verify_failure_text(v.get(), i, buf, len, need);
              }, "failure") << "\n";
            }
          }
        }
      }
    }
    out << protocol << ": " << cases << " cases, " << failing << " failing\n";
    return failing == 0 ? kExitOk : kExitIncorrect;
  } catch (const ConfigError& e) {
    return report_config(e, err);
  }
}

int search_command(const SearchOptions& o, std::ostream& out, std::ostream& err) {
  try {
    mcs_function f = parse_function(o.function);
    mcs_blindness b = parse_blindness(o.blindness);
    if (f == MCS_CONSTANCY && o.d < 2) throw ConfigError("--d must be at least 2");
    Structure s = resolve_structure(o.structure, o.n, o.k, o.m, o.seed);
    const uint64_t ceiling = env_ceiling().value_or(0);
    mcs_search_t raw = nullptr;
    check(mcs_search(&raw, f, o.d, s.get(), b, o.budget, ceiling), "search");
    Search result(raw);
    const uint32_t r = component_count(s.get());

    out << "function " << function_name(f);
    if (f == MCS_CONSTANCY) out << " D=" << o.d;
    out << " n=" << o.n << " k=" << o.k << " blindness " << blindness_name(b) << " budget " << o.budget << "\n";
    out << "structure " << structure_json(s.get()) << "\n";
    out << "r " << r << "\n";
    int found = 0;
    uint64_t explored = 0;
    check(mcs_search_found(result.get(), &found), "search");
    check(mcs_search_explored(result.get(), &explored), "search");
    if (!found) {
      out << "min_cost none <= " << o.budget << "\n";
      out << "explored " << explored << "\n";
      return kExitOk;
    }
    uint32_t cost = 0;
    int replay = 0;
    check(mcs_search_min_cost(result.get(), &cost), "search");
    check(mcs_search_verify_witness(result.get(), &replay), "search");
    out << "min_cost " << cost << "\n";
    out << "explored " << explored << "\n";
    if (f == MCS_CONSTANCY) {
      const uint64_t rw = uint64_t{r} * ceil_log2(o.d);
      const uint64_t lower = std::max<uint64_t>(o.k, rw);
      const uint64_t upper = rw + o.k;
      const bool holds = lower <= cost && cost <= upper;
      out << "sandwich max(k, r*ceil(log2 D)) = " << lower << " <= " << cost << " <= r*ceil(log2 D) + k = " << upper
          << ": " << (holds ? "holds" : "violated") << "\n";
    }
    out << "witness " << (replay ? "verified" : "FAILED verification") << "\n";
    out << read_text([&](char* buf, size_t len, size_t* need) {
      return mcs_search_witness_text(result.get(), buf, len, need);
    }, "witness");
    return replay ? kExitOk : kExitIncorrect;
  } catch (const ConfigError& e) {
    return report_config(e, err);
  }
}

}  // namespace mcs_cli
