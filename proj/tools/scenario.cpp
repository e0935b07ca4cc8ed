#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mcs_cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, std::string("missing field \"") + key + "\"");
  return *it;
}

uint64_t as_uint(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) fail(path, "expected an unsigned integer");
  return v.get<uint64_t>();
}

uint32_t as_u32(const json& v, const std::string& path) {
  uint64_t x = as_uint(v, path);
  if (x > UINT32_MAX) fail(path, "value too large");
  return static_cast<uint32_t>(x);
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError(file.string() + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Structure structure_from_file(const std::filesystem::path& file) {
  std::string text = read_file(file);
  mcs_structure_t s = nullptr;
  check(mcs_structure_from_json(&s, text.c_str()), file.string());
  return adopt(s);
}

Structure generate(const std::string& kind, uint32_t n, uint32_t k, uint32_t m, uint64_t seed,
                   const std::string& path) {
  mcs_structure_t s = nullptr;
  check(mcs_structure_generate(&s, kind.c_str(), n, k, m, seed), path);
  return adopt(s);
}

Structure parse_structure(const json& v, const std::filesystem::path& base_dir, const std::string& path) {
  if (v.is_string()) {
    std::filesystem::path file = v.get<std::string>();
    if (file.is_relative()) file = base_dir / file;
    return structure_from_file(file);
  }
  if (!v.is_object()) fail(path, "expected a file path or an object");
  uint32_t n = as_u32(field(v, "n", path), path + ".n");
  if (v.contains("sets")) {
    const json& sets = v["sets"];
    if (!sets.is_array()) fail(path + ".sets", "expected an array of index arrays");
    std::vector<uint32_t> sizes;
    std::vector<uint32_t> flat;
    for (size_t i = 0; i < sets.size(); ++i) {
      std::string here = path + ".sets[" + std::to_string(i) + "]";
      if (!sets[i].is_array()) fail(here, "expected an array of indices");
      sizes.push_back(static_cast<uint32_t>(sets[i].size()));
      for (size_t j = 0; j < sets[i].size(); ++j) {
        flat.push_back(as_u32(sets[i][j], here + "[" + std::to_string(j) + "]"));
      }
    }
    if (v.contains("k") && as_u32(v["k"], path + ".k") != sets.size()) {
      fail(path + ".k", "does not match the number of sets");
    }
    mcs_structure_t s = nullptr;
    check(mcs_structure_create(&s, n, static_cast<uint32_t>(sizes.size()), sizes.data(), flat.data()), path);
    return adopt(s);
  }
  std::string kind = as_string(field(v, "kind", path), path + ".kind");
  uint32_t k = as_u32(field(v, "k", path), path + ".k");
  uint32_t m = 0;
  if (kind == "even_cyclic") m = as_u32(field(v, "m", path), path + ".m");
  uint64_t seed = 0;
  if (kind == "random_covering") seed = as_uint(field(v, "seed", path), path + ".seed");
  return generate(kind, n, k, m, seed, path);
}

std::vector<Input> parse_explicit(const json& list, const Scenario& s, const std::string& path) {
  if (!list.is_array()) fail(path, "expected an array of input vectors");
  std::vector<Input> out;
  for (size_t i = 0; i < list.size(); ++i) {
    std::string here = path + "[" + std::to_string(i) + "]";
    const json& row = list[i];
    if (!row.is_array()) fail(here, "expected an array of values");
    if (row.size() != s.n) fail(here, "expected " + std::to_string(s.n) + " values, got " + std::to_string(row.size()));
    Input in;
    in.id = i;
    for (size_t j = 0; j < row.size(); ++j) {
      std::string cell = here + "[" + std::to_string(j) + "]";
      if (s.function == MCS_AVERAGE) {
        double x = as_real(row[j], cell);
        if (!(x >= 0.0 && x <= 1.0)) fail(cell, "value must lie in [0, 1]");
        in.real.push_back(x);
      } else if (s.function == MCS_CONSTANCY) {
        uint32_t x = as_u32(row[j], cell);
        if (x < 1 || x > s.alphabet) fail(cell, "value must lie in 1.." + std::to_string(s.alphabet));
        in.discrete.push_back(x - 1);
      } else {
        uint32_t x = as_u32(row[j], cell);
        if (x > 1) fail(cell, "value must be 0 or 1");
        in.discrete.push_back(x);
      }
    }
    out.push_back(std::move(in));
  }
  return out;
}

void parse_inputs(const json& v, Scenario& s, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() != "exhaustive") fail(path, "expected \"exhaustive\" or an object");
    s.mode = InputMode::Exhaustive;
  } else if (!v.is_object() || v.size() != 1) {
    fail(path, "expected exactly one of \"exhaustive\", \"explicit\" or \"random\"");
  } else if (v.contains("exhaustive")) {
    if (!v["exhaustive"].is_boolean() || !v["exhaustive"].get<bool>()) fail(path + ".exhaustive", "expected true");
    s.mode = InputMode::Exhaustive;
  } else if (v.contains("explicit")) {
    s.mode = InputMode::Explicit;
    s.explicit_inputs = parse_explicit(v["explicit"], s, path + ".explicit");
  } else if (v.contains("random")) {
    const json& r = v["random"];
    std::string here = path + ".random";
    if (!r.is_object()) fail(here, "expected an object with count and seed");
    s.mode = InputMode::Random;
    s.count = as_uint(field(r, "count", here), here + ".count");
    s.seed = as_uint(field(r, "seed", here), here + ".seed");
  } else {
    fail(path, "expected exactly one of \"exhaustive\", \"explicit\" or \"random\"");
  }
  if (s.mode == InputMode::Exhaustive && s.function == MCS_AVERAGE) {
    fail(path, "exhaustive inputs need a discrete function");
  }
}

Scenario parse_one(const json& v, const std::filesystem::path& base_dir, const std::string& path) {
  static const std::set<std::string> known = {"id",       "function", "d",      "epsilon", "blindness",
                                              "protocol", "structure", "inputs", "expect"};
  if (!v.is_object()) fail(path, "expected an object");
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (!known.count(it.key())) fail(path + "." + it.key(), "unknown field");
  }
  Scenario s;
  s.id = as_string(field(v, "id", path), path + ".id");
  if (s.id.empty()) fail(path + ".id", "must not be empty");
  const std::string fname = as_string(field(v, "function", path), path + ".function");
  try {
    s.function = parse_function(fname);
  } catch (const ConfigError& e) {
    fail(path + ".function", e.what());
  }
  if (s.function == MCS_CONSTANCY) {
    s.alphabet = as_u32(field(v, "d", path), path + ".d");
    if (s.alphabet < 2) fail(path + ".d", "alphabet size must be at least 2");
  }
  if (s.function == MCS_AVERAGE) {
    s.epsilon = as_real(field(v, "epsilon", path), path + ".epsilon");
    if (!(s.epsilon > 0.0 && s.epsilon <= 1.0)) fail(path + ".epsilon", "must lie in (0, 1]");
  }
  const std::string bname = as_string(field(v, "blindness", path), path + ".blindness");
  try {
    s.blindness = parse_blindness(bname);
  } catch (const ConfigError& e) {
    fail(path + ".blindness", e.what());
  }

  s.structure = parse_structure(field(v, "structure", path), base_dir, path + ".structure");
  check(mcs_structure_n(s.structure.get(), &s.n), path + ".structure");
  check(mcs_structure_k(s.structure.get(), &s.k), path + ".structure");
  mcs_macroscope_t m = nullptr;
  check(mcs_macroscope_create(&m, s.structure.get(), s.function, s.alphabet, s.epsilon, s.blindness),
        path + ".structure");
  s.macroscope = adopt(m);

  if (v.contains("protocol")) {
    std::string name = as_string(v["protocol"], path + ".protocol");
    check(mcs_protocol_from_name(name.c_str(), &s.protocol), path + ".protocol");
    mcs_blindness pb{};
    int supported = 0;
    check(mcs_protocol_blindness(s.protocol, &pb), path + ".protocol");
    check(mcs_protocol_supports(s.protocol, s.function, &supported), path + ".protocol");
    if (pb != s.blindness) fail(path + ".protocol", name + " is " + blindness_name(pb) + ", scenario is " + blindness_name(s.blindness));
    if (!supported) fail(path + ".protocol", name + " does not compute " + function_name(s.function));
  } else {
    check(mcs_default_protocol(s.function, s.blindness, &s.protocol), path + ".protocol");
  }

  parse_inputs(field(v, "inputs", path), s, path + ".inputs");

  if (v.contains("expect")) {
    const json& e = v["expect"];
    if (!e.is_object()) fail(path + ".expect", "expected an object");
    if (e.contains("bound_bits")) s.expected_bound = as_uint(e["bound_bits"], path + ".expect.bound_bits");
  }
  return s;
}

}  // namespace

std::string function_name(mcs_function f) {
  switch (f) {
    case MCS_PARITY: return "parity";
    case MCS_CONSTANCY: return "constancy";
    case MCS_BSF: return "bsf";
    case MCS_AVERAGE: return "average";
  }
  return "unknown";
}

mcs_function parse_function(const std::string& name) {
  if (name == "parity") return MCS_PARITY;
  if (name == "constancy") return MCS_CONSTANCY;
  if (name == "bsf") return MCS_BSF;
  if (name == "average") return MCS_AVERAGE;
  throw ConfigError("unknown function \"" + name + "\" (parity, constancy, bsf, average)");
}

std::string blindness_name(mcs_blindness b) { return b == MCS_DOUBLE_BLIND ? "db" : "sb"; }

mcs_blindness parse_blindness(const std::string& name) {
  if (name == "sb" || name == "single_blind") return MCS_SINGLE_BLIND;
  if (name == "db" || name == "double_blind") return MCS_DOUBLE_BLIND;
  throw ConfigError("unknown blindness \"" + name + "\" (sb, db)");
}

std::vector<Scenario> parse_scenarios(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  std::vector<Scenario> out;
  if (doc.is_object() && doc.contains("scenarios")) {
    const json& list = doc["scenarios"];
    if (!list.is_array() || list.empty()) fail("scenarios", "expected a non-empty array");
    for (size_t i = 0; i < list.size(); ++i) {
      out.push_back(parse_one(list[i], base_dir, "scenarios[" + std::to_string(i) + "]"));
    }
  } else {
    out.push_back(parse_one(doc, base_dir, "scenario"));
  }
  std::set<std::string> ids;
  for (const auto& s : out) {
    if (!ids.insert(s.id).second) fail("scenarios", "duplicate id \"" + s.id + "\"");
  }
  return out;
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& file) {
  std::string text = read_file(file);
  try {
    return parse_scenarios(text, file.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

Structure resolve_structure(const std::string& path_or_kind, uint32_t n, uint32_t k, uint32_t m, uint64_t seed) {
  static const std::set<std::string> kinds = {"partition", "nof", "even_cyclic", "random_covering"};
  if (kinds.count(path_or_kind)) return generate(path_or_kind, n, k, m, seed, "--structure");
  if (path_or_kind == "singletons") {
    if (n != k) throw ConfigError("--structure singletons needs n == k");
    return generate("partition", n, k, 0, 0, "--structure");
  }
  if (!std::filesystem::exists(path_or_kind)) {
    throw ConfigError("--structure: \"" + path_or_kind +
                      "\" is neither a file nor one of partition, nof, even_cyclic, random_covering, singletons");
  }
  Structure s = structure_from_file(path_or_kind);
  uint32_t sn = 0, sk = 0;
  check(mcs_structure_n(s.get(), &sn), path_or_kind);
  check(mcs_structure_k(s.get(), &sk), path_or_kind);
  if (sn != n || sk != k) {
    throw ConfigError(path_or_kind + ": structure has n=" + std::to_string(sn) + " k=" + std::to_string(sk) +
                      ", command line asks for n=" + std::to_string(n) + " k=" + std::to_string(k));
  }
  return s;
}

std::vector<Input> expand_inputs(const Scenario& s, uint64_t ceiling) {
  if (s.mode == InputMode::Explicit) return s.explicit_inputs;
  std::vector<Input> out;
  if (s.mode == InputMode::Random) {
    std::mt19937_64 rng(s.seed);
    out.reserve(s.count);
    for (uint64_t i = 0; i < s.count; ++i) {
      Input in;
      in.id = i;
      for (uint32_t j = 0; j < s.n; ++j) {
        if (s.function == MCS_AVERAGE) {
          in.real.push_back(static_cast<double>(rng() >> 11) * 0x1.0p-53);
        } else if (s.function == MCS_CONSTANCY) {
          in.discrete.push_back(static_cast<uint32_t>(rng() % s.alphabet));
        } else {
          in.discrete.push_back(static_cast<uint32_t>(rng() >> 63));
        }
      }
      out.push_back(std::move(in));
    }
    return out;
  }
  const uint64_t d = s.function == MCS_CONSTANCY ? s.alphabet : 2;
  uint64_t total = 1;
  for (uint32_t j = 0; j < s.n; ++j) {
    if (total > ceiling / d) {
      throw ConfigError("scenario " + s.id + ": exhaustive inputs exceed the ceiling of " + std::to_string(ceiling) +
                        "; use a smaller n or D, or raise MACROSCOPE_CEILING");
    }
    total *= d;
  }
  out.reserve(total);
  for (uint64_t id = 0; id < total; ++id) {
    Input in;
    in.id = id;
    in.discrete.assign(s.n, 0);
    uint64_t rest = id;
    for (uint32_t j = s.n; j-- > 0;) {
      in.discrete[j] = static_cast<uint32_t>(rest % d);
      rest /= d;
    }
    out.push_back(std::move(in));
  }
  return out;
}

}  // namespace mcs_cli
