#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "disjoint_set.hpp"
#include "error.hpp"
#include "json.hpp"

namespace macroscope {

std::string_view to_string(Blindness b) {
  return b == Blindness::SingleBlind ? "sb" : "db";
}

std::string_view to_string(FunctionKind f) {
  switch (f) {
    case FunctionKind::Parity: return "parity";
    case FunctionKind::Constancy: return "constancy";
    case FunctionKind::Bsf: return "bsf";
    case FunctionKind::Average: return "average";
  }
  return "?";
}

Blindness parse_blindness(std::string_view text) {
  if (text == "sb" || text == "single-blind" || text == "single_blind") return Blindness::SingleBlind;
  if (text == "db" || text == "double-blind" || text == "double_blind") return Blindness::DoubleBlind;
  throw Error(ErrorCode::InvalidArgument, "unknown blindness '" + std::string(text) + "' (expected sb or db)");
}

FunctionKind parse_function_kind(std::string_view text) {
  if (text == "parity") return FunctionKind::Parity;
  if (text == "constancy") return FunctionKind::Constancy;
  if (text == "bsf") return FunctionKind::Bsf;
  if (text == "average") return FunctionKind::Average;
  throw Error(ErrorCode::InvalidArgument, "unknown function '" + std::string(text) +
                                              "' (expected parity, constancy, bsf or average)");
}

AllotmentStructure::AllotmentStructure(std::uint32_t n, std::vector<std::vector<Index>> sets)
    : n_(n), sets_(std::move(sets)) {
  if (n_ < 1) throw Error(ErrorCode::InvalidArgument, "structure needs n >= 1");
  if (sets_.empty()) throw Error(ErrorCode::InvalidArgument, "structure needs k >= 1");
  for (std::size_t p = 0; p < sets_.size(); ++p) {
    auto& s = sets_[p];
    for (Index i : s) {
      if (i < 1 || i > n_) {
        throw Error(ErrorCode::InvalidArgument, "set of player " + std::to_string(p + 1) +
                                                    " holds index " + std::to_string(i) +
                                                    " outside 1.." + std::to_string(n_));
      }
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
}

bool AllotmentStructure::contains(Player p, Index i) const {
  const auto& s = set(p);
  return std::binary_search(s.begin(), s.end(), i);
}

namespace {

std::vector<std::uint32_t> multiplicities(const AllotmentStructure& s) {
  std::vector<std::uint32_t> count(s.n() + 1, 0);
  for (const auto& set : s.sets()) {
    for (Index i : set) ++count[i];
  }
  return count;
}

}  // namespace

std::vector<Index> uncovered_indices(const AllotmentStructure& s) {
  auto count = multiplicities(s);
  std::vector<Index> out;
  for (Index i = 1; i <= s.n(); ++i) {
    if (count[i] == 0) out.push_back(i);
  }
  return out;
}

bool validate_covering(const AllotmentStructure& s) { return uncovered_indices(s).empty(); }

std::optional<std::uint32_t> evenness(const AllotmentStructure& s) {
  auto count = multiplicities(s);
  const std::uint32_t c = count[1];
  for (Index i = 2; i <= s.n(); ++i) {
    if (count[i] != c) return std::nullopt;
  }
  const std::size_t size = s.sets().front().size();
  for (const auto& set : s.sets()) {
    if (set.size() != size) return std::nullopt;
  }
  return c;
}

IntersectionGraph intersection_graph(const AllotmentStructure& s) {
  IntersectionGraph g;
  g.players = s.k();
  DisjointSet dsu(s.k());
  for (Player i = 1; i <= s.k(); ++i) {
    for (Player j = i + 1; j <= s.k(); ++j) {
      const auto& a = s.set(i);
      const auto& b = s.set(j);
      auto ia = a.begin();
      auto ib = b.begin();
      bool meet = false;
      while (ia != a.end() && ib != b.end()) {
        if (*ia == *ib) {
          meet = true;
          break;
        }
        if (*ia < *ib) ++ia; else ++ib;
      }
      if (meet) {
        g.edges.emplace_back(i, j);
        dsu.unite(i - 1, j - 1);
      }
    }
  }
  std::vector<std::int64_t> root_to_component(s.k(), -1);
  g.component_of.assign(s.k(), 0);
  for (Player p = 1; p <= s.k(); ++p) {
    auto root = dsu.find(p - 1);
    if (root_to_component[root] < 0) {
      root_to_component[root] = static_cast<std::int64_t>(g.components.size());
      g.components.emplace_back();
    }
    auto c = static_cast<std::uint32_t>(root_to_component[root]);
    g.components[c].push_back(p);
    g.component_of[p - 1] = c;
  }
  return g;
}

Player responsible_player(const AllotmentStructure& s, Index index) {
  if (index < 1 || index > s.n()) {
    throw Error(ErrorCode::InvalidArgument, "index " + std::to_string(index) + " outside 1.." +
                                                std::to_string(s.n()));
  }
  for (Player p = 1; p <= s.k(); ++p) {
    if (s.contains(p, index)) return p;
  }
  throw Error(ErrorCode::CoveringViolation, "index " + std::to_string(index) + " is not covered");
}

std::uint32_t multiplicity(const AllotmentStructure& s, Index index) {
  std::uint32_t c = 0;
  for (Player p = 1; p <= s.k(); ++p) {
    if (s.contains(p, index)) ++c;
  }
  return c;
}

StructureKind parse_structure_kind(std::string_view text) {
  if (text == "partition") return StructureKind::Partition;
  if (text == "nof") return StructureKind::Nof;
  if (text == "even_cyclic") return StructureKind::EvenCyclic;
  if (text == "random_covering") return StructureKind::RandomCovering;
  if (text == "explicit") return StructureKind::Explicit;
  throw Error(ErrorCode::InvalidArgument, "unknown structure kind '" + std::string(text) + "'");
}

std::string_view to_string(StructureKind kind) {
  switch (kind) {
    case StructureKind::Partition: return "partition";
    case StructureKind::Nof: return "nof";
    case StructureKind::EvenCyclic: return "even_cyclic";
    case StructureKind::RandomCovering: return "random_covering";
    case StructureKind::Explicit: return "explicit";
  }
  return "?";
}

namespace {

// Contiguous near-equal blocks; the first n % k blocks are one longer.
std::vector<std::vector<Index>> blocks(std::uint32_t n, std::uint32_t k) {
  std::vector<std::vector<Index>> out(k);
  Index next = 1;
  for (std::uint32_t b = 0; b < k; ++b) {
    std::uint32_t len = n / k + (b < n % k ? 1 : 0);
    for (std::uint32_t t = 0; t < len; ++t) out[b].push_back(next++);
  }
  return out;
}

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

AllotmentStructure generate_structure(StructureKind kind, std::uint32_t n, std::uint32_t k,
                                      const GeneratorParams& params, std::uint64_t seed) {
  if (n < 1 || k < 1) throw Error(ErrorCode::InvalidArgument, "generator needs n >= 1 and k >= 1");
  switch (kind) {
    case StructureKind::Partition: {
      if (k > n) throw Error(ErrorCode::InvalidArgument, "partition needs k <= n");
      return AllotmentStructure(n, blocks(n, k));
    }
    case StructureKind::Nof: {
      if (k > n) throw Error(ErrorCode::InvalidArgument, "nof needs k <= n");
      if (k < 2) throw Error(ErrorCode::InvalidArgument, "nof needs k >= 2 to cover every index");
      auto b = blocks(n, k);
      std::vector<std::vector<Index>> sets(k);
      for (std::uint32_t p = 0; p < k; ++p) {
        for (std::uint32_t q = 0; q < k; ++q) {
          if (q != p) sets[p].insert(sets[p].end(), b[q].begin(), b[q].end());
        }
      }
      return AllotmentStructure(n, std::move(sets));
    }
    case StructureKind::EvenCyclic: {
      const std::uint32_t m = params.set_size;
      if (m < 1 || m > n) throw Error(ErrorCode::InvalidArgument, "even_cyclic needs 1 <= m <= n");
      if (static_cast<std::uint64_t>(k) * m < n) {
        throw Error(ErrorCode::InvalidArgument, "even_cyclic needs k*m >= n to cover every index");
      }
      std::vector<std::vector<Index>> sets(k);
      for (std::uint32_t p = 0; p < k; ++p) {
        std::uint64_t start = params.stride ? static_cast<std::uint64_t>(p) * *params.stride
                                            : static_cast<std::uint64_t>(p) * n / k;
        for (std::uint32_t t = 0; t < m; ++t) {
          sets[p].push_back(static_cast<Index>((start + t) % n) + 1);
        }
      }
      AllotmentStructure s(n, std::move(sets));
      if (!validate_covering(s)) {
        throw Error(ErrorCode::InvalidArgument, "even_cyclic stride leaves indices uncovered");
      }
      return s;
    }
    case StructureKind::RandomCovering: {
      if (!(params.density >= 0.0 && params.density <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "random_covering density must lie in [0,1]");
      }
      std::mt19937_64 rng(seed);
      std::vector<std::vector<Index>> sets(k);
      std::vector<bool> covered(n + 1, false);
      for (std::uint32_t p = 0; p < k; ++p) {
        for (Index i = 1; i <= n; ++i) {
          if (unit_draw(rng) < params.density) {
            sets[p].push_back(i);
            covered[i] = true;
          }
        }
      }
      for (Index i = 1; i <= n; ++i) {
        if (!covered[i]) sets[rng() % k].push_back(i);
      }
      if (!params.allow_empty) {
        for (auto& set : sets) {
          if (set.empty()) set.push_back(static_cast<Index>(rng() % n) + 1);
        }
      }
      return AllotmentStructure(n, std::move(sets));
    }
    case StructureKind::Explicit: {
      if (params.sets.size() != k) {
        throw Error(ErrorCode::InvalidArgument, "explicit structure lists " +
                                                    std::to_string(params.sets.size()) +
                                                    " sets but k = " + std::to_string(k));
      }
      AllotmentStructure s(n, params.sets);
      auto missing = uncovered_indices(s);
      if (!missing.empty()) {
        throw Error(ErrorCode::CoveringViolation,
                    "index " + std::to_string(missing.front()) + " is not covered");
      }
      return s;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown structure kind");
}

std::string structure_digest(const AllotmentStructure& s) {
  std::string canon = std::to_string(s.n()) + ";" + std::to_string(s.k());
  for (const auto& set : s.sets()) {
    canon += '|';
    for (std::size_t t = 0; t < set.size(); ++t) {
      if (t) canon += ',';
      canon += std::to_string(set[t]);
    }
  }
  // FNV-1a, 64 bit
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AllotmentStructure structure_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("structure file: ") + e.what());
  }
  auto field = [&](const char* name) -> const nlohmann::json& {
    if (!doc.is_object() || !doc.contains(name)) {
      throw Error(ErrorCode::Parse, std::string("structure file: missing field '") + name + "'");
    }
    return doc.at(name);
  };
  const auto& jn = field("n");
  const auto& jk = field("k");
  const auto& jsets = field("sets");
  if (!jn.is_number_integer() || jn.get<std::int64_t>() < 1) {
    throw Error(ErrorCode::Parse, "structure file: 'n' must be a positive integer");
  }
  if (!jk.is_number_integer() || jk.get<std::int64_t>() < 1) {
    throw Error(ErrorCode::Parse, "structure file: 'k' must be a positive integer");
  }
  if (!jsets.is_array() || jsets.size() != jk.get<std::size_t>()) {
    throw Error(ErrorCode::Parse, "structure file: 'sets' must be an array of k arrays");
  }
  const auto n = jn.get<std::int64_t>();
  std::vector<std::vector<Index>> sets;
  for (std::size_t p = 0; p < jsets.size(); ++p) {
    const auto& js = jsets[p];
    if (!js.is_array()) {
      throw Error(ErrorCode::Parse, "structure file: /sets/" + std::to_string(p) + " is not an array");
    }
    auto& set = sets.emplace_back();
    for (std::size_t t = 0; t < js.size(); ++t) {
      const auto& v = js[t];
      if (!v.is_number_integer() || v.get<std::int64_t>() < 1 || v.get<std::int64_t>() > n) {
        throw Error(ErrorCode::Parse, "structure file: /sets/" + std::to_string(p) + "/" +
                                          std::to_string(t) + " must be an integer in 1.." +
                                          std::to_string(n));
      }
      set.push_back(v.get<Index>());
    }
  }
  return AllotmentStructure(static_cast<std::uint32_t>(n), std::move(sets));
}

std::string structure_to_json(const AllotmentStructure& s) {
  nlohmann::json doc;
  doc["n"] = s.n();
  doc["k"] = s.k();
  doc["sets"] = s.sets();
  return doc.dump();
}

std::size_t input_length(const InputVector& x) {
  return std::visit([](const auto& v) -> std::size_t {
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, BinaryVector>) {
      return v.bits.size();
    } else {
      return v.values.size();
    }
  }, x);
}

int eval_parity(std::span<const std::uint8_t> x) {
  int p = 0;
  for (auto b : x) p ^= (b & 1);
  return p;
}

int eval_constancy(std::span<const std::uint32_t> x) {
  return std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end() ? 1 : 0;
}

int eval_bsf(std::span<const std::uint8_t> x) {
  return std::is_sorted(x.begin(), x.end()) ? 1 : 0;
}

double eval_average(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

double evaluate(const TargetFunction& f, const InputVector& x) {
  switch (f.kind) {
    case FunctionKind::Parity:
      return eval_parity(std::get<BinaryVector>(x).bits);
    case FunctionKind::Bsf:
      return eval_bsf(std::get<BinaryVector>(x).bits);
    case FunctionKind::Constancy:
      return eval_constancy(std::get<DaryVector>(x).values);
    case FunctionKind::Average:
      return eval_average(std::get<RealVector>(x).values);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown function");
}

MacroscopeSpec MacroscopeSpec::create(TargetFunction function,
                                      std::shared_ptr<const AllotmentStructure> structure,
                                      Blindness blindness) {
  if (!structure) throw Error(ErrorCode::InvalidArgument, "macroscope needs a structure");
  auto missing = uncovered_indices(*structure);
  if (!missing.empty()) {
    throw Error(ErrorCode::CoveringViolation,
                "index " + std::to_string(missing.front()) + " is not covered");
  }
  switch (function.kind) {
    case FunctionKind::Parity:
    case FunctionKind::Bsf:
      function.alphabet = 2;
      break;
    case FunctionKind::Constancy:
      if (function.alphabet < 2) {
        throw Error(ErrorCode::InvalidArgument, "constancy needs alphabet size D >= 2");
      }
      break;
    case FunctionKind::Average:
      if (!(function.epsilon > 0.0 && function.epsilon <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "average needs 0 < epsilon <= 1");
      }
      function.alphabet = 0;
      break;
  }
  if (function.kind == FunctionKind::Constancy || function.kind == FunctionKind::Bsf) {
    for (Player p = 1; p <= structure->k(); ++p) {
      if (structure->set(p).empty()) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string(to_string(function.kind)) + " needs every player to hold an index; player " +
                        std::to_string(p) + " holds none");
      }
    }
  }
  return MacroscopeSpec(function, std::move(structure), blindness);
}

void MacroscopeSpec::check_input(const InputVector& x) const {
  const auto n = structure_->n();
  if (input_length(x) != n) {
    throw Error(ErrorCode::Mismatch, "input has length " + std::to_string(input_length(x)) +
                                         " but the structure has n = " + std::to_string(n));
  }
  switch (function_.kind) {
    case FunctionKind::Parity:
    case FunctionKind::Bsf: {
      const auto* b = std::get_if<BinaryVector>(&x);
      if (!b) throw Error(ErrorCode::Mismatch, "function expects a binary input");
      for (auto bit : b->bits) {
        if (bit > 1) throw Error(ErrorCode::Mismatch, "binary input holds a value other than 0/1");
      }
      break;
    }
    case FunctionKind::Constancy: {
      const auto* d = std::get_if<DaryVector>(&x);
      if (!d) throw Error(ErrorCode::Mismatch, "constancy expects a D-ary input");
      if (d->alphabet != function_.alphabet) {
        throw Error(ErrorCode::Mismatch, "input alphabet differs from the macroscope's D");
      }
      for (auto v : d->values) {
        if (v >= function_.alphabet) throw Error(ErrorCode::Mismatch, "D-ary value out of range");
      }
      break;
    }
    case FunctionKind::Average: {
      const auto* r = std::get_if<RealVector>(&x);
      if (!r) throw Error(ErrorCode::Mismatch, "average expects a real input");
      for (double v : r->values) {
        if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::Mismatch, "real input outside [0,1]");
      }
      break;
    }
  }
}

}  // namespace macroscope
