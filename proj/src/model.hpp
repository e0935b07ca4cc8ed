#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace macroscope {

using Index = std::uint32_t;   // input position, 1-based
using Player = std::uint32_t;  // player id, 1-based

enum class Blindness { SingleBlind, DoubleBlind };

enum class FunctionKind { Parity, Constancy, Bsf, Average };

std::string_view to_string(Blindness b);
std::string_view to_string(FunctionKind f);
Blindness parse_blindness(std::string_view text);
FunctionKind parse_function_kind(std::string_view text);

// The function half of a macroscope. `alphabet` is D for Constancy and 2 for
// the binary functions; `epsilon` is only meaningful for Average.
struct TargetFunction {
  FunctionKind kind = FunctionKind::Parity;
  std::uint32_t alphabet = 2;
  double epsilon = 0.0;

  static TargetFunction parity() { return {FunctionKind::Parity, 2, 0.0}; }
  static TargetFunction constancy(std::uint32_t d) { return {FunctionKind::Constancy, d, 0.0}; }
  static TargetFunction bsf() { return {FunctionKind::Bsf, 2, 0.0}; }
  static TargetFunction average(double eps) { return {FunctionKind::Average, 0, eps}; }

  bool is_boolean() const noexcept { return kind != FunctionKind::Average; }
};

// Sequence of k index sets over {1..N}. Sets are stored sorted and
// deduplicated. Covering is not required here; see validate_covering.
class AllotmentStructure {
 public:
  AllotmentStructure(std::uint32_t n, std::vector<std::vector<Index>> sets);

  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t k() const noexcept { return static_cast<std::uint32_t>(sets_.size()); }
  const std::vector<Index>& set(Player p) const { return sets_.at(p - 1); }
  const std::vector<std::vector<Index>>& sets() const noexcept { return sets_; }
  bool contains(Player p, Index i) const;

  friend bool operator==(const AllotmentStructure&, const AllotmentStructure&) = default;

 private:
  std::uint32_t n_;
  std::vector<std::vector<Index>> sets_;
};

bool validate_covering(const AllotmentStructure& s);
std::vector<Index> uncovered_indices(const AllotmentStructure& s);

// Multiplicity C when every index lies in exactly C sets and all sets have
// the same size.
std::optional<std::uint32_t> evenness(const AllotmentStructure& s);

// Vertices are players. Components are listed in order of their smallest
// member, members ascending.
struct IntersectionGraph {
  std::uint32_t players = 0;
  std::vector<std::pair<Player, Player>> edges;  // i < j, lexicographic
  std::vector<std::vector<Player>> components;
  std::vector<std::uint32_t> component_of;  // indexed by player - 1

  std::uint32_t component_count() const noexcept {
    return static_cast<std::uint32_t>(components.size());
  }
};

IntersectionGraph intersection_graph(const AllotmentStructure& s);

// Lowest-numbered player whose set holds `index`.
Player responsible_player(const AllotmentStructure& s, Index index);
std::uint32_t multiplicity(const AllotmentStructure& s, Index index);

enum class StructureKind { Partition, Nof, EvenCyclic, RandomCovering, Explicit };

StructureKind parse_structure_kind(std::string_view text);
std::string_view to_string(StructureKind kind);

struct GeneratorParams {
  std::uint32_t set_size = 0;           // even_cyclic: m
  std::optional<std::uint32_t> stride;  // even_cyclic: start offset step
  double density = 0.5;                 // random_covering: inclusion probability
  bool allow_empty = false;             // random_covering: keep empty sets
  std::vector<std::vector<Index>> sets; // explicit
};

AllotmentStructure generate_structure(StructureKind kind, std::uint32_t n, std::uint32_t k,
                                      const GeneratorParams& params, std::uint64_t seed);

// Stable 16-hex-digit digest of (n, k, sorted sets).
std::string structure_digest(const AllotmentStructure& s);

// {"n": int, "k": int, "sets": [[int,...],...]}, 1-based.
AllotmentStructure structure_from_json(std::string_view text);
std::string structure_to_json(const AllotmentStructure& s);

struct BinaryVector {
  std::vector<std::uint8_t> bits;
};

// Values are 0-based, strictly below `alphabet`.
struct DaryVector {
  std::vector<std::uint32_t> values;
  std::uint32_t alphabet = 2;
};

struct RealVector {
  std::vector<double> values;
};

using InputVector = std::variant<BinaryVector, DaryVector, RealVector>;

std::size_t input_length(const InputVector& x);

int eval_parity(std::span<const std::uint8_t> x);
int eval_constancy(std::span<const std::uint32_t> x);
int eval_bsf(std::span<const std::uint8_t> x);
double eval_average(std::span<const double> x);

// Direct evaluation of the target function; Boolean results are 0.0 / 1.0.
double evaluate(const TargetFunction& f, const InputVector& x);

class MacroscopeSpec {
 public:
  // Throws CoveringViolation for an uncovered index and InvalidArgument for
  // bad parameters (D < 2, epsilon outside (0,1], empty sets where the
  // function's protocols need every player to see a value).
  static MacroscopeSpec create(TargetFunction function,
                               std::shared_ptr<const AllotmentStructure> structure,
                               Blindness blindness);

  const TargetFunction& function() const noexcept { return function_; }
  const AllotmentStructure& structure() const noexcept { return *structure_; }
  const std::shared_ptr<const AllotmentStructure>& structure_ptr() const noexcept {
    return structure_;
  }
  Blindness blindness() const noexcept { return blindness_; }

  // Throws Mismatch unless x has the right kind, length and value range.
  void check_input(const InputVector& x) const;

 private:
  MacroscopeSpec(TargetFunction f, std::shared_ptr<const AllotmentStructure> s, Blindness b)
      : function_(f), structure_(std::move(s)), blindness_(b) {}

  TargetFunction function_;
  std::shared_ptr<const AllotmentStructure> structure_;
  Blindness blindness_;
};

}  // namespace macroscope
