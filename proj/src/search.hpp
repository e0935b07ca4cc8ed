#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "engine.hpp"
#include "model.hpp"

namespace macroscope {

inline constexpr std::uint64_t kDefaultVerifyCeiling = std::uint64_t{1} << 20;
inline constexpr std::uint64_t kDefaultSearchCeiling = std::uint64_t{1} << 32;

struct VerifyFailure {
  std::vector<std::uint32_t> input;  // 0-based values
  Player player = 0;
  double got = 0.0;
  double expected = 0.0;
};

struct VerifyReport {
  std::uint64_t inputs = 0;
  std::uint64_t failure_count = 0;        // (input, player) pairs with a wrong output
  std::vector<VerifyFailure> failures;    // first kMaxListedFailures
  std::uint64_t cost_mismatches = 0;      // runs whose cost differs from the bound
  std::uint64_t bound_bits = 0;
  std::uint64_t min_cost = 0;
  std::uint64_t max_cost = 0;

  static constexpr std::size_t kMaxListedFailures = 64;

  bool passed() const noexcept { return failure_count == 0 && cost_mismatches == 0; }
};

// Runs the protocol on every input over the macroscope's alphabet (2 or D).
// Throws CeilingExceeded when alphabet^N exceeds `ceiling`.
VerifyReport exhaustive_verify(const Protocol& protocol, const MacroscopeSpec& spec,
                               std::uint64_t ceiling = kDefaultVerifyCeiling);

struct SearchSpace {
  TargetFunction function;
  std::shared_ptr<const AllotmentStructure> structure;
  Blindness blindness = Blindness::SingleBlind;
  std::uint32_t budget = 0;
};

// Message function of one player for one possible own set. `labels` is
// indexed by the own-value assignment, first own index most significant.
struct MessageTable {
  Player player = 0;
  std::vector<Index> set;
  unsigned bits = 0;
  std::vector<std::uint32_t> labels;
};

struct SearchResult {
  std::optional<std::uint32_t> min_cost;
  std::vector<unsigned> lengths;    // per player, when found
  std::vector<MessageTable> witness;
  std::uint64_t explored = 0;       // correctness checks performed
};

// Smallest total message length of a one-round protocol under which every
// player determines the function from the blackboard and its own view.
//
// Single-blind: the structure is fixed and common knowledge.
// Double-blind: player i cannot tell the target structure from any other
// covering structure (same n, k) that gives it the same set, so its message
// function is defined per own set and its determinability is judged over all
// such structures.
//
// Throws CeilingExceeded when the world count or the number of correctness
// checks exceeds `ceiling`.
SearchResult min_cost_search(const SearchSpace& space, std::uint64_t ceiling = kDefaultSearchCeiling);

// Replays a witness as a protocol; decoding uses the per-player lookup
// tables the search proved consistent.
std::unique_ptr<Protocol> witness_protocol(const SearchSpace& space, const SearchResult& result);

// Stable human-readable listing of the witness tables.
std::string format_witness(const SearchSpace& space, const SearchResult& result);

}  // namespace macroscope
