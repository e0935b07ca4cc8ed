#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "bits.hpp"
#include "model.hpp"

namespace macroscope {

// Everything one player is allowed to see. Double-blind views carry no
// structure; n and k are common knowledge in both modes.
struct PlayerView {
  Player player = 0;
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  Blindness blindness = Blindness::SingleBlind;
  TargetFunction function;
  std::vector<Index> own_indices;
  std::vector<std::uint32_t> own_discrete;  // aligned with own_indices; binary or D-ary
  std::vector<double> own_real;             // aligned with own_indices; Average only
  std::shared_ptr<const AllotmentStructure> structure;  // null when double-blind

  // Throws Mismatch on a double-blind view.
  const AllotmentStructure& known_structure() const;
};

// One entry per player, ordered by player id. Entry lengths are tracked by
// the container and are not charged.
struct Blackboard {
  std::vector<BitString> entries;

  const BitString& entry(Player p) const { return entries.at(p - 1); }
  std::uint64_t total_bits() const;
};

class Protocol {
 public:
  virtual ~Protocol() = default;

  virtual std::string_view name() const = 0;
  virtual Blindness required_blindness() const = 0;
  virtual bool supports(FunctionKind f) const = 0;

  virtual BitString encode(const PlayerView& view) const = 0;
  // Boolean outputs are 0.0 / 1.0.
  virtual double decode(const Blackboard& board, const PlayerView& view) const = 0;
  virtual std::uint64_t bound(const MacroscopeSpec& spec) const = 0;
};

struct RunResult {
  Blackboard blackboard;
  std::vector<double> outputs;  // indexed by player - 1
  std::uint64_t cost_bits = 0;
  std::uint64_t bound_bits = 0;
  double oracle_value = 0.0;
  bool correct = false;
  double max_abs_error = 0.0;  // max over players of |output - oracle|
};

std::vector<PlayerView> make_views(const MacroscopeSpec& spec, const InputVector& x);

// Throws Mismatch when the protocol's blindness or function family does not
// match the macroscope.
void check_compatible(const Protocol& protocol, const MacroscopeSpec& spec);

RunResult run_protocol(const Protocol& protocol, const MacroscopeSpec& spec, const InputVector& x);

std::uint64_t theoretical_bound(const Protocol& protocol, const MacroscopeSpec& spec);

}  // namespace macroscope
