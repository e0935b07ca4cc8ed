#include "engine.hpp"

#include <cmath>

#include "error.hpp"

namespace macroscope {

const AllotmentStructure& PlayerView::known_structure() const {
  if (!structure) {
    throw Error(ErrorCode::Mismatch, "player " + std::to_string(player) +
                                         " has a double-blind view and cannot see the structure");
  }
  return *structure;
}

std::uint64_t Blackboard::total_bits() const {
  std::uint64_t total = 0;
  for (const auto& e : entries) total += e.size();
  return total;
}

std::vector<PlayerView> make_views(const MacroscopeSpec& spec, const InputVector& x) {
  spec.check_input(x);
  const auto& s = spec.structure();
  std::vector<PlayerView> views;
  views.reserve(s.k());
  for (Player p = 1; p <= s.k(); ++p) {
    PlayerView v;
    v.player = p;
    v.n = s.n();
    v.k = s.k();
    v.blindness = spec.blindness();
    v.function = spec.function();
    v.own_indices = s.set(p);
    for (Index i : v.own_indices) {
      std::visit([&](const auto& vec) {
        using T = std::decay_t<decltype(vec)>;
        if constexpr (std::is_same_v<T, BinaryVector>) {
          v.own_discrete.push_back(vec.bits[i - 1]);
        } else if constexpr (std::is_same_v<T, DaryVector>) {
          v.own_discrete.push_back(vec.values[i - 1]);
        } else {
          v.own_real.push_back(vec.values[i - 1]);
        }
      }, x);
    }
    if (spec.blindness() == Blindness::SingleBlind) v.structure = spec.structure_ptr();
    views.push_back(std::move(v));
  }
  return views;
}

void check_compatible(const Protocol& protocol, const MacroscopeSpec& spec) {
  if (protocol.required_blindness() != spec.blindness()) {
    throw Error(ErrorCode::Mismatch, std::string(protocol.name()) + " needs a " +
                                         std::string(to_string(protocol.required_blindness())) +
                                         " macroscope, got " +
                                         std::string(to_string(spec.blindness())));
  }
  if (!protocol.supports(spec.function().kind)) {
    throw Error(ErrorCode::Mismatch, std::string(protocol.name()) + " does not compute " +
                                         std::string(to_string(spec.function().kind)));
  }
}

RunResult run_protocol(const Protocol& protocol, const MacroscopeSpec& spec, const InputVector& x) {
  check_compatible(protocol, spec);
  auto views = make_views(spec, x);

  RunResult result;
  result.blackboard.entries.reserve(views.size());
  for (const auto& v : views) result.blackboard.entries.push_back(protocol.encode(v));

  result.oracle_value = evaluate(spec.function(), x);
  result.cost_bits = result.blackboard.total_bits();
  result.bound_bits = protocol.bound(spec);
  result.correct = true;
  for (const auto& v : views) {
    double out = protocol.decode(result.blackboard, v);
    if (!std::isfinite(out)) {
      throw Error(ErrorCode::ProtocolFailure, std::string(protocol.name()) +
                                                  ": no output for player " +
                                                  std::to_string(v.player));
    }
    double err = std::abs(out - result.oracle_value);
    result.max_abs_error = std::max(result.max_abs_error, err);
    if (spec.function().is_boolean()) {
      if (out != result.oracle_value) result.correct = false;
    } else if (err > spec.function().epsilon) {
      result.correct = false;
    }
    result.outputs.push_back(out);
  }
  return result;
}

std::uint64_t theoretical_bound(const Protocol& protocol, const MacroscopeSpec& spec) {
  check_compatible(protocol, spec);
  return protocol.bound(spec);
}

}  // namespace macroscope
