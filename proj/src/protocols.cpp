#include "protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace macroscope {

namespace {

constexpr double kNoOutput = std::numeric_limits<double>::quiet_NaN();

bool all_equal(const std::vector<std::uint32_t>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

// Oracle on a reconstructed global discrete input.
double evaluate_discrete(const TargetFunction& f, const std::vector<std::uint32_t>& x) {
  if (f.kind == FunctionKind::Constancy) return eval_constancy(x);
  std::vector<std::uint8_t> bits(x.begin(), x.end());
  return f.kind == FunctionKind::Parity ? eval_parity(bits) : eval_bsf(bits);
}

std::vector<Player> responsibility(const AllotmentStructure& s) {
  std::vector<Player> owner(s.n() + 1, 0);
  for (Index i = 1; i <= s.n(); ++i) owner[i] = responsible_player(s, i);
  return owner;
}

class ProtocolBase : public Protocol {
 public:
  explicit ProtocolBase(ProtocolKind kind) : spec_(protocol_spec(kind)) {}

  std::string_view name() const override { return to_string(spec_.name); }
  Blindness required_blindness() const override { return spec_.required_blindness; }
  bool supports(FunctionKind f) const override {
    return std::find(spec_.functions.begin(), spec_.functions.end(), f) != spec_.functions.end();
  }

 private:
  ProtocolSpec spec_;
};

// Each index is announced once, by the lowest-numbered player holding it.
class SbGeneric final : public ProtocolBase {
 public:
  SbGeneric() : ProtocolBase(ProtocolKind::SbGeneric) {}

  BitString encode(const PlayerView& view) const override {
    const auto& s = view.known_structure();
    const unsigned w = value_width(view.function);
    BitString out;
    for (std::size_t t = 0; t < view.own_indices.size(); ++t) {
      if (responsible_player(s, view.own_indices[t]) == view.player) {
        out.append_uint(view.own_discrete[t], w);
      }
    }
    return out;
  }

  double decode(const Blackboard& board, const PlayerView& view) const override {
    const auto& s = view.known_structure();
    const unsigned w = value_width(view.function);
    auto owner = responsibility(s);
    std::vector<std::uint32_t> x(s.n(), 0);
    for (Player p = 1; p <= s.k(); ++p) {
      BitReader reader(board.entry(p));
      for (Index i : s.set(p)) {
        if (owner[i] == p) x[i - 1] = static_cast<std::uint32_t>(reader.read_uint(w));
      }
    }
    return evaluate_discrete(view.function, x);
  }

  std::uint64_t bound(const MacroscopeSpec& spec) const override {
    return std::uint64_t{spec.structure().n()} * value_width(spec.function());
  }
};

// Characteristic vector of the own set, then the own values.
class DbGeneric final : public ProtocolBase {
 public:
  DbGeneric() : ProtocolBase(ProtocolKind::DbGeneric) {}

  BitString encode(const PlayerView& view) const override {
    const unsigned w = value_width(view.function);
    BitString out;
    std::size_t t = 0;
    for (Index i = 1; i <= view.n; ++i) {
      bool mine = t < view.own_indices.size() && view.own_indices[t] == i;
      out.push_back(mine);
      if (mine) ++t;
    }
    for (auto v : view.own_discrete) out.append_uint(v, w);
    return out;
  }

  double decode(const Blackboard& board, const PlayerView& view) const override {
    const unsigned w = value_width(view.function);
    std::vector<std::uint32_t> x(view.n, 0);
    std::vector<bool> seen(view.n, false);
    for (const auto& entry : board.entries) {
      BitReader reader(entry);
      std::vector<Index> mask;
      for (Index i = 1; i <= view.n; ++i) {
        if (reader.read_bit()) mask.push_back(i);
      }
      for (Index i : mask) {
        x[i - 1] = static_cast<std::uint32_t>(reader.read_uint(w));
        seen[i - 1] = true;
      }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) return kNoOutput;
    return evaluate_discrete(view.function, x);
  }

  std::uint64_t bound(const MacroscopeSpec& spec) const override {
    const auto& s = spec.structure();
    const unsigned w = value_width(spec.function());
    std::uint64_t total = 0;
    for (const auto& set : s.sets()) total += s.n() + set.size() * w;
    return total;
  }
};

// One "my portion is constant" bit per player, plus one value per
// intersection-graph component from its lowest-numbered player.
class SbConstancy final : public ProtocolBase {
 public:
  SbConstancy() : ProtocolBase(ProtocolKind::SbConstancy) {}

  BitString encode(const PlayerView& view) const override {
    const auto& s = view.known_structure();
    auto graph = intersection_graph(s);
    BitString out;
    out.push_back(all_equal(view.own_discrete));
    if (leads_component(graph, view.player)) {
      out.append_uint(view.own_discrete.front(), ceil_log2(view.function.alphabet));
    }
    return out;
  }

  double decode(const Blackboard& board, const PlayerView& view) const override {
    const auto& s = view.known_structure();
    auto graph = intersection_graph(s);
    const unsigned w = ceil_log2(view.function.alphabet);
    bool constant = true;
    std::optional<std::uint64_t> value;
    for (Player p = 1; p <= s.k(); ++p) {
      BitReader reader(board.entry(p));
      if (!reader.read_bit()) constant = false;
      if (leads_component(graph, p)) {
        auto v = reader.read_uint(w);
        if (value && *value != v) constant = false;
        value = v;
      }
    }
    return constant ? 1.0 : 0.0;
  }

  std::uint64_t bound(const MacroscopeSpec& spec) const override {
    const auto& s = spec.structure();
    return std::uint64_t{intersection_graph(s).component_count()} *
               ceil_log2(spec.function().alphabet) +
           s.k();
  }

 private:
  static bool leads_component(const IntersectionGraph& g, Player p) {
    return g.components[g.component_of[p - 1]].front() == p;
  }
};

// Each player sends its constant value, or D for "not constant".
class DbConstancy final : public ProtocolBase {
 public:
  DbConstancy() : ProtocolBase(ProtocolKind::DbConstancy) {}

  BitString encode(const PlayerView& view) const override {
    const auto d = view.function.alphabet;
    std::uint64_t code = all_equal(view.own_discrete) ? view.own_discrete.front() : d;
    return encode_uint(code, ceil_log2(std::uint64_t{d} + 1));
  }

  double decode(const Blackboard& board, const PlayerView& view) const override {
    const auto d = view.function.alphabet;
    const unsigned w = ceil_log2(std::uint64_t{d} + 1);
    std::optional<std::uint64_t> value;
    for (const auto& entry : board.entries) {
      auto code = decode_uint(entry, 0, w);
      if (code >= d) return 0.0;
      if (value && *value != code) return 0.0;
      value = code;
    }
    return 1.0;
  }

  std::uint64_t bound(const MacroscopeSpec& spec) const override {
    return std::uint64_t{spec.structure().k()} *
           ceil_log2(std::uint64_t{spec.function().alphabet} + 1);
  }
};

// Largest own 0-index (0 if none) and smallest own 1-index (N+1 if none).
class DbBsf final : public ProtocolBase {
 public:
  DbBsf() : ProtocolBase(ProtocolKind::DbBsf) {}

  BitString encode(const PlayerView& view) const override {
    const unsigned w = ceil_log2(std::uint64_t{view.n} + 2);
    std::uint64_t last_zero = 0;
    std::uint64_t first_one = std::uint64_t{view.n} + 1;
    for (std::size_t t = 0; t < view.own_indices.size(); ++t) {
      const Index i = view.own_indices[t];
      if (view.own_discrete[t] == 0) {
        last_zero = std::max<std::uint64_t>(last_zero, i);
      } else {
        first_one = std::min<std::uint64_t>(first_one, i);
      }
    }
    BitString out = encode_uint(last_zero, w);
    out.append_uint(first_one, w);
    return out;
  }

  double decode(const Blackboard& board, const PlayerView& view) const override {
    const unsigned w = ceil_log2(std::uint64_t{view.n} + 2);
    std::uint64_t last_zero = 0;
    std::uint64_t first_one = std::uint64_t{view.n} + 1;
    for (const auto& entry : board.entries) {
      BitReader reader(entry);
      last_zero = std::max(last_zero, reader.read_uint(w));
      first_one = std::min(first_one, reader.read_uint(w));
    }
    return last_zero + 1 == first_one ? 1.0 : 0.0;
  }

  std::uint64_t bound(const MacroscopeSpec& spec) const override {
    const auto& s = spec.structure();
    return 2ULL * s.k() * ceil_log2(std::uint64_t{s.n()} + 2);
  }
};

// Two case bits (constant / single 0->1 step / neither) and a payload of
// ceil(log2 N) bits.
class SbBsf final : public ProtocolBase {
 public:
  SbBsf() : ProtocolBase(ProtocolKind::SbBsf) {}

  enum Case : std::uint64_t { kConstant = 0, kStep = 1, kOther = 2 };

  BitString encode(const PlayerView& view) const override {
    const unsigned w = ceil_log2(view.n);
    const auto& v = view.own_discrete;
    Case c = kOther;
    std::uint64_t payload = 0;
    if (all_equal(v)) {
      c = kConstant;
      payload = w > 0 ? v.front() : 0;
    } else if (std::is_sorted(v.begin(), v.end())) {
      c = kStep;
      auto first_one = std::find(v.begin(), v.end(), 1U) - v.begin();
      payload = view.own_indices[first_one - 1] - 1;
    }
    BitString out = encode_uint(c, 2);
    out.append_uint(payload, w);
    return out;
  }

  double decode(const Blackboard& board, const PlayerView& view) const override {
    const auto& s = view.known_structure();
    const unsigned w = ceil_log2(s.n());
    std::vector<std::uint8_t> x(s.n(), 0);
    for (Player p = 1; p <= s.k(); ++p) {
      BitReader reader(board.entry(p));
      auto c = reader.read_uint(2);
      auto payload = reader.read_uint(w);
      if (c == kOther) return 0.0;
      if (c == kConstant) {
        if (payload > 1) return kNoOutput;
        for (Index i : s.set(p)) x[i - 1] = static_cast<std::uint8_t>(payload);
      } else if (c == kStep) {
        const std::uint64_t last_zero = payload + 1;
        for (Index i : s.set(p)) x[i - 1] = i <= last_zero ? 0 : 1;
      } else {
        return kNoOutput;
      }
    }
    return eval_bsf(x);
  }

  std::uint64_t bound(const MacroscopeSpec& spec) const override {
    const auto& s = spec.structure();
    return std::uint64_t{s.k()} * (ceil_log2(s.n()) + 2);
  }
};

// Each player quantizes its multiplicity-weighted share of the mean.
class SbAverage final : public ProtocolBase {
 public:
  SbAverage() : ProtocolBase(ProtocolKind::SbAverage) {}

  BitString encode(const PlayerView& view) const override {
    const auto& s = view.known_structure();
    const unsigned b = average_bits(view.k, view.function.epsilon);
    double c = average_contribution(s, view.player, view.own_real);
    return encode_uint(average_quantize(c, b), b);
  }

  double decode(const Blackboard& board, const PlayerView& view) const override {
    const unsigned b = average_bits(view.k, view.function.epsilon);
    double sum = 0.0;
    for (const auto& entry : board.entries) sum += average_dequantize(decode_uint(entry, 0, b), b);
    return sum;
  }

  std::uint64_t bound(const MacroscopeSpec& spec) const override {
    const auto k = spec.structure().k();
    return std::uint64_t{k} * average_bits(k, spec.function().epsilon);
  }
};

}  // namespace

ProtocolSpec protocol_spec(ProtocolKind kind) {
  using F = FunctionKind;
  const std::vector<F> boolean = {F::Parity, F::Constancy, F::Bsf};
  switch (kind) {
    case ProtocolKind::SbGeneric: return {kind, Blindness::SingleBlind, boolean};
    case ProtocolKind::DbGeneric: return {kind, Blindness::DoubleBlind, boolean};
    case ProtocolKind::SbConstancy: return {kind, Blindness::SingleBlind, {F::Constancy}};
    case ProtocolKind::DbConstancy: return {kind, Blindness::DoubleBlind, {F::Constancy}};
    case ProtocolKind::DbBsf: return {kind, Blindness::DoubleBlind, {F::Bsf}};
    case ProtocolKind::SbBsf: return {kind, Blindness::SingleBlind, {F::Bsf}};
    case ProtocolKind::SbAverage: return {kind, Blindness::SingleBlind, {F::Average}};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown protocol");
}

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::SbGeneric: return "sb_generic";
    case ProtocolKind::DbGeneric: return "db_generic";
    case ProtocolKind::SbConstancy: return "sb_constancy";
    case ProtocolKind::DbConstancy: return "db_constancy";
    case ProtocolKind::DbBsf: return "db_bsf";
    case ProtocolKind::SbBsf: return "sb_bsf";
    case ProtocolKind::SbAverage: return "sb_average";
  }
  return "?";
}

ProtocolKind parse_protocol_kind(std::string_view text) {
  for (auto kind : kAllProtocols) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown protocol '" + std::string(text) + "'");
}

const Protocol& protocol(ProtocolKind kind) {
  static const SbGeneric sb_generic;
  static const DbGeneric db_generic;
  static const SbConstancy sb_constancy;
  static const DbConstancy db_constancy;
  static const DbBsf db_bsf;
  static const SbBsf sb_bsf;
  static const SbAverage sb_average;
  switch (kind) {
    case ProtocolKind::SbGeneric: return sb_generic;
    case ProtocolKind::DbGeneric: return db_generic;
    case ProtocolKind::SbConstancy: return sb_constancy;
    case ProtocolKind::DbConstancy: return db_constancy;
    case ProtocolKind::DbBsf: return db_bsf;
    case ProtocolKind::SbBsf: return sb_bsf;
    case ProtocolKind::SbAverage: return sb_average;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown protocol");
}

std::optional<ProtocolKind> default_protocol(FunctionKind f, Blindness b) {
  const bool sb = b == Blindness::SingleBlind;
  switch (f) {
    case FunctionKind::Parity: return sb ? ProtocolKind::SbGeneric : ProtocolKind::DbGeneric;
    case FunctionKind::Constancy: return sb ? ProtocolKind::SbConstancy : ProtocolKind::DbConstancy;
    case FunctionKind::Bsf: return sb ? ProtocolKind::SbBsf : ProtocolKind::DbBsf;
    case FunctionKind::Average:
      if (sb) return ProtocolKind::SbAverage;
      return std::nullopt;
  }
  return std::nullopt;
}

unsigned value_width(const TargetFunction& f) {
  return std::max(1U, ceil_log2(std::max<std::uint32_t>(f.alphabet, 2)));
}

unsigned average_bits(std::uint32_t k, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "average needs 0 < epsilon <= 1");
  }
  unsigned b = 0;
  while (std::ldexp(epsilon, static_cast<int>(b)) < static_cast<double>(k)) {
    if (++b > 62) throw Error(ErrorCode::InvalidArgument, "epsilon too small for a 62-bit message");
  }
  return b;
}

double average_contribution(const AllotmentStructure& s, Player p, std::span<const double> own_values) {
  const auto& set = s.set(p);
  if (own_values.size() != set.size()) {
    throw Error(ErrorCode::Mismatch, "own values do not match the player's set");
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < set.size(); ++t) {
    sum += own_values[t] / static_cast<double>(multiplicity(s, set[t]));
  }
  return sum / static_cast<double>(s.n());
}

std::uint64_t average_quantize(double contribution, unsigned bits) {
  const std::uint64_t levels = std::uint64_t{1} << bits;
  double scaled = std::floor(std::ldexp(std::max(contribution, 0.0), static_cast<int>(bits)));
  if (scaled >= static_cast<double>(levels)) return levels - 1;
  return static_cast<std::uint64_t>(scaled);
}

double average_dequantize(std::uint64_t q, unsigned bits) {
  return std::ldexp(static_cast<double>(q) + 0.5, -static_cast<int>(bits));
}

}  // namespace macroscope
