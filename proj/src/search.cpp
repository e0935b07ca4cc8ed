#include "search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "error.hpp"

namespace macroscope {

namespace {

// base^exp, saturating at cap + 1.
std::uint64_t bounded_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::uint64_t t = 0; t < exp; ++t) {
    if (r > cap / base) return cap + 1;
    r *= base;
  }
  return r;
}

// First coordinate is the most significant digit.
void unpack(std::uint64_t code, std::uint32_t base, std::vector<std::uint32_t>& digits) {
  for (std::size_t t = digits.size(); t-- > 0;) {
    digits[t] = static_cast<std::uint32_t>(code % base);
    code /= base;
  }
}

InputVector make_input(const TargetFunction& f, const std::vector<std::uint32_t>& digits) {
  if (f.kind == FunctionKind::Constancy) return DaryVector{digits, f.alphabet};
  return BinaryVector{std::vector<std::uint8_t>(digits.begin(), digits.end())};
}

std::uint32_t alphabet_of(const TargetFunction& f) {
  if (f.kind == FunctionKind::Average) {
    throw Error(ErrorCode::InvalidArgument, "averaging inputs are continuous and cannot be enumerated");
  }
  return f.kind == FunctionKind::Constancy ? f.alphabet : 2;
}

std::uint64_t own_code(const std::vector<Index>& set, const std::vector<std::uint32_t>& x,
                       std::uint32_t base) {
  std::uint64_t code = 0;
  for (Index i : set) code = code * base + x[i - 1];
  return code;
}

std::vector<Index> mask_to_set(std::uint32_t mask, std::uint32_t n) {
  std::vector<Index> out;
  for (Index i = 1; i <= n; ++i) {
    if (mask & (1U << (i - 1))) out.push_back(i);
  }
  return out;
}

std::uint32_t set_to_mask(const std::vector<Index>& set) {
  std::uint32_t mask = 0;
  for (Index i : set) mask |= 1U << (i - 1);
  return mask;
}

std::string board_key(const std::vector<BitString>& entries) {
  std::string key;
  for (std::size_t j = 0; j < entries.size(); ++j) {
    if (j) key += '|';
    key += entries[j].to_string();
  }
  return key;
}

struct World {
  std::uint8_t value = 0;
  std::uint64_t relevant = 0;  // bit p-1 set when player p's own set is its target set
  std::vector<std::uint32_t> slot;
};

// Every view a player might hold, laid out as consecutive slots per set.
struct PlayerDomain {
  std::vector<std::vector<Index>> sets;
  std::vector<std::uint32_t> offsets;
  std::uint32_t slots = 0;
};

class Searcher {
 public:
  Searcher(const SearchSpace& space, std::uint64_t ceiling)
      : space_(space), s_(*space.structure), ceiling_(ceiling) {
    base_ = alphabet_of(space.function);
    if (s_.k() > 16) throw Error(ErrorCode::InvalidArgument, "search supports at most 16 players");
    if (space.blindness == Blindness::SingleBlind) {
      build_single_blind();
    } else {
      build_double_blind();
    }
    prepare_keys();
  }

  SearchResult run() {
    SearchResult result;
    const auto k = s_.k();
    labels_.assign(k, {});
    for (Player p = 0; p < k; ++p) labels_[p].assign(domains_[p].slots, -1);
    if (!consistent()) {
      result.explored = explored_;
      return result;
    }
    caps_.resize(k);
    std::uint32_t cap_total = 0;
    for (Player p = 0; p < k; ++p) {
      caps_[p] = ceil_log2(domains_[p].slots);
      cap_total += caps_[p];
    }
    const std::uint32_t top = std::min(space_.budget, cap_total);
    lengths_.assign(k, 0);
    for (std::uint32_t total = 0; total <= top; ++total) {
      if (lengths_with_total(0, total)) {
        result.min_cost = total;
        result.lengths = lengths_;
        result.witness = tables();
        break;
      }
    }
    result.explored = explored_;
    return result;
  }

  const std::vector<World>& worlds() const { return worlds_; }
  const std::vector<PlayerDomain>& domains() const { return domains_; }

 private:
  void build_single_blind() {
    const auto n = s_.n();
    const auto k = s_.k();
    const std::uint64_t count = bounded_pow(base_, n, ceiling_);
    if (count > ceiling_) ceiling_error("input space");
    domains_.resize(k);
    for (Player p = 1; p <= k; ++p) {
      auto& d = domains_[p - 1];
      d.sets.push_back(s_.set(p));
      d.offsets.push_back(0);
      d.slots = static_cast<std::uint32_t>(bounded_pow(base_, s_.set(p).size(), ceiling_));
    }
    std::vector<std::uint32_t> x(n);
    const std::uint64_t all = k >= 64 ? ~0ULL : ((1ULL << k) - 1);
    for (std::uint64_t code = 0; code < count; ++code) {
      unpack(code, base_, x);
      World w;
      w.value = static_cast<std::uint8_t>(evaluate(space_.function, make_input(space_.function, x)));
      w.relevant = all;
      for (Player p = 1; p <= k; ++p) {
        w.slot.push_back(static_cast<std::uint32_t>(own_code(s_.set(p), x, base_)));
      }
      worlds_.push_back(std::move(w));
    }
  }

  void build_double_blind() {
    const auto n = s_.n();
    const auto k = s_.k();
    if (n > 16) throw Error(ErrorCode::InvalidArgument, "double-blind search supports n <= 16");
    const std::uint32_t subsets = 1U << n;
    const std::uint32_t full = subsets - 1;
    const std::uint64_t tuples = bounded_pow(subsets, k, ceiling_);
    const std::uint64_t inputs = bounded_pow(base_, n, ceiling_);
    if (tuples > ceiling_ || inputs > ceiling_) ceiling_error("structure family");
    const bool nonempty = space_.function.kind == FunctionKind::Constancy ||
                          space_.function.kind == FunctionKind::Bsf;

    std::vector<std::uint32_t> target(k);
    for (Player p = 1; p <= k; ++p) target[p - 1] = set_to_mask(s_.set(p));

    // Structures (as set masks) indistinguishable to at least one player.
    std::vector<std::pair<std::vector<std::uint32_t>, std::uint64_t>> family;
    std::vector<std::uint32_t> masks(k);
    for (std::uint64_t code = 0; code < tuples; ++code) {
      std::uint64_t c = code;
      std::uint32_t cover = 0;
      bool ok = true;
      std::uint64_t relevant = 0;
      for (std::size_t p = k; p-- > 0;) {
        masks[p] = static_cast<std::uint32_t>(c % subsets);
        c /= subsets;
      }
      for (Player p = 0; p < k; ++p) {
        if (nonempty && masks[p] == 0) ok = false;
        cover |= masks[p];
        if (masks[p] == target[p]) relevant |= 1ULL << p;
      }
      if (ok && cover == full && relevant != 0) family.emplace_back(masks, relevant);
    }
    if (family.size() * inputs > ceiling_) ceiling_error("world count");

    domains_.resize(k);
    std::vector<std::map<std::uint32_t, std::uint32_t>> set_index(k);
    for (Player p = 0; p < k; ++p) {
      std::vector<std::uint32_t> seen = {target[p]};
      for (const auto& [m, rel] : family) {
        if (std::find(seen.begin(), seen.end(), m[p]) == seen.end()) seen.push_back(m[p]);
      }
      std::sort(seen.begin() + 1, seen.end());
      auto& d = domains_[p];
      for (auto m : seen) {
        set_index[p][m] = static_cast<std::uint32_t>(d.sets.size());
        d.sets.push_back(mask_to_set(m, n));
        d.offsets.push_back(d.slots);
        std::uint64_t size = bounded_pow(base_, d.sets.back().size(), ceiling_);
        d.slots += static_cast<std::uint32_t>(size);
      }
    }

    std::vector<std::uint32_t> x(n);
    for (std::uint64_t code = 0; code < inputs; ++code) {
      unpack(code, base_, x);
      auto value =
          static_cast<std::uint8_t>(evaluate(space_.function, make_input(space_.function, x)));
      for (const auto& [m, rel] : family) {
        World w;
        w.value = value;
        w.relevant = rel;
        for (Player p = 0; p < k; ++p) {
          const auto si = set_index[p][m[p]];
          const auto& d = domains_[p];
          w.slot.push_back(d.offsets[si] +
                           static_cast<std::uint32_t>(own_code(d.sets[si], x, base_)));
        }
        worlds_.push_back(std::move(w));
      }
    }
  }

  // Key layout: own slot, then one digit per player of radix 2 * slots
  // (assigned labels below slots, unassigned slots offset by slots).
  void prepare_keys() {
    long double largest = 0;
    for (const auto& own : domains_) {
      long double size = own.slots;
      for (const auto& d : domains_) size *= 2.0L * d.slots;
      largest = std::max(largest, size);
    }
    if (largest > 9.0e18L) throw Error(ErrorCode::InvalidArgument, "search instance too large to key");
    if (largest <= static_cast<long double>(1U << 22)) {
      stamp_.assign(static_cast<std::size_t>(largest), 0);
      value_.assign(stamp_.size(), 0);
    }
  }

  [[noreturn]] void ceiling_error(const std::string& what) const {
    throw Error(ErrorCode::CeilingExceeded, "search " + what + " exceeds the enumeration ceiling of " +
                                                std::to_string(ceiling_) +
                                                "; use a smaller n, k or D, or raise MACROSCOPE_CEILING");
  }

  std::uint64_t label(Player p, std::uint32_t slot) const {
    auto l = labels_[p][slot];
    return l >= 0 ? static_cast<std::uint64_t>(l) : domains_[p].slots + slot;
  }

  // Every player can determine f from its own view and the blackboard,
  // with unassigned slots treated as fully revealing.
  bool consistent() {
    if (++explored_ > ceiling_) ceiling_error("exploration");
    const auto k = s_.k();
    for (Player i = 0; i < k; ++i) {
      const std::uint64_t bit = 1ULL << i;
      if (!stamp_.empty()) {
        if (++epoch_ == 0) {
          std::fill(stamp_.begin(), stamp_.end(), 0);
          epoch_ = 1;
        }
        for (const auto& w : worlds_) {
          if (!(w.relevant & bit)) continue;
          std::uint64_t key = w.slot[i];
          for (Player j = 0; j < k; ++j) key = key * (2ULL * domains_[j].slots) + label(j, w.slot[j]);
          if (stamp_[key] == epoch_) {
            if (value_[key] != w.value) return false;
          } else {
            stamp_[key] = epoch_;
            value_[key] = w.value;
          }
        }
      } else {
        std::unordered_map<std::uint64_t, std::uint8_t> seen;
        for (const auto& w : worlds_) {
          if (!(w.relevant & bit)) continue;
          std::uint64_t key = w.slot[i];
          for (Player j = 0; j < k; ++j) key = key * (2ULL * domains_[j].slots) + label(j, w.slot[j]);
          auto [it, inserted] = seen.emplace(key, w.value);
          if (!inserted && it->second != w.value) return false;
        }
      }
    }
    return true;
  }

  bool lengths_with_total(Player p, std::uint32_t remaining) {
    const auto k = s_.k();
    if (p + 1 == k) {
      if (remaining > caps_[p]) return false;
      lengths_[p] = remaining;
      return try_lengths();
    }
    for (std::uint32_t b = 0; b <= std::min(remaining, caps_[p]); ++b) {
      lengths_[p] = b;
      if (lengths_with_total(p + 1, remaining - b)) return true;
    }
    return false;
  }

  bool try_lengths() {
    const auto k = s_.k();
    blocks_.resize(k);
    for (Player p = 0; p < k; ++p) {
      std::uint64_t cap = std::uint64_t{1} << lengths_[p];
      blocks_[p] = static_cast<std::uint32_t>(std::min<std::uint64_t>(cap, domains_[p].slots));
      std::fill(labels_[p].begin(), labels_[p].end(), -1);
    }
    return assign_player(0);
  }

  bool assign_player(Player p) {
    if (p == s_.k()) return true;
    return assign_slot(p, 0, 0);
  }

  // Restricted growth strings with exactly blocks_[p] labels, in
  // lexicographic order. Only merges can lose information, so only they
  // trigger a consistency check.
  bool assign_slot(Player p, std::uint32_t slot, std::uint32_t used) {
    const std::uint32_t m = domains_[p].slots;
    const std::uint32_t want = blocks_[p];
    if (slot == m) return assign_player(p + 1);
    const std::uint32_t left_after = m - slot - 1;
    if (want - used <= left_after) {
      for (std::uint32_t l = 0; l < used; ++l) {
        labels_[p][slot] = static_cast<std::int64_t>(l);
        if (consistent() && assign_slot(p, slot + 1, used)) return true;
      }
    }
    if (used < want) {
      labels_[p][slot] = static_cast<std::int64_t>(used);
      if (assign_slot(p, slot + 1, used + 1)) return true;
    }
    labels_[p][slot] = -1;
    return false;
  }

  std::vector<MessageTable> tables() const {
    std::vector<MessageTable> out;
    for (Player p = 0; p < s_.k(); ++p) {
      const auto& d = domains_[p];
      for (std::size_t si = 0; si < d.sets.size(); ++si) {
        MessageTable t;
        t.player = p + 1;
        t.set = d.sets[si];
        t.bits = lengths_[p];
        const std::uint32_t end = si + 1 < d.sets.size() ? d.offsets[si + 1] : d.slots;
        for (std::uint32_t slot = d.offsets[si]; slot < end; ++slot) {
          t.labels.push_back(static_cast<std::uint32_t>(labels_[p][slot]));
        }
        out.push_back(std::move(t));
      }
    }
    return out;
  }

  const SearchSpace& space_;
  const AllotmentStructure& s_;
  std::uint64_t ceiling_;
  std::uint32_t base_ = 2;
  std::vector<World> worlds_;
  std::vector<PlayerDomain> domains_;
  std::vector<std::vector<std::int64_t>> labels_;
  std::vector<std::uint32_t> caps_;
  std::vector<std::uint32_t> lengths_;
  std::vector<std::uint32_t> blocks_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint8_t> value_;
  std::uint32_t epoch_ = 0;
  std::uint64_t explored_ = 0;
};

class TableProtocol final : public Protocol {
 public:
  TableProtocol(const SearchSpace& space, const SearchResult& result)
      : function_(space.function), blindness_(space.blindness) {
    base_ = alphabet_of(function_);
    for (auto b : result.lengths) cost_ += b;
    for (const auto& t : result.witness) tables_[{t.player, t.set}] = t;
  }

  void add_decoding(Player p, const std::vector<Index>& set, std::uint64_t own, std::string board,
                    std::uint8_t value) {
    decode_[{p, set, own, std::move(board)}] = value;
  }

  std::string_view name() const override { return "search_witness"; }
  Blindness required_blindness() const override { return blindness_; }
  bool supports(FunctionKind f) const override { return f == function_.kind; }

  BitString encode(const PlayerView& view) const override {
    const auto& t = table(view.player, view.own_indices);
    return encode_uint(t.labels.at(own(view)), t.bits);
  }

  double decode(const Blackboard& board, const PlayerView& view) const override {
    auto it = decode_.find({view.player, view.own_indices, own(view), board_key(board.entries)});
    if (it == decode_.end()) return std::numeric_limits<double>::quiet_NaN();
    return it->second;
  }

  std::uint64_t bound(const MacroscopeSpec&) const override { return cost_; }

  const MessageTable& table(Player p, const std::vector<Index>& set) const {
    auto it = tables_.find({p, set});
    if (it == tables_.end()) {
      throw Error(ErrorCode::ProtocolFailure, "witness has no table for player " + std::to_string(p));
    }
    return it->second;
  }

 private:
  std::uint64_t own(const PlayerView& view) const {
    std::uint64_t code = 0;
    for (auto v : view.own_discrete) code = code * base_ + v;
    return code;
  }

  TargetFunction function_;
  Blindness blindness_;
  std::uint32_t base_ = 2;
  std::uint64_t cost_ = 0;
  std::map<std::pair<Player, std::vector<Index>>, MessageTable> tables_;
  std::map<std::tuple<Player, std::vector<Index>, std::uint64_t, std::string>, std::uint8_t> decode_;
};

}  // namespace

VerifyReport exhaustive_verify(const Protocol& protocol, const MacroscopeSpec& spec,
                               std::uint64_t ceiling) {
  check_compatible(protocol, spec);
  const auto base = alphabet_of(spec.function());
  const auto n = spec.structure().n();
  const std::uint64_t count = bounded_pow(base, n, ceiling);
  if (count > ceiling) {
    throw Error(ErrorCode::CeilingExceeded,
                std::to_string(base) + "^" + std::to_string(n) + " inputs exceed the enumeration ceiling of " +
                    std::to_string(ceiling) + "; use a smaller n or D, or raise MACROSCOPE_CEILING");
  }
  VerifyReport report;
  report.bound_bits = protocol.bound(spec);
  report.min_cost = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint32_t> x(n);
  for (std::uint64_t code = 0; code < count; ++code) {
    unpack(code, base, x);
    auto run = run_protocol(protocol, spec, make_input(spec.function(), x));
    ++report.inputs;
    report.min_cost = std::min(report.min_cost, run.cost_bits);
    report.max_cost = std::max(report.max_cost, run.cost_bits);
    if (run.cost_bits != run.bound_bits) ++report.cost_mismatches;
    for (std::size_t p = 0; p < run.outputs.size(); ++p) {
      if (run.outputs[p] != run.oracle_value) {
        ++report.failure_count;
        if (report.failures.size() < VerifyReport::kMaxListedFailures) {
          report.failures.push_back({x, static_cast<Player>(p + 1), run.outputs[p], run.oracle_value});
        }
      }
    }
  }
  if (report.inputs == 0) report.min_cost = 0;
  return report;
}

SearchResult min_cost_search(const SearchSpace& space, std::uint64_t ceiling) {
  if (!space.structure) throw Error(ErrorCode::InvalidArgument, "search space needs a structure");
  if (!space.function.is_boolean()) {
    throw Error(ErrorCode::InvalidArgument, "search covers Boolean functions only");
  }
  // Validates covering and parameters.
  MacroscopeSpec::create(space.function, space.structure, space.blindness);
  Searcher searcher(space, ceiling);
  return searcher.run();
}

std::unique_ptr<Protocol> witness_protocol(const SearchSpace& space, const SearchResult& result) {
  if (!result.min_cost) throw Error(ErrorCode::InvalidArgument, "search result has no witness");
  auto proto = std::make_unique<TableProtocol>(space, result);
  const auto& s = *space.structure;
  const auto base = alphabet_of(space.function);
  const auto n = s.n();

  // Decoding is only ever asked of the target structure, so the tables are
  // filled from its inputs.
  std::vector<std::uint32_t> x(n);
  const std::uint64_t count = bounded_pow(base, n, std::numeric_limits<std::uint64_t>::max() / base);
  std::vector<BitString> entries(s.k());
  for (std::uint64_t code = 0; code < count; ++code) {
    unpack(code, base, x);
    auto value = static_cast<std::uint8_t>(evaluate(space.function, make_input(space.function, x)));
    for (Player p = 1; p <= s.k(); ++p) {
      const auto& t = proto->table(p, s.set(p));
      entries[p - 1] = encode_uint(t.labels.at(own_code(s.set(p), x, base)), t.bits);
    }
    auto key = board_key(entries);
    for (Player p = 1; p <= s.k(); ++p) {
      proto->add_decoding(p, s.set(p), own_code(s.set(p), x, base), key, value);
    }
  }
  return proto;
}

std::string format_witness(const SearchSpace& space, const SearchResult& result) {
  std::ostringstream out;
  if (!result.min_cost) return "";
  const auto base = alphabet_of(space.function);
  const std::uint32_t shift = space.function.kind == FunctionKind::Constancy ? 1 : 0;
  out << "lengths";
  for (auto b : result.lengths) out << ' ' << b;
  out << '\n';
  for (const auto& t : result.witness) {
    out << "player " << t.player << " set {";
    for (std::size_t i = 0; i < t.set.size(); ++i) out << (i ? "," : "") << t.set[i];
    out << "} bits " << t.bits << '\n';
    std::vector<std::uint32_t> own(t.set.size());
    for (std::uint64_t code = 0; code < t.labels.size(); ++code) {
      unpack(code, base, own);
      out << "  (";
      for (std::size_t i = 0; i < own.size(); ++i) out << (i ? "," : "") << own[i] + shift;
      out << ") -> " << (t.bits ? encode_uint(t.labels[code], t.bits).to_string() : "-") << '\n';
    }
  }
  return out.str();
}

}  // namespace macroscope
