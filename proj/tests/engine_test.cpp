#include <random>

#include "doctest.h"
#include "engine.hpp"
#include "error.hpp"
#include "protocols.hpp"
#include "test_support.hpp"

using namespace macroscope;
using macroscope::testing::bits;
using macroscope::testing::make_structure;

TEST_CASE("make_views honours the blindness rule") {
  auto s = make_structure(3, {{1, 2}, {2, 3}});
  auto sb = MacroscopeSpec::create(TargetFunction::parity(), s, Blindness::SingleBlind);
  auto views = make_views(sb, bits({0, 1, 0}));
  REQUIRE(views.size() == 2);
  CHECK(views[1].player == 2);
  CHECK(views[1].own_indices == std::vector<Index>{2, 3});
  CHECK(views[1].own_discrete == std::vector<std::uint32_t>{1, 0});
  REQUIRE(views[1].structure);
  CHECK(views[1].known_structure() == *s);

  auto db = MacroscopeSpec::create(TargetFunction::parity(), s, Blindness::DoubleBlind);
  auto dviews = make_views(db, bits({0, 1, 0}));
  CHECK(dviews[1].own_indices == std::vector<Index>{2, 3});
  CHECK(dviews[1].own_discrete == std::vector<std::uint32_t>{1, 0});
  CHECK_FALSE(dviews[1].structure);
  CHECK(dviews[1].n == 3);
  CHECK(dviews[1].k == 2);
  CHECK_THROWS_AS(dviews[1].known_structure(), Error);

  auto lone = MacroscopeSpec::create(TargetFunction::parity(), make_structure(4, {{1, 2, 3, 4}}),
                                     Blindness::SingleBlind);
  auto lv = make_views(lone, bits({1, 0, 1, 1}));
  REQUIRE(lv.size() == 1);
  CHECK(lv[0].own_discrete == std::vector<std::uint32_t>{1, 0, 1, 1});

  CHECK_THROWS_AS(make_views(sb, bits({0, 1})), Error);
}

TEST_CASE("run_protocol") {
  SUBCASE("sb_generic parity on singletons") {
    auto spec = MacroscopeSpec::create(TargetFunction::parity(), make_structure(3, {{1}, {2}, {3}}),
                                       Blindness::SingleBlind);
    auto r = run_protocol(protocol(ProtocolKind::SbGeneric), spec, bits({1, 0, 1}));
    CHECK(r.outputs == std::vector<double>{0, 0, 0});
    CHECK(r.cost_bits == 3);
    CHECK(r.bound_bits == 3);
    CHECK(r.correct);
  }
  SUBCASE("db_constancy on two equal values") {
    auto spec = MacroscopeSpec::create(TargetFunction::constancy(2), make_structure(2, {{1}, {2}}),
                                       Blindness::DoubleBlind);
    auto r = run_protocol(protocol(ProtocolKind::DbConstancy), spec, DaryVector{{1, 1}, 2});
    CHECK(r.outputs == std::vector<double>{1, 1});
    CHECK(r.correct);
  }
  SUBCASE("blindness mismatch") {
    auto spec = MacroscopeSpec::create(TargetFunction::constancy(2), make_structure(2, {{1}, {2}}),
                                       Blindness::DoubleBlind);
    try {
      run_protocol(protocol(ProtocolKind::SbConstancy), spec, DaryVector{{1, 1}, 2});
      FAIL("expected mismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Mismatch);
    }
  }
  SUBCASE("function mismatch") {
    auto spec = MacroscopeSpec::create(TargetFunction::parity(), make_structure(2, {{1}, {2}}),
                                       Blindness::SingleBlind);
    CHECK_THROWS_AS(run_protocol(protocol(ProtocolKind::SbBsf), spec, bits({0, 1})), Error);
  }
}

TEST_CASE("theoretical_bound") {
  auto chain = make_structure(4, {{1, 2}, {2, 3}, {4}});
  auto sbc = MacroscopeSpec::create(TargetFunction::constancy(4), chain, Blindness::SingleBlind);
  CHECK(theoretical_bound(protocol(ProtocolKind::SbConstancy), sbc) == 7);

  auto dbc = MacroscopeSpec::create(TargetFunction::constancy(3), make_structure(2, {{1}, {2}}),
                                    Blindness::DoubleBlind);
  CHECK(theoretical_bound(protocol(ProtocolKind::DbConstancy), dbc) == 4);

  auto avg = MacroscopeSpec::create(TargetFunction::average(0.25), make_structure(2, {{1}, {2}}),
                                    Blindness::SingleBlind);
  CHECK(theoretical_bound(protocol(ProtocolKind::SbAverage), avg) == 6);

  auto bsf = MacroscopeSpec::create(TargetFunction::bsf(), make_structure(8, {{1, 2, 3, 4}, {5, 6, 7, 8}}),
                                    Blindness::SingleBlind);
  CHECK(theoretical_bound(protocol(ProtocolKind::SbBsf), bsf) == 10);
  auto dbsf = MacroscopeSpec::create(TargetFunction::bsf(), make_structure(8, {{1, 2, 3, 4}, {5, 6, 7, 8}}),
                                     Blindness::DoubleBlind);
  CHECK(theoretical_bound(protocol(ProtocolKind::DbBsf), dbsf) == 16);

  CHECK_THROWS_AS(theoretical_bound(protocol(ProtocolKind::DbBsf), bsf), Error);
}

TEST_CASE("encoders are pure functions of the view") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = std::make_shared<const AllotmentStructure>(macroscope::testing::random_structure(rng, 6, 3));
    auto spec = MacroscopeSpec::create(TargetFunction::bsf(), s, Blindness::SingleBlind);
    BinaryVector x;
    for (int i = 0; i < 6; ++i) x.bits.push_back(static_cast<std::uint8_t>(rng() & 1));
    auto a = run_protocol(protocol(ProtocolKind::SbBsf), spec, x);
    auto b = run_protocol(protocol(ProtocolKind::SbBsf), spec, x);
    CHECK(a.blackboard.entries == b.blackboard.entries);
    CHECK(a.outputs == b.outputs);
  }
}

namespace {

// Two structures that agree on player `focus`'s set but are independently
// random elsewhere; inputs agree on that set only.
struct Pair {
  std::shared_ptr<const AllotmentStructure> a, b;
  std::vector<std::uint32_t> xa, xb;
};

Pair make_pair(std::mt19937_64& rng, std::uint32_t n, std::uint32_t k, Player focus, std::uint32_t base) {
  auto a = macroscope::testing::random_structure(rng, n, k);
  auto other = macroscope::testing::random_structure(rng, n, k);
  auto sets = other.sets();
  sets[focus - 1] = a.set(focus);
  Pair p;
  p.a = std::make_shared<const AllotmentStructure>(a);
  p.b = std::make_shared<const AllotmentStructure>(n, sets);
  for (std::uint32_t i = 0; i < n; ++i) {
    p.xa.push_back(static_cast<std::uint32_t>(rng() % base));
    p.xb.push_back(static_cast<std::uint32_t>(rng() % base));
  }
  for (Index i : a.set(focus)) p.xb[i - 1] = p.xa[i - 1];
  return p;
}

}  // namespace

TEST_CASE("double-blind messages depend only on the player's own set and values") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::uint32_t>(2 + rng() % 7);
    const auto k = static_cast<std::uint32_t>(2 + rng() % 4);
    const auto focus = static_cast<Player>(1 + rng() % k);
    for (auto kind : {ProtocolKind::DbGeneric, ProtocolKind::DbConstancy, ProtocolKind::DbBsf}) {
      const std::uint32_t base = kind == ProtocolKind::DbConstancy ? 3 : 2;
      auto pair = make_pair(rng, n, k, focus, base);
      if (!validate_covering(*pair.b)) continue;
      TargetFunction f = kind == ProtocolKind::DbConstancy ? TargetFunction::constancy(3)
                         : kind == ProtocolKind::DbBsf     ? TargetFunction::bsf()
                                                           : TargetFunction::parity();
      auto to_input = [&](const std::vector<std::uint32_t>& v) -> InputVector {
        if (f.kind == FunctionKind::Constancy) return DaryVector{v, 3};
        return BinaryVector{std::vector<std::uint8_t>(v.begin(), v.end())};
      };
      auto sa = MacroscopeSpec::create(f, pair.a, Blindness::DoubleBlind);
      auto sb = MacroscopeSpec::create(f, pair.b, Blindness::DoubleBlind);
      auto ra = run_protocol(protocol(kind), sa, to_input(pair.xa));
      auto rb = run_protocol(protocol(kind), sb, to_input(pair.xb));
      CHECK(ra.blackboard.entry(focus) == rb.blackboard.entry(focus));
    }
  }
}
