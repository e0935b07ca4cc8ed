#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "error.hpp"
#include "model.hpp"
#include "test_support.hpp"

using namespace macroscope;
using macroscope::testing::make_structure;

namespace {

// Brute-force evenness: count memberships directly.
std::optional<std::uint32_t> evenness_oracle(const AllotmentStructure& s) {
  std::vector<std::uint32_t> count(s.n() + 1, 0);
  for (Player p = 1; p <= s.k(); ++p) {
    for (Index i = 1; i <= s.n(); ++i) {
      if (std::count(s.set(p).begin(), s.set(p).end(), i)) ++count[i];
    }
  }
  for (Index i = 2; i <= s.n(); ++i) {
    if (count[i] != count[1]) return std::nullopt;
  }
  for (Player p = 2; p <= s.k(); ++p) {
    if (s.set(p).size() != s.set(1).size()) return std::nullopt;
  }
  return count[1];
}

// Components by repeated flooding over pairwise intersections.
std::uint32_t component_oracle(const AllotmentStructure& s) {
  std::vector<int> label(s.k(), -1);
  std::uint32_t components = 0;
  for (Player start = 0; start < s.k(); ++start) {
    if (label[start] >= 0) continue;
    label[start] = static_cast<int>(components);
    bool grew = true;
    while (grew) {
      grew = false;
      for (Player a = 0; a < s.k(); ++a) {
        if (label[a] != static_cast<int>(components)) continue;
        for (Player b = 0; b < s.k(); ++b) {
          if (label[b] >= 0) continue;
          for (Index i : s.set(a + 1)) {
            if (s.contains(b + 1, i)) {
              label[b] = static_cast<int>(components);
              grew = true;
              break;
            }
          }
        }
      }
    }
    ++components;
  }
  return components;
}

}  // namespace

TEST_CASE("structure normalizes and validates its sets") {
  AllotmentStructure s(4, {{3, 1, 3}, {4, 2}});
  CHECK(s.set(1) == std::vector<Index>{1, 3});
  CHECK(s.set(2) == std::vector<Index>{2, 4});
  CHECK_THROWS_AS(AllotmentStructure(3, {{0}}), Error);
  CHECK_THROWS_AS(AllotmentStructure(3, {{4}}), Error);
  CHECK_THROWS_AS(AllotmentStructure(0, {{}}), Error);
}

TEST_CASE("validate_covering") {
  CHECK(validate_covering(AllotmentStructure(3, {{1, 2}, {2, 3}})));
  CHECK_FALSE(validate_covering(AllotmentStructure(3, {{1}, {3}})));
  CHECK(validate_covering(AllotmentStructure(1, {{1}, {1}, {1}})));
  CHECK(uncovered_indices(AllotmentStructure(3, {{1}, {3}})) == std::vector<Index>{2});
}

TEST_CASE("evenness") {
  CHECK(evenness(AllotmentStructure(4, {{1, 2, 3, 4}, {1, 2, 3, 4}})) == 2U);
  CHECK(evenness(AllotmentStructure(4, {{1, 2}, {3, 4}})) == 1U);
  CHECK_FALSE(evenness(AllotmentStructure(3, {{1, 2}, {2, 3}})).has_value());
}

TEST_CASE("intersection graph") {
  SUBCASE("chained and isolated players") {
    auto g = intersection_graph(AllotmentStructure(4, {{1, 2}, {2, 3}, {4}}));
    CHECK(g.edges == std::vector<std::pair<Player, Player>>{{1, 2}});
    CHECK(g.components == std::vector<std::vector<Player>>{{1, 2}, {3}});
    CHECK(g.component_count() == 2);
  }
  SUBCASE("pairwise disjoint") {
    auto g = intersection_graph(AllotmentStructure(5, {{1}, {2}, {3}, {4}, {5}}));
    CHECK(g.edges.empty());
    CHECK(g.component_count() == 5);
  }
  SUBCASE("all sets full") {
    auto g = intersection_graph(AllotmentStructure(3, {{1, 2, 3}, {1, 2, 3}, {1, 2, 3}, {1, 2, 3}}));
    CHECK(g.edges.size() == 6);
    CHECK(g.component_count() == 1);
  }
}

TEST_CASE("responsible_player and multiplicity") {
  CHECK(responsible_player(AllotmentStructure(3, {{1, 2}, {2, 3}}), 2) == 1);
  CHECK(responsible_player(AllotmentStructure(2, {{2}, {1, 2}}), 1) == 2);
  try {
    responsible_player(AllotmentStructure(3, {{1}, {2}}), 3);
    FAIL("expected a covering error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CoveringViolation);
  }
  AllotmentStructure s(3, {{1, 2}, {2, 3}});
  CHECK(multiplicity(s, 2) == 2);
  CHECK(multiplicity(s, 1) == 1);
  CHECK(multiplicity(AllotmentStructure(3, {{1}, {2}}), 3) == 0);
}

TEST_CASE("generate_structure kinds") {
  GeneratorParams none;
  CHECK(generate_structure(StructureKind::Partition, 4, 2, none, 0).sets() ==
        std::vector<std::vector<Index>>{{1, 2}, {3, 4}});
  CHECK(generate_structure(StructureKind::Partition, 5, 2, none, 0).sets() ==
        std::vector<std::vector<Index>>{{1, 2, 3}, {4, 5}});
  CHECK(generate_structure(StructureKind::Nof, 3, 3, none, 0).sets() ==
        std::vector<std::vector<Index>>{{2, 3}, {1, 3}, {1, 2}});
  GeneratorParams m2;
  m2.set_size = 2;
  auto cyc = generate_structure(StructureKind::EvenCyclic, 4, 4, m2, 0);
  CHECK(cyc.sets() == std::vector<std::vector<Index>>{{1, 2}, {2, 3}, {3, 4}, {1, 4}});
  CHECK(evenness_oracle(cyc) == 2U);
  CHECK(evenness(cyc) == 2U);

  CHECK_THROWS_AS(generate_structure(StructureKind::Partition, 2, 3, none, 0), Error);
  CHECK_THROWS_AS(generate_structure(StructureKind::Nof, 3, 1, none, 0), Error);
  CHECK_THROWS_AS(generate_structure(StructureKind::EvenCyclic, 4, 4, none, 0), Error);
  GeneratorParams expl;
  expl.sets = {{1}, {3}};
  CHECK_THROWS_AS(generate_structure(StructureKind::Explicit, 3, 2, expl, 0), Error);
}

TEST_CASE("even_cyclic yields even structures whenever k*m is a multiple of n") {
  for (std::uint32_t n = 1; n <= 9; ++n) {
    for (std::uint32_t k = 1; k <= 9; ++k) {
      for (std::uint32_t m = 1; m <= n; ++m) {
        if ((k * m) % n != 0) continue;
        GeneratorParams p;
        p.set_size = m;
        auto s = generate_structure(StructureKind::EvenCyclic, n, k, p, 0);
        auto c = evenness_oracle(s);
        REQUIRE_MESSAGE(c.has_value(), "n=" << n << " k=" << k << " m=" << m);
        CHECK(*c == k * m / n);
        CHECK(evenness(s) == c);
      }
    }
  }
}

TEST_CASE("random_covering is deterministic and covering") {
  GeneratorParams p;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto a = generate_structure(StructureKind::RandomCovering, 7, 4, p, seed);
    auto b = generate_structure(StructureKind::RandomCovering, 7, 4, p, seed);
    CHECK(a == b);
    CHECK(validate_covering(a));
    for (const auto& s : a.sets()) CHECK_FALSE(s.empty());
  }
  CHECK_FALSE(generate_structure(StructureKind::RandomCovering, 7, 4, p, 1) ==
              generate_structure(StructureKind::RandomCovering, 7, 4, p, 2));
}

TEST_CASE("structure properties on random structures") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::uint32_t>(1 + rng() % 9);
    const auto k = static_cast<std::uint32_t>(1 + rng() % 6);
    auto s = macroscope::testing::random_structure(rng, n, k);

    std::uint32_t responsible = 0;
    for (Index i = 1; i <= n; ++i) {
      Player p = responsible_player(s, i);
      CHECK(s.contains(p, i));
      for (Player q = 1; q < p; ++q) CHECK_FALSE(s.contains(q, i));
      ++responsible;
    }
    CHECK(responsible == n);

    auto g = intersection_graph(s);
    CHECK(g.component_count() >= 1);
    CHECK(g.component_count() <= k);
    CHECK(g.component_count() == component_oracle(s));
    for (auto [a, b] : g.edges) CHECK(g.component_of[a - 1] == g.component_of[b - 1]);

    CHECK(evenness(s) == evenness_oracle(s));
    if (auto c = evenness(s)) CHECK(s.set(1).size() * k == static_cast<std::size_t>(n) * *c);
  }
}

TEST_CASE("digest is stable and order-insensitive within sets") {
  AllotmentStructure a(3, {{1, 2}, {2, 3}});
  AllotmentStructure b(3, {{2, 1}, {3, 2, 2}});
  CHECK(structure_digest(a) == structure_digest(b));
  CHECK(structure_digest(a).size() == 16);
  CHECK(structure_digest(a) != structure_digest(AllotmentStructure(3, {{2, 3}, {1, 2}})));
}

TEST_CASE("structure JSON") {
  auto s = structure_from_json(R"({"n": 3, "k": 2, "sets": [[1,2],[2,3]]})");
  CHECK(s == AllotmentStructure(3, {{1, 2}, {2, 3}}));
  CHECK(structure_from_json(structure_to_json(s)) == s);
  CHECK_THROWS_AS(structure_from_json(R"({"n": 3, "k": 2, "sets": [[1,2]]})"), Error);
  CHECK_THROWS_AS(structure_from_json(R"({"n": 3, "k": 1, "sets": [[4]]})"), Error);
  CHECK_THROWS_AS(structure_from_json(R"({"n": 3, "sets": [[1]]})"), Error);
  CHECK_THROWS_AS(structure_from_json("{not json"), Error);
}

TEST_CASE("oracle evaluators") {
  using macroscope::testing::bits;
  CHECK(eval_parity(bits({1, 0, 1}).bits) == 0);
  CHECK(eval_parity(bits({1, 0, 0}).bits) == 1);
  CHECK(eval_parity(bits({0, 0, 0, 0, 0}).bits) == 0);

  std::vector<std::uint32_t> c1{2, 2, 2}, c2{2, 1, 2}, c3{5};
  CHECK(eval_constancy(c1) == 1);
  CHECK(eval_constancy(c2) == 0);
  CHECK(eval_constancy(c3) == 1);

  CHECK(eval_bsf(bits({0, 0, 0, 1, 1, 1}).bits) == 1);
  CHECK(eval_bsf(bits({0, 0, 0, 1, 1, 0, 1}).bits) == 0);
  CHECK(eval_bsf(bits({0, 0, 0, 0}).bits) == 1);
  CHECK(eval_bsf(bits({1, 1, 1, 1}).bits) == 1);

  std::vector<double> a1{0.5, 0.25}, a2{0, 0, 0}, a3{1, 1, 1, 1};
  CHECK(eval_average(a1) == doctest::Approx(0.375));
  CHECK(eval_average(a2) == 0.0);
  CHECK(eval_average(a3) == 1.0);
}

TEST_CASE("eval_bsf agrees with a step-index scan on all short strings") {
  for (std::uint32_t n = 1; n <= 10; ++n) {
    for (std::uint32_t code = 0; code < (1U << n); ++code) {
      std::vector<std::uint8_t> x(n);
      for (std::uint32_t t = 0; t < n; ++t) x[t] = (code >> (n - 1 - t)) & 1;
      bool step = false;
      for (std::uint32_t i = 0; i <= n && !step; ++i) {
        bool ok = true;
        for (std::uint32_t j = 1; j <= n; ++j) ok = ok && x[j - 1] == (j <= i ? 0 : 1);
        step = ok;
      }
      CHECK(eval_bsf(x) == (step ? 1 : 0));
    }
  }
}

TEST_CASE("macroscope construction") {
  auto covering = make_structure(3, {{1, 2}, {2, 3}});
  CHECK_NOTHROW(MacroscopeSpec::create(TargetFunction::parity(), covering, Blindness::SingleBlind));
  try {
    MacroscopeSpec::create(TargetFunction::parity(), make_structure(3, {{1}, {3}}), Blindness::SingleBlind);
    FAIL("expected covering error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CoveringViolation);
    CHECK(std::string(e.what()).find("index 2") != std::string::npos);
  }
  CHECK_THROWS_AS(MacroscopeSpec::create(TargetFunction::average(0.0), covering, Blindness::SingleBlind), Error);
  CHECK_THROWS_AS(MacroscopeSpec::create(TargetFunction::average(1.5), covering, Blindness::SingleBlind), Error);
  CHECK_THROWS_AS(MacroscopeSpec::create(TargetFunction::constancy(1), covering, Blindness::SingleBlind), Error);

  auto with_empty = make_structure(2, {{1, 2}, {}});
  CHECK_THROWS_AS(MacroscopeSpec::create(TargetFunction::constancy(2), with_empty, Blindness::SingleBlind), Error);
  CHECK_THROWS_AS(MacroscopeSpec::create(TargetFunction::bsf(), with_empty, Blindness::DoubleBlind), Error);
  CHECK_NOTHROW(MacroscopeSpec::create(TargetFunction::parity(), with_empty, Blindness::SingleBlind));
  CHECK_NOTHROW(MacroscopeSpec::create(TargetFunction::average(0.5), with_empty, Blindness::SingleBlind));
}

TEST_CASE("check_input rejects kind, length and range mismatches") {
  auto s = make_structure(3, {{1, 2}, {2, 3}});
  auto parity = MacroscopeSpec::create(TargetFunction::parity(), s, Blindness::SingleBlind);
  CHECK_NOTHROW(parity.check_input(macroscope::testing::bits({0, 1, 0})));
  CHECK_THROWS_AS(parity.check_input(macroscope::testing::bits({0, 1})), Error);
  CHECK_THROWS_AS(parity.check_input(DaryVector{{0, 1, 0}, 2}), Error);
  auto constancy = MacroscopeSpec::create(TargetFunction::constancy(3), s, Blindness::SingleBlind);
  CHECK_NOTHROW(constancy.check_input(DaryVector{{0, 1, 2}, 3}));
  CHECK_THROWS_AS(constancy.check_input(DaryVector{{0, 1, 3}, 3}), Error);
  auto avg = MacroscopeSpec::create(TargetFunction::average(0.1), s, Blindness::SingleBlind);
  CHECK_NOTHROW(avg.check_input(RealVector{{0.0, 1.0, 0.5}}));
  CHECK_THROWS_AS(avg.check_input(RealVector{{0.0, 1.01, 0.5}}), Error);
}
