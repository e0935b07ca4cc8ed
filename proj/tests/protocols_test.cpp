#include <cmath>
#include <random>

#include "doctest.h"
#include "engine.hpp"
#include "protocols.hpp"
#include "test_support.hpp"

using namespace macroscope;
using macroscope::testing::bits;
using macroscope::testing::make_structure;

namespace {

RunResult run(ProtocolKind kind, TargetFunction f, std::uint32_t n, std::vector<std::vector<Index>> sets,
              const InputVector& x) {
  auto b = protocol_spec(kind).required_blindness;
  auto spec = MacroscopeSpec::create(f, make_structure(n, std::move(sets)), b);
  return run_protocol(protocol(kind), spec, x);
}

std::string msg(const RunResult& r, Player p) { return r.blackboard.entry(p).to_string(); }

}  // namespace

TEST_CASE("protocol registry") {
  for (auto kind : kAllProtocols) {
    CHECK(parse_protocol_kind(to_string(kind)) == kind);
    CHECK(protocol(kind).name() == to_string(kind));
    CHECK(protocol(kind).required_blindness() == protocol_spec(kind).required_blindness);
  }
  CHECK(default_protocol(FunctionKind::Constancy, Blindness::SingleBlind) == ProtocolKind::SbConstancy);
  CHECK(default_protocol(FunctionKind::Bsf, Blindness::DoubleBlind) == ProtocolKind::DbBsf);
  CHECK_FALSE(default_protocol(FunctionKind::Average, Blindness::DoubleBlind).has_value());
}

TEST_CASE("sb_generic") {
  auto r = run(ProtocolKind::SbGeneric, TargetFunction::parity(), 3, {{1, 2}, {2, 3}}, bits({0, 1, 1}));
  CHECK(msg(r, 1) == "01");
  CHECK(msg(r, 2) == "1");
  CHECK(r.outputs == std::vector<double>{0, 0});

  auto s = run(ProtocolKind::SbGeneric, TargetFunction::parity(), 3, {{1}, {2}, {3}}, bits({1, 0, 0}));
  CHECK(s.cost_bits == 3);
  CHECK(s.outputs == std::vector<double>{1, 1, 1});

  auto b = run(ProtocolKind::SbGeneric, TargetFunction::bsf(), 3, {{1, 2, 3}, {3}}, bits({0, 0, 1}));
  CHECK(msg(b, 2).empty());
  CHECK(b.cost_bits == 3);
  CHECK(b.outputs == std::vector<double>{1, 1});
}

TEST_CASE("db_generic") {
  auto r = run(ProtocolKind::DbGeneric, TargetFunction::parity(), 3, {{1, 2}, {2, 3}}, bits({0, 1, 0}));
  CHECK(msg(r, 1) == "11001");
  CHECK(msg(r, 2) == "01110");
  CHECK(r.outputs == std::vector<double>{1, 1});

  auto full = run(ProtocolKind::DbGeneric, TargetFunction::parity(), 5, {{1, 2, 3, 4, 5}}, bits({1, 0, 1, 1, 0}));
  CHECK(full.cost_bits == 10);
}

TEST_CASE("sb_constancy") {
  const std::vector<std::vector<Index>> sets = {{1, 2}, {2, 3}, {4}};
  auto same = run(ProtocolKind::SbConstancy, TargetFunction::constancy(4), 4, sets, DaryVector{{3, 3, 3, 3}, 4});
  CHECK(msg(same, 1) == "111");
  CHECK(msg(same, 2) == "1");
  CHECK(msg(same, 3) == "111");
  CHECK(same.cost_bits == 7);
  CHECK(same.outputs == std::vector<double>{1, 1, 1});

  auto other = run(ProtocolKind::SbConstancy, TargetFunction::constancy(4), 4, sets, DaryVector{{3, 3, 3, 1}, 4});
  CHECK(msg(other, 3) == "101");
  CHECK(other.outputs == std::vector<double>{0, 0, 0});

  auto broken = run(ProtocolKind::SbConstancy, TargetFunction::constancy(4), 4, sets, DaryVector{{3, 2, 3, 3}, 4});
  CHECK(msg(broken, 1)[0] == '0');
  CHECK(broken.outputs == std::vector<double>{0, 0, 0});
}

TEST_CASE("db_constancy") {
  auto eq = run(ProtocolKind::DbConstancy, TargetFunction::constancy(2), 2, {{1}, {2}}, DaryVector{{1, 1}, 2});
  CHECK(msg(eq, 1) == "01");
  CHECK(msg(eq, 2) == "01");
  CHECK(eq.cost_bits == 4);
  CHECK(eq.outputs == std::vector<double>{1, 1});

  auto mixed = run(ProtocolKind::DbConstancy, TargetFunction::constancy(2), 2, {{1, 2}, {2}}, DaryVector{{0, 1}, 2});
  CHECK(msg(mixed, 1) == "10");
  CHECK(mixed.outputs == std::vector<double>{0, 0});

  auto three = run(ProtocolKind::DbConstancy, TargetFunction::constancy(3), 3, {{1, 2}, {2, 3}, {1, 3}},
                   DaryVector{{2, 2, 2}, 3});
  CHECK(three.outputs == std::vector<double>{1, 1, 1});
}

TEST_CASE("db_bsf") {
  auto step = run(ProtocolKind::DbBsf, TargetFunction::bsf(), 6, {{1, 2, 5}, {3, 4, 6}}, bits({0, 0, 0, 1, 1, 1}));
  CHECK(msg(step, 1) == "010101");  // l=2, m=5
  CHECK(msg(step, 2) == "011100");  // l=3, m=4
  CHECK(step.outputs == std::vector<double>{1, 1});

  auto zigzag = run(ProtocolKind::DbBsf, TargetFunction::bsf(), 4, {{1}, {2}, {3}, {4}}, bits({0, 1, 0, 1}));
  // l-values (1,0,3,0), m-values (5,2,5,4)
  CHECK(msg(zigzag, 1) == "001101");
  CHECK(msg(zigzag, 2) == "000010");
  CHECK(msg(zigzag, 3) == "011101");
  CHECK(msg(zigzag, 4) == "000100");
  CHECK(zigzag.outputs == std::vector<double>{0, 0, 0, 0});

  auto zeros = run(ProtocolKind::DbBsf, TargetFunction::bsf(), 4, {{1, 2}, {3, 4}}, bits({0, 0, 0, 0}));
  CHECK(zeros.outputs == std::vector<double>{1, 1});
  auto ones = run(ProtocolKind::DbBsf, TargetFunction::bsf(), 4, {{1, 2}, {3, 4}}, bits({1, 1, 1, 1}));
  CHECK(ones.outputs == std::vector<double>{1, 1});
}

TEST_CASE("db_bsf decode rule matches monotonicity on every short string") {
  for (std::uint32_t n = 1; n <= 12; ++n) {
    std::vector<Index> all(n);
    for (Index i = 1; i <= n; ++i) all[i - 1] = i;
    std::vector<Index> odd, even;
    for (Index i = 1; i <= n; ++i) (i % 2 ? odd : even).push_back(i);
    std::vector<std::shared_ptr<const AllotmentStructure>> structures = {make_structure(n, {all})};
    if (!even.empty()) structures.push_back(make_structure(n, {odd, even}));
    for (const auto& s : structures) {
      auto spec = MacroscopeSpec::create(TargetFunction::bsf(), s, Blindness::DoubleBlind);
      for (std::uint32_t code = 0; code < (1U << n); ++code) {
        BinaryVector x;
        bool monotone = true;
        for (std::uint32_t t = 0; t < n; ++t) {
          x.bits.push_back((code >> (n - 1 - t)) & 1);
          if (t > 0 && x.bits[t] < x.bits[t - 1]) monotone = false;
        }
        auto r = run_protocol(protocol(ProtocolKind::DbBsf), spec, x);
        CHECK(r.outputs.front() == (monotone ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("sb_bsf") {
  auto steps = run(ProtocolKind::SbBsf, TargetFunction::bsf(), 4, {{1, 2}, {3, 4}}, bits({0, 0, 1, 1}));
  CHECK(msg(steps, 1) == "0000");
  CHECK(msg(steps, 2) == "0001");
  CHECK(steps.outputs == std::vector<double>{1, 1});

  auto interleaved = run(ProtocolKind::SbBsf, TargetFunction::bsf(), 4, {{1, 3}, {2, 4}}, bits({0, 1, 0, 1}));
  CHECK(msg(interleaved, 1) == "0000");
  CHECK(msg(interleaved, 2) == "0001");
  CHECK(interleaved.outputs == std::vector<double>{0, 0});

  auto bump = run(ProtocolKind::SbBsf, TargetFunction::bsf(), 4, {{1, 2, 3}, {3, 4}}, bits({0, 1, 1, 0}));
  CHECK(msg(bump, 1) == "0100");  // step, j = 1 sent as 0
  CHECK(msg(bump, 2).substr(0, 2) == "10");
  CHECK(bump.outputs == std::vector<double>{0, 0});
  CHECK(bump.cost_bits == 8);

  auto single = run(ProtocolKind::SbBsf, TargetFunction::bsf(), 1, {{1}, {1}}, bits({1}));
  CHECK(single.cost_bits == 4);
  CHECK(single.outputs == std::vector<double>{1, 1});
}

TEST_CASE("sb_average") {
  auto r = run(ProtocolKind::SbAverage, TargetFunction::average(0.25), 2, {{1}, {2}}, RealVector{{0.5, 0.25}});
  CHECK(msg(r, 1) == "010");
  CHECK(msg(r, 2) == "001");
  CHECK(r.outputs == std::vector<double>{0.5, 0.5});
  CHECK(r.max_abs_error == doctest::Approx(0.125));
  CHECK(r.correct);
  CHECK(r.cost_bits == 6);

  auto zero = run(ProtocolKind::SbAverage, TargetFunction::average(0.1), 4, {{1, 2}, {3, 4}}, RealVector{{0, 0, 0, 0}});
  const unsigned b = average_bits(2, 0.1);
  CHECK(b == 5);
  CHECK(zero.outputs.front() == doctest::Approx(2 * 0.5 / 32));
  CHECK(zero.correct);

  auto s = make_structure(3, {{1, 2}, {2, 3}});
  std::vector<double> x = {0, 1, 0};
  CHECK(average_contribution(*s, 1, std::vector<double>{0, 1}) == doctest::Approx(1.0 / 6));
  CHECK(average_contribution(*s, 2, std::vector<double>{1, 0}) == doctest::Approx(1.0 / 6));
  CHECK(eval_average(x) == doctest::Approx(1.0 / 3));
}

TEST_CASE("averaging helpers") {
  CHECK(average_bits(2, 0.25) == 3);
  CHECK(average_bits(4, 0.5) == 3);
  CHECK(average_bits(8, 0.01) == 10);
  CHECK(average_bits(1, 1.0) == 0);
  CHECK(average_quantize(1.0, 3) == 7);
  CHECK(average_quantize(0.0, 3) == 0);
  CHECK(average_quantize(0.999, 3) == 7);
  CHECK(average_quantize(0.125, 3) == 1);
  CHECK(average_dequantize(1, 3) == 0.1875);
  CHECK_THROWS(average_bits(2, 0.0));
}

TEST_CASE("protocol invariants on random structures and inputs") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::uint32_t>(1 + rng() % 8);
    const auto k = static_cast<std::uint32_t>(1 + rng() % 5);
    auto s = std::make_shared<const AllotmentStructure>(macroscope::testing::random_structure(rng, n, k));
    auto graph = intersection_graph(*s);

    // long-message senders in sb_constancy = component count
    {
      auto spec = MacroscopeSpec::create(TargetFunction::constancy(3), s, Blindness::SingleBlind);
      DaryVector x{{}, 3};
      for (std::uint32_t i = 0; i < n; ++i) x.values.push_back(static_cast<std::uint32_t>(rng() % 3));
      auto r = run_protocol(protocol(ProtocolKind::SbConstancy), spec, x);
      std::uint32_t long_senders = 0;
      for (const auto& e : r.blackboard.entries) long_senders += e.size() > 1 ? 1 : 0;
      CHECK(long_senders == graph.component_count());
      CHECK(r.cost_bits == r.bound_bits);
      CHECK(r.correct);
    }
    // db_generic: cost <= 2Nk, equal exactly when every set is full
    {
      auto spec = MacroscopeSpec::create(TargetFunction::parity(), s, Blindness::DoubleBlind);
      BinaryVector x;
      for (std::uint32_t i = 0; i < n; ++i) x.bits.push_back(static_cast<std::uint8_t>(rng() & 1));
      auto r = run_protocol(protocol(ProtocolKind::DbGeneric), spec, x);
      bool all_full = true;
      for (const auto& set : s->sets()) all_full = all_full && set.size() == n;
      CHECK(r.cost_bits <= 2ULL * n * k);
      CHECK((r.cost_bits == 2ULL * n * k) == all_full);
      CHECK(r.correct);
    }
    // contributions sum to the mean before quantization
    {
      std::vector<double> x(n);
      for (auto& v : x) v = static_cast<double>(rng() % 1001) / 1000.0;
      double sum = 0.0;
      for (Player p = 1; p <= k; ++p) {
        std::vector<double> own;
        for (Index i : s->set(p)) own.push_back(x[i - 1]);
        double c = average_contribution(*s, p, own);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0 + 1e-12);
        sum += c;
      }
      CHECK(std::abs(sum - eval_average(x)) <= 1e-12);
    }
  }
}
