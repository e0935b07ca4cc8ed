#include "macroscope/macroscope.h"

#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "engine.hpp"
#include "error.hpp"
#include "model.hpp"
#include "protocols.hpp"
#include "search.hpp"

using namespace macroscope;

struct mcs_structure_struct {
  std::shared_ptr<const AllotmentStructure> structure;
};

struct mcs_macroscope_struct {
  MacroscopeSpec spec;
};

struct mcs_run_struct {
  RunResult result;
};

struct mcs_verify_struct {
  VerifyReport report;
};

struct mcs_search_struct {
  SearchSpace space;
  SearchResult result;
};

namespace {

thread_local std::string g_last_error;

int to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return MCS_ERR_INVALID_ARGUMENT;
    case ErrorCode::CoveringViolation: return MCS_ERR_COVERING;
    case ErrorCode::Mismatch: return MCS_ERR_MISMATCH;
    case ErrorCode::CeilingExceeded: return MCS_ERR_CEILING;
    case ErrorCode::Overflow: return MCS_ERR_OVERFLOW;
    case ErrorCode::ProtocolFailure: return MCS_ERR_PROTOCOL;
    case ErrorCode::Parse: return MCS_ERR_PARSE;
  }
  return MCS_ERR_INTERNAL;
}

int fail(int status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
int guard(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(MCS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MCS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MCS_ERR_INTERNAL, "unknown exception");
  }
}

template <typename... Ptrs>
bool any_null(Ptrs... ptrs) {
  return ((ptrs == nullptr) || ...);
}

#define MCS_REQUIRE(...)                                      \
  do {                                                        \
    if (any_null(__VA_ARGS__)) return fail(MCS_ERR_NULL_POINTER, "null argument"); \
  } while (0)

int write_text(const std::string& text, char* buf, size_t len, size_t* needed) {
  if (needed) *needed = text.size() + 1;
  if (buf == nullptr || len < text.size() + 1) {
    return fail(MCS_ERR_BUFFER_TOO_SMALL, "buffer needs " + std::to_string(text.size() + 1) + " bytes");
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return MCS_OK;
}

FunctionKind to_kind(mcs_function f) {
  switch (f) {
    case MCS_PARITY: return FunctionKind::Parity;
    case MCS_CONSTANCY: return FunctionKind::Constancy;
    case MCS_BSF: return FunctionKind::Bsf;
    case MCS_AVERAGE: return FunctionKind::Average;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown function code");
}

TargetFunction to_function(mcs_function f, uint32_t alphabet, double epsilon) {
  switch (to_kind(f)) {
    case FunctionKind::Parity: return TargetFunction::parity();
    case FunctionKind::Constancy: return TargetFunction::constancy(alphabet);
    case FunctionKind::Bsf: return TargetFunction::bsf();
    case FunctionKind::Average: return TargetFunction::average(epsilon);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown function code");
}

Blindness to_blindness(mcs_blindness b) {
  if (b == MCS_SINGLE_BLIND) return Blindness::SingleBlind;
  if (b == MCS_DOUBLE_BLIND) return Blindness::DoubleBlind;
  throw Error(ErrorCode::InvalidArgument, "unknown blindness code");
}

ProtocolKind to_protocol(mcs_protocol p) {
  if (p < 0 || p >= MCS_PROTOCOL_COUNT) throw Error(ErrorCode::InvalidArgument, "unknown protocol code");
  return kAllProtocols[p];
}

mcs_protocol from_protocol(ProtocolKind kind) {
  for (int i = 0; i < MCS_PROTOCOL_COUNT; ++i) {
    if (kAllProtocols[i] == kind) return static_cast<mcs_protocol>(i);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown protocol");
}

Player checked_player(const RunResult& r, uint32_t player) {
  if (player < 1 || player > r.outputs.size()) {
    throw Error(ErrorCode::InvalidArgument, "player " + std::to_string(player) + " out of range");
  }
  return player;
}

}  // namespace

extern "C" {

const char* mcs_status_string(int status) {
  switch (status) {
    case MCS_OK: return "ok";
    case MCS_ERR_NULL_POINTER: return "null pointer";
    case MCS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MCS_ERR_COVERING: return "covering violation";
    case MCS_ERR_MISMATCH: return "protocol, macroscope or input mismatch";
    case MCS_ERR_CEILING: return "enumeration ceiling exceeded";
    case MCS_ERR_OVERFLOW: return "value does not fit its width";
    case MCS_ERR_PROTOCOL: return "protocol failure";
    case MCS_ERR_PARSE: return "parse error";
    case MCS_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case MCS_ERR_NOT_FOUND: return "not found";
    default: return "internal error";
  }
}

const char* mcs_last_error(void) { return g_last_error.c_str(); }

const char* mcs_version(void) { return "0.1.0"; }

int mcs_structure_create(mcs_structure_t* out, uint32_t n, uint32_t k, const uint32_t* set_sizes,
                         const uint32_t* indices) {
  MCS_REQUIRE(out, set_sizes);
  return guard([&]() -> int {
    std::vector<std::vector<Index>> sets(k);
    size_t pos = 0;
    for (uint32_t p = 0; p < k; ++p) {
      if (set_sizes[p] > 0 && indices == nullptr) return fail(MCS_ERR_NULL_POINTER, "null indices");
      sets[p].assign(indices + pos, indices + pos + set_sizes[p]);
      pos += set_sizes[p];
    }
    *out = new mcs_structure_struct{std::make_shared<const AllotmentStructure>(n, std::move(sets))};
    return MCS_OK;
  });
}

int mcs_structure_generate(mcs_structure_t* out, const char* kind, uint32_t n, uint32_t k,
                           uint32_t set_size, uint64_t seed) {
  MCS_REQUIRE(out, kind);
  return guard([&]() -> int {
    GeneratorParams params;
    params.set_size = set_size;
    auto s = generate_structure(parse_structure_kind(kind), n, k, params, seed);
    *out = new mcs_structure_struct{std::make_shared<const AllotmentStructure>(std::move(s))};
    return MCS_OK;
  });
}

int mcs_structure_from_json(mcs_structure_t* out, const char* json) {
  MCS_REQUIRE(out, json);
  return guard([&]() -> int {
    *out = new mcs_structure_struct{std::make_shared<const AllotmentStructure>(structure_from_json(json))};
    return MCS_OK;
  });
}

int mcs_structure_destroy(mcs_structure_t s) {
  delete s;
  return MCS_OK;
}

int mcs_structure_n(mcs_structure_t s, uint32_t* n) {
  MCS_REQUIRE(s, n);
  *n = s->structure->n();
  return MCS_OK;
}

int mcs_structure_k(mcs_structure_t s, uint32_t* k) {
  MCS_REQUIRE(s, k);
  *k = s->structure->k();
  return MCS_OK;
}

int mcs_structure_set(mcs_structure_t s, uint32_t player, uint32_t* buf, size_t len, size_t* count) {
  MCS_REQUIRE(s, count);
  return guard([&]() -> int {
    if (player < 1 || player > s->structure->k()) {
      return fail(MCS_ERR_INVALID_ARGUMENT, "player " + std::to_string(player) + " out of range");
    }
    const auto& set = s->structure->set(player);
    *count = set.size();
    if (buf == nullptr || len < set.size()) {
      return fail(MCS_ERR_BUFFER_TOO_SMALL, "buffer needs " + std::to_string(set.size()) + " entries");
    }
    std::copy(set.begin(), set.end(), buf);
    return MCS_OK;
  });
}

int mcs_structure_is_covering(mcs_structure_t s, int* covering) {
  MCS_REQUIRE(s, covering);
  return guard([&]() -> int {
    *covering = validate_covering(*s->structure) ? 1 : 0;
    return MCS_OK;
  });
}

int mcs_structure_evenness(mcs_structure_t s, int* is_even, uint32_t* c) {
  MCS_REQUIRE(s, is_even, c);
  return guard([&]() -> int {
    auto e = evenness(*s->structure);
    *is_even = e ? 1 : 0;
    *c = e.value_or(0);
    return MCS_OK;
  });
}

int mcs_structure_component_count(mcs_structure_t s, uint32_t* r) {
  MCS_REQUIRE(s, r);
  return guard([&]() -> int {
    *r = intersection_graph(*s->structure).component_count();
    return MCS_OK;
  });
}

int mcs_structure_responsible_player(mcs_structure_t s, uint32_t index, uint32_t* player) {
  MCS_REQUIRE(s, player);
  return guard([&]() -> int {
    *player = responsible_player(*s->structure, index);
    return MCS_OK;
  });
}

int mcs_structure_multiplicity(mcs_structure_t s, uint32_t index, uint32_t* count) {
  MCS_REQUIRE(s, count);
  return guard([&]() -> int {
    *count = multiplicity(*s->structure, index);
    return MCS_OK;
  });
}

int mcs_structure_digest(mcs_structure_t s, char* buf, size_t len, size_t* needed) {
  MCS_REQUIRE(s);
  return guard([&]() -> int { return write_text(structure_digest(*s->structure), buf, len, needed); });
}

int mcs_structure_to_json(mcs_structure_t s, char* buf, size_t len, size_t* needed) {
  MCS_REQUIRE(s);
  return guard([&]() -> int { return write_text(structure_to_json(*s->structure), buf, len, needed); });
}

int mcs_macroscope_create(mcs_macroscope_t* out, mcs_structure_t s, mcs_function f, uint32_t alphabet,
                          double epsilon, mcs_blindness b) {
  MCS_REQUIRE(out, s);
  return guard([&]() -> int {
    auto spec = MacroscopeSpec::create(to_function(f, alphabet, epsilon), s->structure, to_blindness(b));
    *out = new mcs_macroscope_struct{std::move(spec)};
    return MCS_OK;
  });
}

int mcs_macroscope_destroy(mcs_macroscope_t m) {
  delete m;
  return MCS_OK;
}

int mcs_protocol_from_name(const char* name, mcs_protocol* out) {
  MCS_REQUIRE(name, out);
  return guard([&]() -> int {
    *out = from_protocol(parse_protocol_kind(name));
    return MCS_OK;
  });
}

const char* mcs_protocol_name(mcs_protocol p) {
  if (p < 0 || p >= MCS_PROTOCOL_COUNT) return "unknown";
  return to_string(kAllProtocols[p]).data();
}

int mcs_protocol_blindness(mcs_protocol p, mcs_blindness* b) {
  MCS_REQUIRE(b);
  return guard([&]() -> int {
    *b = protocol_spec(to_protocol(p)).required_blindness == Blindness::SingleBlind ? MCS_SINGLE_BLIND
                                                                                    : MCS_DOUBLE_BLIND;
    return MCS_OK;
  });
}

int mcs_protocol_supports(mcs_protocol p, mcs_function f, int* supported) {
  MCS_REQUIRE(supported);
  return guard([&]() -> int {
    *supported = protocol(to_protocol(p)).supports(to_kind(f)) ? 1 : 0;
    return MCS_OK;
  });
}

int mcs_default_protocol(mcs_function f, mcs_blindness b, mcs_protocol* out) {
  MCS_REQUIRE(out);
  return guard([&]() -> int {
    auto kind = default_protocol(to_kind(f), to_blindness(b));
    if (!kind) return fail(MCS_ERR_NOT_FOUND, "no protocol for this function and blindness");
    *out = from_protocol(*kind);
    return MCS_OK;
  });
}

int mcs_theoretical_bound(mcs_protocol p, mcs_macroscope_t m, uint64_t* bits) {
  MCS_REQUIRE(m, bits);
  return guard([&]() -> int {
    *bits = theoretical_bound(protocol(to_protocol(p)), m->spec);
    return MCS_OK;
  });
}

int mcs_run_discrete(mcs_run_t* out, mcs_protocol p, mcs_macroscope_t m, const uint32_t* values, size_t n) {
  MCS_REQUIRE(out, m);
  if (n > 0 && values == nullptr) return fail(MCS_ERR_NULL_POINTER, "null values");
  return guard([&]() -> int {
    const auto& f = m->spec.function();
    InputVector x;
    if (f.kind == FunctionKind::Constancy) {
      x = DaryVector{std::vector<std::uint32_t>(values, values + n), f.alphabet};
    } else if (f.kind == FunctionKind::Average) {
      return fail(MCS_ERR_MISMATCH, "average expects real values");
    } else {
      BinaryVector b;
      for (size_t i = 0; i < n; ++i) {
        if (values[i] > 1) return fail(MCS_ERR_MISMATCH, "binary input holds a value other than 0/1");
        b.bits.push_back(static_cast<std::uint8_t>(values[i]));
      }
      x = std::move(b);
    }
    *out = new mcs_run_struct{run_protocol(protocol(to_protocol(p)), m->spec, x)};
    return MCS_OK;
  });
}

int mcs_run_real(mcs_run_t* out, mcs_protocol p, mcs_macroscope_t m, const double* values, size_t n) {
  MCS_REQUIRE(out, m);
  if (n > 0 && values == nullptr) return fail(MCS_ERR_NULL_POINTER, "null values");
  return guard([&]() -> int {
    InputVector x = RealVector{std::vector<double>(values, values + n)};
    *out = new mcs_run_struct{run_protocol(protocol(to_protocol(p)), m->spec, x)};
    return MCS_OK;
  });
}

int mcs_run_destroy(mcs_run_t r) {
  delete r;
  return MCS_OK;
}

int mcs_run_cost_bits(mcs_run_t r, uint64_t* bits) {
  MCS_REQUIRE(r, bits);
  *bits = r->result.cost_bits;
  return MCS_OK;
}

int mcs_run_bound_bits(mcs_run_t r, uint64_t* bits) {
  MCS_REQUIRE(r, bits);
  *bits = r->result.bound_bits;
  return MCS_OK;
}

int mcs_run_correct(mcs_run_t r, int* correct) {
  MCS_REQUIRE(r, correct);
  *correct = r->result.correct ? 1 : 0;
  return MCS_OK;
}

int mcs_run_oracle(mcs_run_t r, double* value) {
  MCS_REQUIRE(r, value);
  *value = r->result.oracle_value;
  return MCS_OK;
}

int mcs_run_max_abs_error(mcs_run_t r, double* error) {
  MCS_REQUIRE(r, error);
  *error = r->result.max_abs_error;
  return MCS_OK;
}

int mcs_run_output(mcs_run_t r, uint32_t player, double* value) {
  MCS_REQUIRE(r, value);
  return guard([&]() -> int {
    *value = r->result.outputs[checked_player(r->result, player) - 1];
    return MCS_OK;
  });
}

int mcs_run_message(mcs_run_t r, uint32_t player, char* buf, size_t len, size_t* needed) {
  MCS_REQUIRE(r);
  return guard([&]() -> int {
    return write_text(r->result.blackboard.entry(checked_player(r->result, player)).to_string(), buf, len,
                      needed);
  });
}

int mcs_verify(mcs_verify_t* out, mcs_protocol p, mcs_macroscope_t m, uint64_t ceiling) {
  MCS_REQUIRE(out, m);
  return guard([&]() -> int {
    auto report = exhaustive_verify(protocol(to_protocol(p)), m->spec,
                                    ceiling ? ceiling : kDefaultVerifyCeiling);
    *out = new mcs_verify_struct{std::move(report)};
    return MCS_OK;
  });
}

int mcs_verify_destroy(mcs_verify_t v) {
  delete v;
  return MCS_OK;
}

int mcs_verify_inputs(mcs_verify_t v, uint64_t* inputs) {
  MCS_REQUIRE(v, inputs);
  *inputs = v->report.inputs;
  return MCS_OK;
}

int mcs_verify_failures(mcs_verify_t v, uint64_t* failures) {
  MCS_REQUIRE(v, failures);
  *failures = v->report.failure_count;
  return MCS_OK;
}

int mcs_verify_cost_mismatches(mcs_verify_t v, uint64_t* mismatches) {
  MCS_REQUIRE(v, mismatches);
  *mismatches = v->report.cost_mismatches;
  return MCS_OK;
}

int mcs_verify_bound_bits(mcs_verify_t v, uint64_t* bits) {
  MCS_REQUIRE(v, bits);
  *bits = v->report.bound_bits;
  return MCS_OK;
}

int mcs_verify_passed(mcs_verify_t v, int* passed) {
  MCS_REQUIRE(v, passed);
  *passed = v->report.passed() ? 1 : 0;
  return MCS_OK;
}

int mcs_verify_failure_text(mcs_verify_t v, size_t i, char* buf, size_t len, size_t* needed) {
  MCS_REQUIRE(v);
  return guard([&]() -> int {
    if (i >= v->report.failures.size()) return fail(MCS_ERR_NOT_FOUND, "no listed failure at that position");
    const auto& f = v->report.failures[i];
    std::ostringstream text;
    text << "input=";
    for (auto d : f.input) text << d;
    text << " player=" << f.player << " got=" << f.got << " expected=" << f.expected;
    return write_text(text.str(), buf, len, needed);
  });
}

int mcs_search(mcs_search_t* out, mcs_function f, uint32_t alphabet, mcs_structure_t s, mcs_blindness b,
               uint32_t budget, uint64_t ceiling) {
  MCS_REQUIRE(out, s);
  return guard([&]() -> int {
    SearchSpace space{to_function(f, alphabet, 0.0), s->structure, to_blindness(b), budget};
    auto result = min_cost_search(space, ceiling ? ceiling : kDefaultSearchCeiling);
    *out = new mcs_search_struct{std::move(space), std::move(result)};
    return MCS_OK;
  });
}

int mcs_search_destroy(mcs_search_t r) {
  delete r;
  return MCS_OK;
}

int mcs_search_found(mcs_search_t r, int* found) {
  MCS_REQUIRE(r, found);
  *found = r->result.min_cost ? 1 : 0;
  return MCS_OK;
}

int mcs_search_min_cost(mcs_search_t r, uint32_t* cost) {
  MCS_REQUIRE(r, cost);
  if (!r->result.min_cost) return fail(MCS_ERR_NOT_FOUND, "no protocol within the budget");
  *cost = *r->result.min_cost;
  return MCS_OK;
}

int mcs_search_explored(mcs_search_t r, uint64_t* explored) {
  MCS_REQUIRE(r, explored);
  *explored = r->result.explored;
  return MCS_OK;
}

int mcs_search_witness_text(mcs_search_t r, char* buf, size_t len, size_t* needed) {
  MCS_REQUIRE(r);
  return guard([&]() -> int { return write_text(format_witness(r->space, r->result), buf, len, needed); });
}

int mcs_search_verify_witness(mcs_search_t r, int* passed) {
  MCS_REQUIRE(r, passed);
  return guard([&]() -> int {
    if (!r->result.min_cost) return fail(MCS_ERR_NOT_FOUND, "no witness to verify");
    auto proto = witness_protocol(r->space, r->result);
    auto spec = MacroscopeSpec::create(r->space.function, r->space.structure, r->space.blindness);
    *passed = exhaustive_verify(*proto, spec, std::numeric_limits<std::uint64_t>::max()).passed() ? 1 : 0;
    return MCS_OK;
  });
}

}  // extern "C"
