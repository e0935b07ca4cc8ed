#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "engine.hpp"

namespace macroscope {

enum class ProtocolKind {
  SbGeneric,
  DbGeneric,
  SbConstancy,
  DbConstancy,
  DbBsf,
  SbBsf,
  SbAverage,
};

inline constexpr ProtocolKind kAllProtocols[] = {
    ProtocolKind::SbGeneric,   ProtocolKind::DbGeneric, ProtocolKind::SbConstancy,
    ProtocolKind::DbConstancy, ProtocolKind::DbBsf,     ProtocolKind::SbBsf,
    ProtocolKind::SbAverage,
};

struct ProtocolSpec {
  ProtocolKind name;
  Blindness required_blindness;
  std::vector<FunctionKind> functions;
};

ProtocolSpec protocol_spec(ProtocolKind kind);
std::string_view to_string(ProtocolKind kind);
ProtocolKind parse_protocol_kind(std::string_view text);

// Shared stateless instance.
const Protocol& protocol(ProtocolKind kind);

// The dedicated protocol for a (function, blindness) pair, falling back to
// the generic one for Parity. Average has no double-blind protocol.
std::optional<ProtocolKind> default_protocol(FunctionKind f, Blindness b);

// Bits per input value for the generic protocols: ceil(log2 D), 1 for binary.
unsigned value_width(const TargetFunction& f);

// Averaging helpers. average_bits is the smallest b with epsilon * 2^b >= k.
unsigned average_bits(std::uint32_t k, double epsilon);
// (1/N) * sum over own indices of x_j / N_j.
double average_contribution(const AllotmentStructure& s, Player p, std::span<const double> own_values);
std::uint64_t average_quantize(double contribution, unsigned bits);
double average_dequantize(std::uint64_t q, unsigned bits);

}  // namespace macroscope
