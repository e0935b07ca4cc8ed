#include "bits.hpp"

#include "error.hpp"

namespace macroscope {

BitString::BitString(std::string_view text) {
  bits_.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw Error(ErrorCode::InvalidArgument, "bit string may only contain '0' and '1'");
    }
    bits_.push_back(c == '1');
  }
}

void BitString::append(const BitString& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

void BitString::append_uint(std::uint64_t value, unsigned width) {
  if (width < 64 && (value >> width) != 0) {
    throw Error(ErrorCode::Overflow, "value " + std::to_string(value) + " does not fit in " +
                                         std::to_string(width) + " bits");
  }
  for (unsigned i = width; i-- > 0;) {
    bits_.push_back(((value >> i) & 1U) != 0);
  }
}

std::string BitString::to_string() const {
  std::string out;
  out.reserve(bits_.size());
  for (bool b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

BitString encode_uint(std::uint64_t value, unsigned width) {
  BitString out;
  out.append_uint(value, width);
  return out;
}

std::uint64_t decode_uint(const BitString& bits, std::size_t offset, unsigned width) {
  if (width > 64 || offset + width > bits.size()) {
    throw Error(ErrorCode::ProtocolFailure, "read past the end of a blackboard entry");
  }
  std::uint64_t value = 0;
  for (unsigned i = 0; i < width; ++i) {
    value = (value << 1) | (bits[offset + i] ? 1U : 0U);
  }
  return value;
}

std::uint64_t BitReader::read_uint(unsigned width) {
  std::uint64_t v = decode_uint(*bits_, pos_, width);
  pos_ += width;
  return v;
}

unsigned ceil_log2(std::uint64_t q) {
  if (q == 0) throw Error(ErrorCode::InvalidArgument, "ceil_log2 of zero");
  unsigned w = 0;
  while (w < 64 && (std::uint64_t{1} << w) < q) ++w;
  return w;
}

}  // namespace macroscope
