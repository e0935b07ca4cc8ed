#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace macroscope {

// A message written to the blackboard. Bits are stored most significant
// first in write order.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::string_view text);  // '0'/'1' characters

  void push_back(bool bit) { bits_.push_back(bit); }
  void append(const BitString& other);
  void append_uint(std::uint64_t value, unsigned width);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i]; }

  std::string to_string() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<bool> bits_;
};

// Big-endian fixed-width encoding; throws Overflow if value >= 2^width.
BitString encode_uint(std::uint64_t value, unsigned width);
std::uint64_t decode_uint(const BitString& bits, std::size_t offset, unsigned width);

// Sequential reader over a single blackboard entry.
class BitReader {
 public:
  explicit BitReader(const BitString& bits) : bits_(&bits) {}

  std::uint64_t read_uint(unsigned width);
  bool read_bit() { return read_uint(1) != 0; }
  std::size_t remaining() const noexcept { return bits_->size() - pos_; }

 private:
  const BitString* bits_;
  std::size_t pos_ = 0;
};

// ceil(log2(q)) for q >= 1, with ceil_log2(1) == 0.
unsigned ceil_log2(std::uint64_t q);

}  // namespace macroscope
