#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tpad {

/// Ordered sequence of bits. Bit 0 is the first element; in the textual form
/// it is the leftmost character, and in the integer form the least
/// significant bit. An empty vector stands for "no bits" (e.g. the DFF state
/// of a purely combinational netlist).
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t width, bool value = false) : bits_(width, value ? 1 : 0) {}

  static BitVector from_string(std::string_view text);
  static BitVector from_uint(std::uint64_t value, std::size_t width);

  std::size_t width() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  bool at(std::size_t i) const;
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }

  std::size_t count() const noexcept;
  bool any() const noexcept { return count() != 0; }

  /// Bits 0..63 packed into an integer (bit i -> 2^i). Width must be <= 64.
  std::uint64_t to_uint() const;
  std::string to_string() const;

  BitVector& operator^=(const BitVector& other);
  friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
  friend bool operator==(const BitVector&, const BitVector&) = default;

  /// this followed by tail.
  BitVector concat(const BitVector& tail) const;
  BitVector slice(std::size_t offset, std::size_t count) const;

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace tpad
