#include "tpad/bitvector.hpp"

#include <algorithm>

#include "tpad/error.hpp"

namespace tpad {

BitVector BitVector::from_string(std::string_view text) {
  BitVector v(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '0' && text[i] != '1') {
      throw Error(Errc::invalid_argument, "bit string may only contain 0 and 1: '" + std::string(text) + "'");
    }
    v.bits_[i] = text[i] == '1' ? 1 : 0;
  }
  return v;
}

BitVector BitVector::from_uint(std::uint64_t value, std::size_t width) {
  if (width > 64) throw Error(Errc::invalid_argument, "from_uint supports at most 64 bits");
  BitVector v(width);
  for (std::size_t i = 0; i < width; ++i) v.bits_[i] = static_cast<std::uint8_t>((value >> i) & 1U);
  return v;
}

bool BitVector::at(std::size_t i) const {
  if (i >= bits_.size()) throw Error(Errc::index_out_of_range, "bit index " + std::to_string(i) + " out of range");
  return bits_[i] != 0;
}

std::size_t BitVector::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::uint64_t BitVector::to_uint() const {
  if (bits_.size() > 64) throw Error(Errc::invalid_argument, "to_uint supports at most 64 bits");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) v |= static_cast<std::uint64_t>(bits_[i]) << i;
  return v;
}

std::string BitVector::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = bits_[i] ? '1' : '0';
  return s;
}

BitVector& BitVector::operator^=(const BitVector& other) {
  if (other.width() != width()) {
    throw Error(Errc::width_mismatch,
                "xor of widths " + std::to_string(width()) + " and " + std::to_string(other.width()));
  }
  for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] ^= other.bits_[i];
  return *this;
}

BitVector BitVector::concat(const BitVector& tail) const {
  BitVector v = *this;
  v.bits_.insert(v.bits_.end(), tail.bits_.begin(), tail.bits_.end());
  return v;
}

BitVector BitVector::slice(std::size_t offset, std::size_t count) const {
  if (offset + count > bits_.size()) throw Error(Errc::index_out_of_range, "slice out of range");
  BitVector v(count);
  std::copy_n(bits_.begin() + static_cast<std::ptrdiff_t>(offset), count, v.bits_.begin());
  return v;
}

}  // namespace tpad
