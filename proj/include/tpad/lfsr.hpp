#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpad/bitvector.hpp"

namespace tpad {

/// Fibonacci LFSR. `poly` is the full coefficient mask including x^L (bit L)
/// and the constant term (bit 0): x^4 + x + 1 is 0x13. State bit i is the
/// i-th oldest bit; each step shifts right and feeds the parity of the state
/// bits selected by poly's low L coefficients into bit L-1.
struct LfsrSpec {
  unsigned degree = 1;
  std::uint64_t poly = 0x3;
  std::uint64_t seed = 1;
  /// State bit positions exposed as the r-bit error encoding.
  std::vector<unsigned> taps;

  std::size_t r() const noexcept { return taps.size(); }
  friend bool operator==(const LfsrSpec&, const LfsrSpec&) = default;
};

inline constexpr unsigned kMaxLfsrDegree = 63;
inline constexpr unsigned kMaxPrimitivityDegree = 24;

/// Throws Errc::invalid_argument on any violated LfsrSpec invariant.
void validate(const LfsrSpec& spec);

/// Errc::zero_state for a zero state.
std::uint64_t step_lfsr(std::uint64_t state, const LfsrSpec& spec);

/// Exhaustive period walk from state 1. Errc::unsupported_degree above
/// max_degree; Errc::invalid_argument if poly does not have degree exactly L.
bool is_primitive(std::uint64_t poly, unsigned degree, unsigned max_degree = kMaxPrimitivityDegree);

/// Tap bits of a state, in tap order.
BitVector tap_bits(std::uint64_t state, const LfsrSpec& spec);

/// Single-owner running LFSR.
class Lfsr {
 public:
  explicit Lfsr(LfsrSpec spec);
  std::uint64_t state() const noexcept { return state_; }
  BitVector taps() const { return tap_bits(state_, spec_); }
  void step() { state_ = step_lfsr(state_, spec_); }
  const LfsrSpec& spec() const noexcept { return spec_; }

 private:
  LfsrSpec spec_;
  std::uint64_t state_;
};

struct ErrorSignal {
  BitVector bits;
  std::uint64_t cycle = 0;
};

/// taps XOR predicted XOR actual: equal to the taps exactly when the
/// prediction matches.
BitVector checker_output(const BitVector& taps, const BitVector& predicted, const BitVector& actual);

/// Per bit: OR of the signals where the tap is 0, AND where it is 1.
BitVector combine_error_signals(const BitVector& taps, std::span<const BitVector> signals);

/// Trusted off-chip monitor mirroring the chip's LFSR.
class Monitor {
 public:
  explicit Monitor(LfsrSpec spec) : lfsr_(std::move(spec)) {}

  /// Compares one received signal against the local taps, then advances.
  /// Returns true when an attack is reported for this cycle.
  bool check(const BitVector& received);
  BitVector expected() const { return lfsr_.taps(); }

  std::uint64_t cycle() const noexcept { return cycle_; }
  /// Cycles on which an attack was reported.
  const std::vector<std::uint64_t>& reports() const noexcept { return reports_; }

 private:
  Lfsr lfsr_;
  std::uint64_t cycle_ = 0;
  std::vector<std::uint64_t> reports_;
};

/// Spec file lines: `L <n>`, `poly 0x..`, `seed 0x..`, `taps a b c`.
std::string write_lfsr_spec(const LfsrSpec& spec);
LfsrSpec read_lfsr_spec(std::string_view text);

}  // namespace tpad
