#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "tpad/bitvector.hpp"
#include "tpad/netlist.hpp"

namespace tpad {

enum class EquivalenceMode { exhaustive, sampled };

struct EquivalenceOptions {
  /// Truth-table exhaustion is used while the compared input count (inputs
  /// times unrolled cycles) stays at or below this.
  std::size_t max_exhaustive_inputs = 16;
  std::size_t sample_count = 10000;
  std::uint64_t seed = 1;
  /// Horizon for sequential netlists, unrolled from the all-zero DFF state.
  std::size_t unroll_cycles = 4;
};

struct EquivalenceVerdict {
  bool equivalent = true;
  EquivalenceMode mode = EquivalenceMode::exhaustive;
  std::uint64_t vectors_checked = 0;
  /// 1 for combinational compares, otherwise the unroll horizon.
  std::size_t cycles = 1;
  /// Input sequence (cycle 0 bits first) on which the outputs differ.
  std::optional<BitVector> counterexample;
};

/// Miter-style comparison of two netlists with equal input and output counts.
/// Non-equivalence always comes with a counterexample that replay_differs
/// confirms; `sampled` equivalence is only evidence, not proof.
EquivalenceVerdict check_equivalence(const Netlist& a, const Netlist& b, const EquivalenceOptions& opts = {});

/// True when the two netlists produce different outputs on the given input
/// sequence, simulated for `cycles` cycles from the all-zero state.
bool replay_differs(const Netlist& a, const Netlist& b, const BitVector& sequence, std::size_t cycles);

}  // namespace tpad
