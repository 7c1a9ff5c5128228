#pragma once

#include <cstddef>
#include <cstdint>

#include "tpad/netlist.hpp"

namespace tpad::circuits {

/// Inputs a b cin, outputs s cout; 2 XOR, 2 AND, 1 OR.
Netlist full_adder();

/// Inputs a0 a1 b0 b1 op, outputs o0 o1. op = 0 adds (mod 4), op = 1 is
/// bitwise OR.
Netlist two_bit_alu();

/// n-bit ripple-carry adder: inputs a0.. b0.. cin, outputs s0.. cout.
Netlist ripple_adder(std::size_t bits);

/// Random combinational DAG drawn from AND/OR/XOR/NAND/NOR/NOT. Every output
/// is a distinct gate wire; fan-in favours recent wires so cones overlap.
Netlist random_netlist(std::size_t inputs, std::size_t outputs, std::size_t gates, std::uint64_t seed);

}  // namespace tpad::circuits
