#pragma once

#include <cstdint>
#include <vector>

#include "tpad/bitvector.hpp"
#include "tpad/netlist.hpp"
#include "tpad/ram.hpp"

namespace tpad::testing {

/// Every vector of the given width, index i -> BitVector::from_uint(i).
std::vector<BitVector> all_vectors(std::size_t width);

/// Scalar reference evaluation written independently of the packed evaluator:
/// gates are resolved by recursive descent from each output.
BitVector reference_eval(const Netlist& n, const BitVector& inputs);

/// Uniform random bit vector.
BitVector random_bits(std::size_t width, std::uint64_t seed);

/// One RAM Trojan scenario: every row is written with 0x1000 + addr, row 2
/// is read, then the Trojan acts on a single matching request at address 3
/// (bus data 0xBEEF). For wrong_write_address the redirected row 2 is read
/// next. Returns the first symptom the checker raises, or none.
RamSymptom run_ram_trojan(ProtectedRam& ram, RamTrojan trojan);

}  // namespace tpad::testing
