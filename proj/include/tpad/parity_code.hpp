#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpad/bitvector.hpp"
#include "tpad/netlist.hpp"
#include "tpad/random.hpp"

namespace tpad {

/// Systematic parity-check matrix H = [A | I_r] over GF(2), stored as the r x k
/// block A. Every row of A and every column of A is nonzero. Columns are kept
/// as r-bit masks (bit i = row i), so r is limited to 64.
class ParityCheckMatrix {
 public:
  ParityCheckMatrix(std::size_t k, std::size_t r, std::vector<std::uint64_t> columns);

  /// Rows given as bit strings of length k ("1100" -> A[i][0] = A[i][1] = 1).
  static ParityCheckMatrix from_rows(const std::vector<std::string>& rows);

  std::size_t k() const noexcept { return k_; }
  std::size_t r() const noexcept { return r_; }
  std::size_t n() const noexcept { return k_ + r_; }

  bool at(std::size_t row, std::size_t col) const { return ((columns_.at(col) >> row) & 1U) != 0; }
  std::uint64_t column(std::size_t col) const { return columns_.at(col); }
  const std::vector<std::uint64_t>& columns() const noexcept { return columns_; }
  BitVector row(std::size_t i) const;

  friend bool operator==(const ParityCheckMatrix&, const ParityCheckMatrix&) = default;

 private:
  std::size_t k_;
  std::size_t r_;
  std::vector<std::uint64_t> columns_;
};

/// Uniform sample from { A : no zero row, no zero column }. Columns are drawn
/// uniformly from the nonzero r-bit vectors and the matrix is rejected only
/// when a row is zero, which gives the same distribution as whole-matrix
/// rejection without its acceptance collapse for k >> 2^r.
ParityCheckMatrix sample_parity_code(std::size_t k, std::size_t r, std::uint64_t seed);
ParityCheckMatrix sample_parity_code(std::size_t k, std::size_t r, Rng& rng);

/// bit i = XOR_j A[i][j] * info[j]
BitVector compute_check_bits(const ParityCheckMatrix& h, const BitVector& info);
/// Same on a packed info word (k <= 64); returns the r-bit mask.
std::uint64_t compute_check_mask(const ParityCheckMatrix& h, std::uint64_t info);

struct Codeword {
  BitVector info;
  BitVector check;
};

bool verify_codeword(const ParityCheckMatrix& h, const Codeword& word);

/// Netlist with k inputs `in0..` (plus one r-wide group per extra prefix)
/// whose output i is the parity of row i of A XORed with bit i of every extra
/// group. Rows are balanced trees of 2-input XOR gates.
Netlist build_parity_netlist(const ParityCheckMatrix& h, std::string_view name,
                             std::span<const std::string> extra_groups = {});

/// Output characteristic predictor: a copy of f composed with per-row XOR
/// trees over f's outputs, then simplified. Same inputs as f, r outputs.
Netlist build_ocp(const Netlist& f, const ParityCheckMatrix& h);

struct DetectionEstimate {
  std::uint64_t trials = 0;
  std::uint64_t detected = 0;
  double rate() const { return trials ? static_cast<double>(detected) / static_cast<double>(trials) : 0.0; }
  /// 3-sigma normal-approximation half width.
  double half_width_3sigma() const;
};

/// Monte Carlo: per trial a fresh code, a random codeword, and `weight`
/// distinct flipped positions anywhere in the n = k + r bits.
DetectionEstimate estimate_detection_probability(std::size_t k, std::size_t r, std::size_t weight,
                                                 std::uint64_t trials, std::uint64_t seed);

/// Matrix file: "k r" then r lines of k bits.
std::string write_matrix(const ParityCheckMatrix& h);
ParityCheckMatrix read_matrix(std::string_view text);

}  // namespace tpad
