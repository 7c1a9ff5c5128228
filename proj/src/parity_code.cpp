#include "tpad/parity_code.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "tpad/error.hpp"

namespace tpad {

namespace {

std::uint64_t row_mask(std::size_t r) { return r == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << r) - 1); }

// Balanced 2-input XOR tree over `leaves`; returns the root wire name.
std::string xor_tree(NetlistBuilder& b, std::vector<std::string> leaves, const std::string& prefix, int& counter) {
  while (leaves.size() > 1) {
    std::vector<std::string> next;
    for (std::size_t i = 0; i + 1 < leaves.size(); i += 2) {
      std::string out = prefix + std::to_string(counter++);
      b.add_gate(GateKind::Xor, out, {leaves[i], leaves[i + 1]});
      next.push_back(out);
    }
    if (leaves.size() % 2) next.push_back(leaves.back());
    leaves = std::move(next);
  }
  return leaves.front();
}

std::uint64_t nonzero_word(Rng& rng) {
  std::uint64_t v = rng.next();
  while (v == 0) v = rng.next();
  return v;
}

}  // namespace

ParityCheckMatrix::ParityCheckMatrix(std::size_t k, std::size_t r, std::vector<std::uint64_t> columns)
    : k_(k), r_(r), columns_(std::move(columns)) {
  if (k == 0 || r == 0) throw Error(Errc::invalid_argument, "parity code needs k >= 1 and r >= 1");
  if (r > 64) throw Error(Errc::invalid_argument, "at most 64 check bits are supported");
  if (columns_.size() != k) throw Error(Errc::width_mismatch, "expected " + std::to_string(k) + " columns");
  std::uint64_t rows_seen = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if ((columns_[j] & ~row_mask(r)) != 0) throw Error(Errc::invalid_argument, "column has bits beyond row r");
    if (columns_[j] == 0) throw Error(Errc::invalid_argument, "column " + std::to_string(j) + " of A is zero");
    rows_seen |= columns_[j];
  }
  if (rows_seen != row_mask(r)) throw Error(Errc::invalid_argument, "A has a zero row");
}

ParityCheckMatrix ParityCheckMatrix::from_rows(const std::vector<std::string>& rows) {
  if (rows.empty()) throw Error(Errc::invalid_argument, "matrix has no rows");
  const std::size_t k = rows.front().size();
  std::vector<std::uint64_t> cols(k, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != k) throw Error(Errc::width_mismatch, "matrix rows differ in length");
    BitVector bits = BitVector::from_string(rows[i]);
    for (std::size_t j = 0; j < k; ++j) {
      if (bits[j]) cols[j] |= std::uint64_t{1} << i;
    }
  }
  return ParityCheckMatrix(k, rows.size(), std::move(cols));
}

BitVector ParityCheckMatrix::row(std::size_t i) const {
  BitVector v(k_);
  for (std::size_t j = 0; j < k_; ++j) v.set(j, at(i, j));
  return v;
}

ParityCheckMatrix sample_parity_code(std::size_t k, std::size_t r, Rng& rng) {
  if (k == 0 || r == 0 || r > 64) throw Error(Errc::invalid_argument, "need k >= 1 and 1 <= r <= 64");
  const std::uint64_t full = row_mask(r);
  std::vector<std::uint64_t> cols(k);
  for (;;) {
    std::uint64_t seen = 0;
    for (auto& c : cols) {
      c = r == 64 ? nonzero_word(rng) : 1 + rng.below(full);
      seen |= c;
    }
    if (seen == full) return ParityCheckMatrix(k, r, cols);
  }
}

ParityCheckMatrix sample_parity_code(std::size_t k, std::size_t r, std::uint64_t seed) {
  Rng rng(seed);
  return sample_parity_code(k, r, rng);
}

BitVector compute_check_bits(const ParityCheckMatrix& h, const BitVector& info) {
  if (info.width() != h.k()) {
    throw Error(Errc::width_mismatch, "info width " + std::to_string(info.width()) + " != k " + std::to_string(h.k()));
  }
  std::uint64_t acc = 0;
  for (std::size_t j = 0; j < h.k(); ++j) {
    if (info[j]) acc ^= h.column(j);
  }
  return BitVector::from_uint(acc, h.r());
}

std::uint64_t compute_check_mask(const ParityCheckMatrix& h, std::uint64_t info) {
  std::uint64_t acc = 0;
  while (info) {
    acc ^= h.column(static_cast<std::size_t>(std::countr_zero(info)));
    info &= info - 1;
  }
  return acc;
}

bool verify_codeword(const ParityCheckMatrix& h, const Codeword& word) {
  if (word.check.width() != h.r()) throw Error(Errc::width_mismatch, "check width != r");
  return compute_check_bits(h, word.info) == word.check;
}

Netlist build_parity_netlist(const ParityCheckMatrix& h, std::string_view name,
                             std::span<const std::string> extra_groups) {
  NetlistBuilder b{std::string(name)};
  for (std::size_t j = 0; j < h.k(); ++j) b.add_input("in" + std::to_string(j));
  for (const auto& g : extra_groups) {
    for (std::size_t i = 0; i < h.r(); ++i) b.add_input(g + std::to_string(i));
  }
  int counter = 0;
  std::vector<std::string> outs;
  for (std::size_t i = 0; i < h.r(); ++i) {
    std::vector<std::string> leaves;
    for (std::size_t j = 0; j < h.k(); ++j) {
      if (h.at(i, j)) leaves.push_back("in" + std::to_string(j));
    }
    for (const auto& g : extra_groups) leaves.push_back(g + std::to_string(i));
    outs.push_back(xor_tree(b, leaves, "x", counter));
  }
  for (const auto& o : outs) b.add_output(o);
  return simplify(b.build());
}

Netlist build_ocp(const Netlist& f, const ParityCheckMatrix& h) {
  if (f.outputs().size() != h.k()) {
    throw Error(Errc::arity_mismatch, "function has " + std::to_string(f.outputs().size()) + " outputs but code has k = " +
                                          std::to_string(h.k()));
  }
  NetlistBuilder b(f.name() + "_ocp");
  for (WireId w : f.inputs()) b.add_input(f.wire_name(w));
  for (const Gate& g : f.gates()) {
    std::vector<std::string> ins;
    for (WireId w : g.inputs) ins.push_back(f.wire_name(w));
    b.add_gate(g.kind, f.wire_name(g.output), ins);
  }
  // Prefix chosen to avoid clashing with f's wire names.
  std::string prefix = "_ocp";
  auto clashes = [&] {
    for (const auto& nm : f.wire_names()) {
      if (nm.starts_with(prefix)) return true;
    }
    return false;
  };
  while (clashes()) prefix += "_";
  int counter = 0;
  std::vector<std::string> outs;
  for (std::size_t i = 0; i < h.r(); ++i) {
    std::vector<std::string> leaves;
    for (std::size_t j = 0; j < h.k(); ++j) {
      if (h.at(i, j)) leaves.push_back(f.wire_name(f.outputs()[j]));
    }
    outs.push_back(xor_tree(b, leaves, prefix, counter));
  }
  for (const auto& o : outs) b.add_output(o);
  return simplify(b.build());
}

double DetectionEstimate::half_width_3sigma() const {
  if (trials == 0) return 0.0;
  const double p = rate();
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

DetectionEstimate estimate_detection_probability(std::size_t k, std::size_t r, std::size_t weight,
                                                 std::uint64_t trials, std::uint64_t seed) {
  if (weight < 1 || weight > k + r) {
    throw Error(Errc::invalid_argument, "error weight must be in [1, k + r]");
  }
  if (trials == 0) throw Error(Errc::invalid_argument, "trials must be >= 1");
  DetectionEstimate est;
  est.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    ParityCheckMatrix h = sample_parity_code(k, r, rng);
    Codeword word{BitVector(k), BitVector()};
    for (std::size_t j = 0; j < k; ++j) word.info.set(j, rng.coin());
    word.check = compute_check_bits(h, word.info);
    for (std::size_t pos : rng.sample_without_replacement(k + r, weight)) {
      if (pos < k) {
        word.info.flip(pos);
      } else {
        word.check.flip(pos - k);
      }
    }
    if (!verify_codeword(h, word)) ++est.detected;
  }
  return est;
}

std::string write_matrix(const ParityCheckMatrix& h) {
  std::ostringstream os;
  os << h.k() << ' ' << h.r() << '\n';
  for (std::size_t i = 0; i < h.r(); ++i) os << h.row(i).to_string() << '\n';
  return os.str();
}

ParityCheckMatrix read_matrix(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::size_t k = 0;
  std::size_t r = 0;
  if (!(is >> k >> r)) throw Error(Errc::syntax, "matrix file must start with 'k r'");
  std::vector<std::string> rows;
  std::string row;
  while (rows.size() < r && is >> row) {
    if (row.size() != k) throw Error(Errc::width_mismatch, "matrix row has " + std::to_string(row.size()) + " bits, expected " + std::to_string(k));
    rows.push_back(row);
  }
  if (rows.size() != r) throw Error(Errc::syntax, "matrix file has fewer than r rows");
  return ParityCheckMatrix::from_rows(rows);
}

}  // namespace tpad
