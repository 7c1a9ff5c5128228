#include "tpad/equivalence.hpp"

#include <bit>
#include <vector>

#include "tpad/error.hpp"
#include "tpad/random.hpp"

namespace tpad {

namespace {

// Lanes of a word that correspond to exhaustive vector indices
// word*64 .. word*64+63, restricted to the first `total` vectors.
std::uint64_t exhaustive_word(std::size_t bit, std::uint64_t word) {
  static constexpr std::uint64_t kLow[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
                                            0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  if (bit < 6) return kLow[bit];
  return ((word >> (bit - 6)) & 1U) ? ~std::uint64_t{0} : 0;
}

class Miter {
 public:
  Miter(const Netlist& a, const Netlist& b, std::size_t cycles)
      : a_(a), b_(b), ea_(a), eb_(b), cycles_(cycles), width_(a.inputs().size()) {}

  // Returns the lanes on which any output differs in any cycle. `vec` holds
  // one word per compared input bit (width * cycles words).
  std::uint64_t diff(const std::vector<std::uint64_t>& vec) {
    std::vector<std::uint64_t> sa(a_.dffs().size(), 0);
    std::vector<std::uint64_t> sb(b_.dffs().size(), 0);
    std::uint64_t diff = 0;
    for (std::size_t c = 0; c < cycles_; ++c) {
      std::span<const std::uint64_t> in(vec.data() + c * width_, width_);
      ea_.run(in, sa);
      eb_.run(in, sb);
      for (std::size_t o = 0; o < a_.outputs().size(); ++o) diff |= ea_.output(o) ^ eb_.output(o);
      for (std::size_t i = 0; i < sa.size(); ++i) sa[i] = ea_.next_state(i);
      for (std::size_t i = 0; i < sb.size(); ++i) sb[i] = eb_.next_state(i);
    }
    return diff;
  }

 private:
  const Netlist& a_;
  const Netlist& b_;
  Evaluator ea_;
  Evaluator eb_;
  std::size_t cycles_;
  std::size_t width_;
};

BitVector lane_vector(const std::vector<std::uint64_t>& vec, int lane) {
  BitVector v(vec.size());
  for (std::size_t i = 0; i < vec.size(); ++i) v.set(i, ((vec[i] >> lane) & 1U) != 0);
  return v;
}

}  // namespace

EquivalenceVerdict check_equivalence(const Netlist& a, const Netlist& b, const EquivalenceOptions& opts) {
  if (a.inputs().size() != b.inputs().size() || a.outputs().size() != b.outputs().size()) {
    throw Error(Errc::arity_mismatch, "netlists differ in input or output count");
  }
  EquivalenceVerdict verdict;
  verdict.cycles = (a.is_combinational() && b.is_combinational()) ? 1 : std::max<std::size_t>(1, opts.unroll_cycles);
  const std::size_t bits = a.inputs().size() * verdict.cycles;
  Miter miter(a, b, verdict.cycles);
  std::vector<std::uint64_t> vec(bits);

  if (bits <= opts.max_exhaustive_inputs) {
    verdict.mode = EquivalenceMode::exhaustive;
    const std::uint64_t total = std::uint64_t{1} << bits;
    const std::uint64_t words = (total + 63) / 64;
    const std::uint64_t tail_mask = total >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << total) - 1);
    for (std::uint64_t w = 0; w < words; ++w) {
      for (std::size_t i = 0; i < bits; ++i) vec[i] = exhaustive_word(i, w);
      std::uint64_t d = miter.diff(vec) & tail_mask;
      if (d) {
        verdict.equivalent = false;
        verdict.vectors_checked = w * 64 + static_cast<std::uint64_t>(std::countr_zero(d)) + 1;
        verdict.counterexample = lane_vector(vec, std::countr_zero(d));
        return verdict;
      }
    }
    verdict.vectors_checked = total;
    return verdict;
  }

  verdict.mode = EquivalenceMode::sampled;
  Rng rng(opts.seed);
  std::uint64_t done = 0;
  while (done < opts.sample_count) {
    const std::uint64_t lanes = std::min<std::uint64_t>(64, opts.sample_count - done);
    const std::uint64_t mask = lanes == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << lanes) - 1);
    for (auto& word : vec) word = rng.next();
    std::uint64_t d = miter.diff(vec) & mask;
    if (d) {
      verdict.equivalent = false;
      verdict.vectors_checked = done + static_cast<std::uint64_t>(std::countr_zero(d)) + 1;
      verdict.counterexample = lane_vector(vec, std::countr_zero(d));
      return verdict;
    }
    done += lanes;
  }
  verdict.vectors_checked = done;
  return verdict;
}

bool replay_differs(const Netlist& a, const Netlist& b, const BitVector& sequence, std::size_t cycles) {
  if (cycles == 0 || sequence.width() != a.inputs().size() * cycles || a.inputs().size() != b.inputs().size() ||
      a.outputs().size() != b.outputs().size()) {
    throw Error(Errc::width_mismatch, "replay sequence does not match netlist arity");
  }
  Miter miter(a, b, cycles);
  std::vector<std::uint64_t> vec(sequence.width());
  for (std::size_t i = 0; i < vec.size(); ++i) vec[i] = sequence[i] ? 1 : 0;
  return (miter.diff(vec) & 1U) != 0;
}

}  // namespace tpad
