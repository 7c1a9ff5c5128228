#include "tpad/lfsr.hpp"

#include <bit>
#include <set>
#include <sstream>

#include "tpad/error.hpp"

namespace tpad {

namespace {

std::uint64_t low_mask(unsigned bits) { return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1; }

void check_poly(std::uint64_t poly, unsigned degree) {
  if (degree < 1 || degree > kMaxLfsrDegree)
    throw Error(Errc::invalid_argument, "LFSR degree must be in 1.." + std::to_string(kMaxLfsrDegree));
  if (std::bit_width(poly) != degree + 1)
    throw Error(Errc::invalid_argument, "polynomial does not have degree " + std::to_string(degree));
}

std::string hex(std::uint64_t v) {
  std::ostringstream out;
  out << "0x" << std::hex << v;
  return out.str();
}

}  // namespace

void validate(const LfsrSpec& spec) {
  check_poly(spec.poly, spec.degree);
  if ((spec.poly & 1U) == 0) throw Error(Errc::invalid_argument, "polynomial constant term must be 1");
  if (spec.seed == 0) throw Error(Errc::zero_state, "LFSR seed must be nonzero");
  if ((spec.seed & ~low_mask(spec.degree)) != 0) throw Error(Errc::invalid_argument, "seed wider than the LFSR");
  std::set<unsigned> seen;
  for (unsigned t : spec.taps) {
    if (t >= spec.degree) throw Error(Errc::index_out_of_range, "tap " + std::to_string(t) + " outside the LFSR");
    if (!seen.insert(t).second) throw Error(Errc::invalid_argument, "duplicate tap " + std::to_string(t));
  }
}

std::uint64_t step_lfsr(std::uint64_t state, const LfsrSpec& spec) {
  if (state == 0) throw Error(Errc::zero_state, "LFSR state is zero");
  const unsigned L = spec.degree;
  const std::uint64_t feedback = std::popcount(state & spec.poly & low_mask(L)) & 1U;
  return (state >> 1) | (feedback << (L - 1));
}

bool is_primitive(std::uint64_t poly, unsigned degree, unsigned max_degree) {
  if (degree > max_degree)
    throw Error(Errc::unsupported_degree, "primitivity walk limited to degree " + std::to_string(max_degree));
  check_poly(poly, degree);
  if ((poly & 1U) == 0) return false;  // divisible by x
  LfsrSpec spec{degree, poly, 1, {}};
  const std::uint64_t full = (std::uint64_t{1} << degree) - 1;
  std::uint64_t s = 1;
  for (std::uint64_t steps = 1; steps <= full; ++steps) {
    s = step_lfsr(s, spec);
    if (s == 1) return steps == full;
  }
  return false;
}

BitVector tap_bits(std::uint64_t state, const LfsrSpec& spec) {
  BitVector out(spec.taps.size());
  for (std::size_t i = 0; i < spec.taps.size(); ++i) out.set(i, ((state >> spec.taps[i]) & 1U) != 0);
  return out;
}

Lfsr::Lfsr(LfsrSpec spec) : spec_(std::move(spec)), state_(spec_.seed) { validate(spec_); }

BitVector checker_output(const BitVector& taps, const BitVector& predicted, const BitVector& actual) {
  return taps ^ predicted ^ actual;
}

BitVector combine_error_signals(const BitVector& taps, std::span<const BitVector> signals) {
  if (signals.empty()) throw Error(Errc::invalid_argument, "no error signals to combine");
  BitVector out(taps.width());
  for (const auto& s : signals)
    if (s.width() != taps.width()) throw Error(Errc::width_mismatch, "error signal width differs from taps");
  for (std::size_t i = 0; i < taps.width(); ++i) {
    bool v = taps[i];
    for (const auto& s : signals) v = taps[i] ? (v && s[i]) : (v || s[i]);
    out.set(i, v);
  }
  return out;
}

bool Monitor::check(const BitVector& received) {
  BitVector expect = lfsr_.taps();
  if (received.width() != expect.width())
    throw Error(Errc::width_mismatch, "received " + std::to_string(received.width()) + " error bits, expected " +
                                          std::to_string(expect.width()));
  bool attack = received != expect;
  if (attack) reports_.push_back(cycle_);
  lfsr_.step();
  ++cycle_;
  return attack;
}

std::string write_lfsr_spec(const LfsrSpec& spec) {
  std::string out = "L " + std::to_string(spec.degree) + "\npoly " + hex(spec.poly) + "\nseed " + hex(spec.seed) + "\ntaps";
  for (unsigned t : spec.taps) out += " " + std::to_string(t);
  return out + "\n";
}

LfsrSpec read_lfsr_spec(std::string_view text) {
  LfsrSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  bool have[4] = {false, false, false, false};
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto number = [&](int base) {
      std::string tok;
      if (!(ls >> tok)) throw SyntaxError(line_no, 1, "missing value for '" + key + "'");
      try {
        std::size_t used = 0;
        auto v = std::stoull(tok, &used, base);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return static_cast<std::uint64_t>(v);
      } catch (const std::exception&) {
        throw SyntaxError(line_no, static_cast<int>(line.find(tok)) + 1, "bad number '" + tok + "'");
      }
    };
    if (key == "L") {
      spec.degree = static_cast<unsigned>(number(10));
      have[0] = true;
    } else if (key == "poly") {
      spec.poly = number(16);
      have[1] = true;
    } else if (key == "seed") {
      spec.seed = number(16);
      have[2] = true;
    } else if (key == "taps") {
      spec.taps.clear();
      std::string tok;
      while (ls >> tok) {
        std::istringstream one(tok);
        unsigned t;
        if (!(one >> t)) throw SyntaxError(line_no, static_cast<int>(line.find(tok)) + 1, "bad tap '" + tok + "'");
        spec.taps.push_back(t);
      }
      have[3] = true;
    } else {
      throw SyntaxError(line_no, 1, "unknown key '" + key + "'");
    }
  }
  for (bool h : have)
    if (!h) throw SyntaxError(line_no + 1, 1, "LFSR spec needs L, poly, seed and taps");
  validate(spec);
  return spec;
}

}  // namespace tpad
