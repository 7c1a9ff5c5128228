#include "fixtures.hpp"

#include <functional>
#include <map>

#include "tpad/random.hpp"

namespace tpad::testing {

std::vector<BitVector> all_vectors(std::size_t width) {
  std::vector<BitVector> out;
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << width); ++i) out.push_back(BitVector::from_uint(i, width));
  return out;
}

BitVector reference_eval(const Netlist& n, const BitVector& inputs) {
  std::map<WireId, bool> memo;
  for (std::size_t i = 0; i < n.inputs().size(); ++i) memo[n.inputs()[i]] = inputs[i];
  std::function<bool(WireId)> value = [&](WireId w) -> bool {
    if (auto it = memo.find(w); it != memo.end()) return it->second;
    const Gate& g = n.gate(*n.driver(w));
    std::vector<bool> in;
    for (WireId x : g.inputs) in.push_back(value(x));
    bool v = false;
    switch (g.kind) {
      case GateKind::And: v = true; for (bool b : in) v = v && b; break;
      case GateKind::Nand: v = true; for (bool b : in) v = v && b; v = !v; break;
      case GateKind::Or: for (bool b : in) v = v || b; break;
      case GateKind::Nor: for (bool b : in) v = v || b; v = !v; break;
      case GateKind::Xor: for (bool b : in) v = v != b; break;
      case GateKind::Not: v = !in[0]; break;
      case GateKind::Buf: v = in[0]; break;
      case GateKind::Const0: v = false; break;
      case GateKind::Const1: v = true; break;
      case GateKind::Dff: v = false; break;  // combinational reference only
    }
    memo[w] = v;
    return v;
  };
  BitVector out(n.outputs().size());
  for (std::size_t o = 0; o < n.outputs().size(); ++o) out.set(o, value(n.outputs()[o]));
  return out;
}

BitVector random_bits(std::size_t width, std::uint64_t seed) {
  Rng rng(seed);
  BitVector v(width);
  for (std::size_t i = 0; i < width; ++i) v.set(i, rng.coin());
  return v;
}

}  // namespace tpad::testing

namespace tpad::testing {

RamSymptom run_ram_trojan(ProtectedRam& ram, RamTrojan trojan) {
  for (std::uint64_t a = 0; a < ram.depth(); ++a) ram.cycle(RamOp::write, a, 0x1000 + a);
  ram.cycle(RamOp::read, 2, 0);
  RamFault fault{trojan, 1, 1};
  RamResult res = ram.cycle(trojan_operation(trojan), 3, 0xBEEF, fault);
  if (res.symptom != RamSymptom::none) return res.symptom;
  if (trojan == RamTrojan::wrong_write_address) return ram.cycle(RamOp::read, 2, 0).symptom;
  return RamSymptom::none;
}

}  // namespace tpad::testing
