#include "tpad/circuits.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "tpad/error.hpp"
#include "tpad/random.hpp"

namespace tpad::circuits {

Netlist full_adder() {
  return parse_netlist(R"(.model full_adder
.inputs a b cin
.outputs s cout
g1 = XOR(a, b)
s = XOR(g1, cin)
c1 = AND(a, b)
c2 = AND(g1, cin)
cout = OR(c1, c2)
)");
}

Netlist two_bit_alu() {
  return parse_netlist(R"(.model alu2
.inputs a0 a1 b0 b1 op
.outputs o0 o1
s0 = XOR(a0, b0)
c0 = AND(a0, b0)
t1 = XOR(a1, b1)
s1 = XOR(t1, c0)
l0 = OR(a0, b0)
l1 = OR(a1, b1)
nop = NOT(op)
m0 = AND(s0, nop)
n0 = AND(l0, op)
o0 = OR(m0, n0)
m1 = AND(s1, nop)
n1 = AND(l1, op)
o1 = OR(m1, n1)
)");
}

Netlist ripple_adder(std::size_t bits) {
  if (bits == 0) throw Error(Errc::invalid_argument, "adder needs at least one bit");
  NetlistBuilder b("adder" + std::to_string(bits));
  for (std::size_t i = 0; i < bits; ++i) b.add_input("a" + std::to_string(i));
  for (std::size_t i = 0; i < bits; ++i) b.add_input("b" + std::to_string(i));
  b.add_input("cin");
  std::string carry = "cin";
  for (std::size_t i = 0; i < bits; ++i) {
    const std::string n = std::to_string(i);
    b.add_gate(GateKind::Xor, "p" + n, {"a" + n, "b" + n});
    b.add_gate(GateKind::Xor, "s" + n, {"p" + n, carry});
    b.add_gate(GateKind::And, "g" + n, {"a" + n, "b" + n});
    b.add_gate(GateKind::And, "q" + n, {"p" + n, carry});
    carry = i + 1 == bits ? "cout" : "c" + std::to_string(i + 1);
    b.add_gate(GateKind::Or, carry, {"g" + n, "q" + n});
  }
  for (std::size_t i = 0; i < bits; ++i) b.add_output("s" + std::to_string(i));
  b.add_output("cout");
  return b.build();
}

Netlist random_netlist(std::size_t inputs, std::size_t outputs, std::size_t gates, std::uint64_t seed) {
  if (inputs < 2 || outputs == 0 || gates < outputs) {
    throw Error(Errc::invalid_argument, "random netlist needs >= 2 inputs and gates >= outputs >= 1");
  }
  static constexpr GateKind kKinds[] = {GateKind::And, GateKind::Or,  GateKind::Xor,
                                        GateKind::Nand, GateKind::Nor, GateKind::Not};
  Rng rng(seed);
  NetlistBuilder b("rand" + std::to_string(seed % 100000));
  std::vector<std::string> wires;
  for (std::size_t i = 0; i < inputs; ++i) {
    wires.push_back("i" + std::to_string(i));
    b.add_input(wires.back());
  }
  auto pick = [&] {
    // Half the draws come from the most recent window to deepen the logic.
    const std::size_t window = std::min<std::size_t>(wires.size(), inputs + 4);
    if (rng.coin()) return wires[wires.size() - 1 - rng.below(window)];
    return wires[rng.below(wires.size())];
  };
  for (std::size_t g = 0; g < gates; ++g) {
    GateKind kind = kKinds[rng.below(std::size(kKinds))];
    std::vector<std::string> ins;
    const std::size_t arity = kind == GateKind::Not ? 1 : 2;
    while (ins.size() < arity) {
      std::string w = pick();
      if (std::find(ins.begin(), ins.end(), w) == ins.end()) ins.push_back(w);
    }
    std::string out = "g" + std::to_string(g);
    b.add_gate(kind, out, ins);
    wires.push_back(out);
  }
  for (std::size_t o = 0; o < outputs; ++o) b.add_output("g" + std::to_string(gates - outputs + o));
  return b.build();
}

}  // namespace tpad::circuits
