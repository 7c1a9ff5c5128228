#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tpad/circuits.hpp"
#include "tpad/equivalence.hpp"
#include "tpad/error.hpp"
#include "tpad/netlist.hpp"

using namespace tpad;
using tpad::testing::all_vectors;
using tpad::testing::reference_eval;

namespace {

Errc parse_error_code(const std::string& text) {
  try {
    parse_netlist(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return Errc::io;
}

std::size_t count_kind(const Netlist& n, GateKind kind) {
  std::size_t c = 0;
  for (const auto& g : n.gates()) c += g.kind == kind;
  return c;
}

}  // namespace

TEST(ParseNetlist, FullAdder) {
  Netlist fa = circuits::full_adder();
  EXPECT_EQ(fa.gates().size(), 5u);
  EXPECT_EQ(count_kind(fa, GateKind::Xor), 2u);
  EXPECT_EQ(count_kind(fa, GateKind::And), 2u);
  EXPECT_EQ(count_kind(fa, GateKind::Or), 1u);
  EXPECT_EQ(fa.inputs().size(), 3u);
  EXPECT_EQ(fa.outputs().size(), 2u);
}

TEST(ParseNetlist, BufferIdentity) {
  Netlist n = parse_netlist(".inputs a\n.outputs y\ny = BUF(a)\n");
  EXPECT_EQ(n.gates().size(), 1u);
  EXPECT_EQ(evaluate(n, BitVector::from_string("1")).outputs, BitVector::from_string("1"));
  EXPECT_EQ(evaluate(n, BitVector::from_string("0")).outputs, BitVector::from_string("0"));
}

TEST(ParseNetlist, CommentsAndWhitespace) {
  Netlist n = parse_netlist("# header\n.model m  # trailing\n.inputs a b\n\n.outputs y\n  y=AND( a ,b )\n");
  EXPECT_EQ(n.name(), "m");
  EXPECT_EQ(n.gates().front().kind, GateKind::And);
}

TEST(ParseNetlist, DistinctErrorKinds) {
  EXPECT_EQ(parse_error_code(".inputs a b\n.outputs y\ny = AND(a, b)\ny = OR(a, b)\n"), Errc::multiple_drivers);
  EXPECT_EQ(parse_error_code(".inputs a\n.outputs y\ny = AND(a, b)\n"), Errc::undriven_wire);
  EXPECT_EQ(parse_error_code(".inputs a b\n.outputs y\ny = NOT(a, b)\n"), Errc::arity_mismatch);
  EXPECT_EQ(parse_error_code(".inputs a\n.outputs y\ny = AND(a)\n"), Errc::arity_mismatch);
  EXPECT_EQ(parse_error_code(".inputs a\n.outputs y\np = AND(a, q)\nq = OR(a, p)\ny = BUF(q)\n"),
            Errc::combinational_cycle);
  EXPECT_EQ(parse_error_code(".inputs a\n.outputs y\ny = FOO(a)\n"), Errc::syntax);
  EXPECT_EQ(parse_error_code(".inputs a\n.outputs y\ny = BUF(a\n"), Errc::syntax);
  EXPECT_EQ(parse_error_code(".wires a\n"), Errc::syntax);
  EXPECT_EQ(parse_error_code(".inputs a b\n.outputs z\ns = SB2(a, b -> z, w)\n"), Errc::syntax);
  EXPECT_EQ(parse_error_code(".inputs a a\n.outputs a\n"), Errc::multiple_drivers);
}

TEST(ParseNetlist, SyntaxErrorReportsPosition) {
  try {
    parse_netlist(".inputs a\n.outputs y\ny = BUF(a b)\n");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 11);  // the stray "b"
  }
}

TEST(ParseNetlist, DffBreaksCycles) {
  Netlist n = parse_netlist(".inputs en\n.outputs q\nq = DFF(d)\nd = XOR(q, en)\n");
  EXPECT_FALSE(n.is_combinational());
  auto r = evaluate(n, BitVector::from_string("1"), BitVector::from_string("0"));
  EXPECT_EQ(r.outputs, BitVector::from_string("0"));
  EXPECT_EQ(r.next_state, BitVector::from_string("1"));
  r = evaluate(n, BitVector::from_string("1"), r.next_state);
  EXPECT_EQ(r.outputs, BitVector::from_string("1"));
  EXPECT_EQ(r.next_state, BitVector::from_string("0"));
}

TEST(ParseNetlist, CanonicalRoundTripIsBitExact) {
  for (const Netlist& n : {circuits::full_adder(), circuits::two_bit_alu(), circuits::random_netlist(6, 3, 30, 7)}) {
    std::string text = serialize_netlist(n);
    Netlist again = parse_netlist(text);
    EXPECT_EQ(serialize_netlist(again), text);
    EXPECT_TRUE(check_equivalence(n, again).equivalent);
  }
}

TEST(Evaluate, FullAdderMatchesArithmetic) {
  Netlist fa = circuits::full_adder();
  EXPECT_EQ(evaluate(fa, BitVector::from_string("110")).outputs, BitVector::from_string("01"));
  EXPECT_EQ(evaluate(fa, BitVector::from_string("111")).outputs, BitVector::from_string("11"));
  for (const auto& x : all_vectors(3)) {
    int sum = x[0] + x[1] + x[2];
    auto out = evaluate(fa, x).outputs;
    EXPECT_EQ(out[0], (sum & 1) != 0);
    EXPECT_EQ(out[1], (sum & 2) != 0);
  }
}

TEST(Evaluate, WidthMismatch) {
  Netlist fa = circuits::full_adder();
  try {
    evaluate(fa, BitVector::from_string("11"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::width_mismatch);
  }
}

TEST(Evaluate, PackedAgreesWithReferenceOnRandomNetlists) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Netlist n = circuits::random_netlist(7, 4, 40, seed);
    for (const auto& x : all_vectors(7)) ASSERT_EQ(evaluate(n, x).outputs, reference_eval(n, x)) << seed;
  }
}

TEST(Evaluate, FaultsAreSeenDownstream) {
  Netlist fa = circuits::full_adder();
  WireFault f{*fa.find_wire("g1"), FaultMode::flip};
  auto out = evaluate(fa, BitVector::from_string("000"), {}, std::span(&f, 1)).outputs;
  EXPECT_EQ(out, BitVector::from_string("10"));  // s = 1, cout = AND(1, 0) | 0 = 0
  WireFault stuck{*fa.find_wire("cout"), FaultMode::stuck1};
  out = evaluate(fa, BitVector::from_string("000"), {}, std::span(&stuck, 1)).outputs;
  EXPECT_EQ(out, BitVector::from_string("01"));
}

TEST(OutputCone, FullAdderSumConeHoldsBothXors) {
  Netlist fa = circuits::full_adder();
  Netlist cone = output_cone(fa, 0);
  EXPECT_EQ(cone.gates().size(), 2u);
  EXPECT_EQ(count_kind(cone, GateKind::Xor), 2u);
  Netlist id = parse_netlist(".inputs a\n.outputs y\ny = BUF(a)\n");
  EXPECT_EQ(output_cone(id, 0).gates().size(), 1u);
}

TEST(OutputCone, DisjointHalves) {
  Netlist n = parse_netlist(".inputs a b\n.outputs y z\ny = BUF(a)\nz = BUF(b)\n");
  auto g0 = fanin_gates(n, n.outputs()[0]);
  auto g1 = fanin_gates(n, n.outputs()[1]);
  ASSERT_EQ(g0.size(), 1u);
  ASSERT_EQ(g1.size(), 1u);
  EXPECT_NE(g0[0], g1[0]);
  EXPECT_EQ(output_cone(n, 0).gates().size(), 1u);
}

TEST(OutputCone, IndexOutOfRange) {
  try {
    output_cone(circuits::full_adder(), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::index_out_of_range);
  }
}

TEST(OutputCone, SoundOnRandomNetlists) {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    Netlist n = circuits::random_netlist(6, 5, 35, seed);
    for (std::size_t o = 0; o < n.outputs().size(); ++o) {
      Netlist cone = output_cone(n, o);
      for (const auto& x : all_vectors(6)) {
        ASSERT_EQ(evaluate(cone, x).outputs[0], evaluate(n, x).outputs[o]);
      }
    }
  }
}

TEST(Simplify, PreservesFunctionAndFoldsConstants) {
  Netlist n = parse_netlist(R"(.inputs a b
.outputs y z w
one = CONST1()
zero = CONST0()
p = AND(a, one)
q = AND(a, b)
q2 = AND(b, a)
r = XOR(q, q2)
y = OR(p, r)
z = NAND(zero, b)
nb = NOT(b)
nnb = NOT(nb)
w = XOR(nnb, a, one)
)");
  Netlist s = simplify(n);
  EXPECT_TRUE(check_equivalence(n, s).equivalent);
  EXPECT_LT(s.gates().size(), n.gates().size());
  for (std::uint64_t seed = 50; seed < 60; ++seed) {
    Netlist r = circuits::random_netlist(8, 4, 60, seed);
    Netlist rs = simplify(r);
    EXPECT_TRUE(check_equivalence(r, rs).equivalent);
    EXPECT_LE(rs.gates().size(), r.gates().size());
  }
}

TEST(Equivalence, Reflexive) {
  Netlist fa = circuits::full_adder();
  auto v = check_equivalence(fa, fa);
  EXPECT_TRUE(v.equivalent);
  EXPECT_EQ(v.mode, EquivalenceMode::exhaustive);
  EXPECT_EQ(v.vectors_checked, 8u);
  EXPECT_FALSE(v.counterexample);
}

TEST(Equivalence, CounterexampleReplays) {
  Netlist a = circuits::random_netlist(10, 3, 50, 3);
  Netlist b = circuits::random_netlist(10, 3, 50, 4);
  auto v = check_equivalence(a, b);
  ASSERT_FALSE(v.equivalent);
  ASSERT_TRUE(v.counterexample);
  EXPECT_NE(evaluate(a, *v.counterexample).outputs, evaluate(b, *v.counterexample).outputs);
  EXPECT_TRUE(replay_differs(a, b, *v.counterexample, 1));
}

TEST(Equivalence, SampledModeAboveThreshold) {
  Netlist a = circuits::ripple_adder(10);  // 21 inputs
  auto v = check_equivalence(a, simplify(a));
  EXPECT_TRUE(v.equivalent);
  EXPECT_EQ(v.mode, EquivalenceMode::sampled);
  EXPECT_EQ(v.vectors_checked, 10000u);

  Netlist n = parse_netlist(R"(.inputs a0 a1 a2 a3 a4 a5 a6 a7 a8 a9 b0 b1 b2 b3 b4 b5 b6 b7 b8 b9 cin
.outputs s
s = XOR(a0, b9)
)");
  Netlist m = parse_netlist(R"(.inputs a0 a1 a2 a3 a4 a5 a6 a7 a8 a9 b0 b1 b2 b3 b4 b5 b6 b7 b8 b9 cin
.outputs s
s = XOR(a0, cin)
)");
  auto d = check_equivalence(n, m);
  ASSERT_FALSE(d.equivalent);
  EXPECT_EQ(d.mode, EquivalenceMode::sampled);
  EXPECT_TRUE(replay_differs(n, m, *d.counterexample, 1));
}

TEST(Equivalence, ArityMismatch) {
  try {
    check_equivalence(circuits::full_adder(), circuits::two_bit_alu());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::arity_mismatch);
  }
}

TEST(Equivalence, SequentialUnrolling) {
  // Toggle flip-flop vs. a version whose output lags by one extra cycle.
  Netlist t = parse_netlist(".inputs en\n.outputs q\nq = DFF(d)\nd = XOR(q, en)\n");
  Netlist same = parse_netlist(".inputs en\n.outputs y\nq = DFF(d)\nd = XOR(en, q)\ny = BUF(q)\n");
  Netlist lag = parse_netlist(".inputs en\n.outputs y\nq = DFF(d)\nd = XOR(q, en)\ny = DFF(q)\n");
  auto v = check_equivalence(t, same);
  EXPECT_TRUE(v.equivalent);
  EXPECT_EQ(v.cycles, 4u);
  EXPECT_EQ(v.vectors_checked, 16u);
  auto d = check_equivalence(t, lag);
  ASSERT_FALSE(d.equivalent);
  EXPECT_EQ(d.counterexample->width(), 4u);
  EXPECT_TRUE(replay_differs(t, lag, *d.counterexample, 4));
}
