#include <gtest/gtest.h>

#include <algorithm>

#include "tpad/circuits.hpp"
#include "tpad/equivalence.hpp"
#include "tpad/error.hpp"
#include "tpad/switchbox.hpp"

using namespace tpad;

namespace {

GateId driver_of(const Netlist& n, std::string_view wire) { return *n.driver(*n.find_wire(wire)); }

// SB between g1 (into s) and c1 (into cout).
ObfuscatedNetlist fig10_adder() {
  Netlist fa = circuits::full_adder();
  return place_switchbox(make_obfuscated(fa), Sink{driver_of(fa, "s"), 0}, Sink{driver_of(fa, "cout"), 0});
}

// SB swapping the two operands of g1 = XOR(a, b).
ObfuscatedNetlist fig11_adder() {
  Netlist fa = circuits::full_adder();
  return place_switchbox(make_obfuscated(fa), Sink{driver_of(fa, "g1"), 0}, Sink{driver_of(fa, "g1"), 1});
}

SwitchboxConfig all(const ObfuscatedNetlist& obf, SbState s) {
  SwitchboxConfig cfg;
  for (const auto& sb : obf.switchboxes) cfg[sb.id] = s;
  return cfg;
}

Errc error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::io;
}

}  // namespace

TEST(ApplyConfig, Fig10ParallelIsAdderCrossedIsNot) {
  auto obf = fig10_adder();
  Netlist fa = circuits::full_adder();
  ASSERT_EQ(obf.switchboxes.size(), 1u);
  EXPECT_TRUE(check_equivalence(apply_config(obf, all(obf, SbState::parallel)), fa).equivalent);
  EXPECT_FALSE(check_equivalence(apply_config(obf, all(obf, SbState::crossed)), fa).equivalent);
}

TEST(ApplyConfig, ZeroSwitchboxesIsIdentity) {
  Netlist fa = circuits::full_adder();
  auto obf = make_obfuscated(fa);
  EXPECT_EQ(serialize_netlist(apply_config(obf, {})), serialize_netlist(fa));
  EXPECT_EQ(count_cone_switchboxes(obf, 0), 0u);
}

TEST(ApplyConfig, RejectsMissingOrExtraIds) {
  auto obf = fig10_adder();
  EXPECT_EQ(error_code([&] { apply_config(obf, {}); }), Errc::invalid_argument);
  EXPECT_EQ(error_code([&] { apply_config(obf, {{"sb9", SbState::parallel}}); }), Errc::invalid_argument);
  auto cfg = all(obf, SbState::parallel);
  cfg["extra"] = SbState::crossed;
  EXPECT_EQ(error_code([&] { apply_config(obf, cfg); }), Errc::invalid_argument);
}

TEST(ApplyConfig, CrossedIntentKeepsFunction) {
  Netlist fa = circuits::full_adder();
  auto obf = place_switchbox(make_obfuscated(fa), Sink{driver_of(fa, "s"), 0}, Sink{driver_of(fa, "cout"), 0},
                             SbState::crossed);
  EXPECT_EQ(obf.intended.begin()->second, SbState::crossed);
  EXPECT_TRUE(check_equivalence(apply_config(obf, obf.intended), fa).equivalent);
  EXPECT_FALSE(check_equivalence(apply_config(obf, all(obf, SbState::parallel)), fa).equivalent);
}

TEST(CountCone, SingleSwitchboxFeedingBothOutputs) {
  Netlist n = parse_netlist(".inputs a b\n.outputs y z\ny = NOT(a)\nz = NOT(b)\n");
  auto obf = place_switchbox(make_obfuscated(n), Sink{0, 0}, Sink{1, 0});
  EXPECT_EQ(count_cone_switchboxes(obf, 0), 1u);
  EXPECT_EQ(count_cone_switchboxes(obf, 1), 1u);
  EXPECT_EQ(error_code([&] { count_cone_switchboxes(obf, 2); }), Errc::index_out_of_range);
}

TEST(Degeneracy, Fig11IsDegenerate) {
  auto obf = fig11_adder();
  auto ids = individually_degenerate(obf);
  ASSERT_EQ(ids.size(), 1u);
  auto report = degeneracy_scan(obf, 100, 1);
  EXPECT_EQ(report.samples, 100u);
  EXPECT_DOUBLE_EQ(report.fraction(), 1.0);
  EXPECT_FALSE(report.hits.empty());
  EXPECT_TRUE(individually_degenerate(fig10_adder()).empty());
}

TEST(Degeneracy, NoSwitchboxesHasNoIncorrectConfigs) {
  auto obf = make_obfuscated(circuits::full_adder());
  EXPECT_EQ(error_code([&] { degeneracy_scan(obf, 10, 1); }), Errc::no_incorrect_configs);
}

TEST(Degeneracy, ScanFindsReinsertedDegenerateSwitchbox) {
  Netlist alu = circuits::two_bit_alu();
  auto obf = insert_switchboxes(alu, {.t = 2, .seed = 3});
  // Add a commutative-operand swap on some two-input AND/OR/XOR gate.
  auto it = std::find_if(obf.netlist.gates().begin(), obf.netlist.gates().end(), [&](const Gate& g) {
    return (g.kind == GateKind::Xor || g.kind == GateKind::And || g.kind == GateKind::Or) && g.inputs.size() == 2 &&
           g.inputs[0] != g.inputs[1];
  });
  ASSERT_NE(it, obf.netlist.gates().end());
  GateId g = static_cast<GateId>(it - obf.netlist.gates().begin());
  auto bad = place_switchbox(obf, Sink{g, 0}, Sink{g, 1});
  EXPECT_EQ(individually_degenerate(bad).size(), 1u);
  EXPECT_GT(degeneracy_scan(bad, 2000, 5).fraction(), 0.0);
}

TEST(InsertSwitchboxes, AluTwoPerCone) {
  Netlist alu = circuits::two_bit_alu();
  auto obf = insert_switchboxes(alu, {.t = 2, .seed = 1});
  ASSERT_EQ(obf.per_output_sb_count.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_GE(count_cone_switchboxes(obf, i), 2u);
  auto v = check_equivalence(apply_config(obf, obf.intended), alu);
  EXPECT_TRUE(v.equivalent);
  EXPECT_EQ(v.mode, EquivalenceMode::exhaustive);
  EXPECT_TRUE(individually_degenerate(obf).empty());
}

TEST(InsertSwitchboxes, DeterministicUnderSeed) {
  Netlist alu = circuits::two_bit_alu();
  auto a = insert_switchboxes(alu, {.t = 3, .seed = 9});
  auto b = insert_switchboxes(alu, {.t = 3, .seed = 9});
  EXPECT_EQ(serialize_obfuscated(a), serialize_obfuscated(b));
  EXPECT_EQ(a.intended, b.intended);
}

TEST(InsertSwitchboxes, ContractOnRandomCircuits) {
  for (bool strict : {true, false}) {
    int accepted = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
      Netlist n = circuits::random_netlist(4 + seed % 6, 3, 25 + 3 * seed, seed);
      ObfuscatedNetlist obf = make_obfuscated(n);
      try {
        obf = insert_switchboxes(n, {.t = 2, .seed = seed, .match_gate_fanins = strict});
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::unsatisfiable);
        continue;
      }
      ++accepted;
      EXPECT_TRUE(check_equivalence(apply_config(obf, obf.intended), n).equivalent) << seed;
      EXPECT_TRUE(individually_degenerate(obf).empty()) << seed;
      for (std::size_t c : obf.per_output_sb_count) EXPECT_GE(c, 2u) << seed;
    }
    EXPECT_GE(accepted, 8) << strict;
  }
}

TEST(InsertSwitchboxes, SomeIntentsAreCrossed) {
  auto obf = insert_switchboxes(circuits::random_netlist(8, 3, 40, 2), {.t = 4, .seed = 4});
  auto crossed = std::count_if(obf.intended.begin(), obf.intended.end(),
                               [](const auto& e) { return e.second == SbState::crossed; });
  EXPECT_GT(crossed, 0);
  EXPECT_LT(static_cast<std::size_t>(crossed), obf.intended.size());
}

TEST(InsertSwitchboxes, UnsatisfiableReportsBestCounts) {
  Netlist x = parse_netlist(".inputs a b\n.outputs y\ny = XOR(a, b)\n");
  try {
    insert_switchboxes(x, {.t = 1, .seed = 1, .max_iterations = 20});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unsatisfiable);
    EXPECT_NE(std::string(e.what()).find("[0]"), std::string::npos);
  }
  EXPECT_EQ(error_code([&] { insert_switchboxes(circuits::full_adder(), {.t = 500, .max_iterations = 30}); }),
            Errc::unsatisfiable);
}

TEST(TextFormat, ObfuscatedRoundTrip) {
  auto obf = insert_switchboxes(circuits::two_bit_alu(), {.t = 2, .seed = 6});
  std::string text = serialize_obfuscated(obf);
  EXPECT_NE(text.find("SB2("), std::string::npos);
  auto again = parse_obfuscated(text, write_config(obf.intended));
  EXPECT_EQ(serialize_obfuscated(again), text);
  EXPECT_EQ(again.intended, obf.intended);
  EXPECT_EQ(again.per_output_sb_count, obf.per_output_sb_count);
}

TEST(TextFormat, ConfigFile) {
  auto cfg = read_config("sb0 = parallel\n# note\nsb1 = crossed\n");
  EXPECT_EQ(cfg.size(), 2u);
  EXPECT_EQ(cfg["sb1"], SbState::crossed);
  EXPECT_EQ(write_config({{"sb10", SbState::parallel}, {"sb2", SbState::crossed}}), "sb2 = crossed\nsb10 = parallel\n");
  EXPECT_EQ(error_code([] { read_config("sb0 = sideways\n"); }), Errc::syntax);
  EXPECT_EQ(error_code([] { read_config("sb0 parallel\n"); }), Errc::syntax);
}
