#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "tpad/circuits.hpp"
#include "tpad/error.hpp"
#include "tpad/harness.hpp"
#include "tpad/sweep.hpp"

using namespace tpad;

namespace {

Errc error_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::io;
}

SystemTopology two_stage(std::uint64_t seed = 3) {
  return build_pipeline({circuits::ripple_adder(2), circuits::random_netlist(3, 2, 12, 8)}, 4, seed);
}

SystemAttack at(std::size_t chip, std::string_view text) { return {chip, parse_attack(text)}; }

bool has(const std::vector<std::string>& v, std::string_view s) { return std::find(v.begin(), v.end(), s) != v.end(); }

int syntax_line(std::string_view text) {
  try {
    parse_experiment(text);
  } catch (const SyntaxError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST(System, CleanPipelineNeverReports) {
  const auto topo = two_stage();
  RunOptions o;
  o.cycles = 20000;
  o.seed = 5;
  const auto rep = run_system(topo, {}, o);
  EXPECT_EQ(rep.total_reports(), 0U);
  EXPECT_EQ(rep.aggregate.false_positives, 0U);
  ASSERT_EQ(rep.monitors.size(), 3U);  // two chips and the trusted receiver of chip 1
  EXPECT_EQ(rep.monitors[2].name, "out1.0");
}

TEST(System, ChannelDeliversPreviousCycleOutputs) {
  const auto topo = two_stage();
  RunOptions o;
  o.cycles = 50;
  o.trace = true;
  const auto rep = run_system(topo, {}, o);
  std::vector<BitVector> out0, in1;
  for (const auto& t : rep.trace) (t.chip == 0 ? out0 : in1).push_back(t.chip == 0 ? t.outputs : t.inputs);
  EXPECT_EQ(in1[0], BitVector(3));
  for (std::size_t c = 1; c < 50; ++c) EXPECT_EQ(in1[c], out0[c - 1]) << c;
}

TEST(System, OutputPinAttackCaughtByDownstreamDecoderNextCycle) {
  const auto topo = two_stage();
  RunOptions o;
  o.cycles = 200;
  const auto rep = run_system(topo, {at(0, "pin flip pin=out:1 trigger=at_cycle:50")}, o);
  ASSERT_EQ(rep.attacks.size(), 1U);
  const auto& a = rep.attacks[0];
  ASSERT_TRUE(a.first_active && a.first_detect);
  EXPECT_EQ(*a.first_active, 50U);
  EXPECT_EQ(*a.first_detect, 51U);
  EXPECT_TRUE(has(a.detected_by, "chip1"));
  EXPECT_FALSE(has(a.detected_by, "chip0"));
  EXPECT_EQ(rep.aggregate.detected, 1U);
}

TEST(System, LogicAttackLocalizedToItsChip) {
  const auto topo = two_stage();
  RunOptions o;
  o.cycles = 300;
  for (std::size_t chip : {0U, 1U}) {
    const std::string wire = topo.chips[chip].f.wire_name(topo.chips[chip].f.outputs()[0]);
    const auto rep = run_system(topo, {at(chip, "logic flip gate=f:" + wire + " trigger=at_cycle:100")}, o);
    const auto& a = rep.attacks[0];
    ASSERT_TRUE(a.first_detect) << chip;
    EXPECT_EQ(*a.first_detect, 100U);
    EXPECT_EQ(a.detected_by, std::vector<std::string>{"chip" + std::to_string(chip)});
    EXPECT_EQ(rep.aggregate.false_positives, 0U);
  }
}

TEST(System, SharedSubsetsShareOneCode) {
  SystemDesign d;
  d.r = 5;
  ChipOptions split;
  split.output_groups = {{0, 1}, {2}};
  ChipOptions half;
  half.input_groups = {{0}, {1}};
  d.chips = {{circuits::ripple_adder(2), split},
             {circuits::random_netlist(2, 2, 8, 1), {}},
             {circuits::random_netlist(2, 3, 8, 2), {}},
             {circuits::random_netlist(2, 1, 4, 3), half}};
  d.channels = {{0, 0, 1, 0}, {0, 0, 2, 0}, {0, 1, 3, 0}};
  const auto topo = build_system(d, 17);
  EXPECT_EQ(topo.chips[1].in_groups[0].h, topo.chips[0].out_groups[0].h);
  EXPECT_EQ(topo.chips[2].in_groups[0].h, topo.chips[0].out_groups[0].h);
  EXPECT_EQ(topo.chips[3].in_groups[0].h, topo.chips[0].out_groups[1].h);
  EXPECT_NE(topo.chips[0].out_groups[0].h, topo.chips[1].out_groups[0].h);
  RunOptions o;
  o.cycles = 3000;
  const auto rep = run_system(topo, {}, o);
  EXPECT_EQ(rep.total_reports(), 0U);
  // Four chip monitors plus receivers for chip 1, 2 and 3's outputs.
  EXPECT_EQ(rep.monitors.size(), 7U);
}

TEST(System, FeedbackLoopRunsClean) {
  SystemDesign d;
  d.chips = {{circuits::random_netlist(3, 3, 10, 4), {}}, {circuits::random_netlist(3, 3, 10, 5), {}}};
  d.channels = {{0, 0, 1, 0}, {1, 0, 0, 0}};
  const auto topo = build_system(d, 2);
  RunOptions o;
  o.cycles = 3000;
  const auto rep = run_system(topo, {}, o);
  EXPECT_EQ(rep.total_reports(), 0U);
  EXPECT_EQ(rep.monitors.size(), 2U);
}

TEST(System, TopologyViolations) {
  auto topo = two_stage();
  auto bad = topo;
  bad.channels.push_back({0, 0, 1, 0});
  EXPECT_EQ(error_code([&] { validate_topology(bad); }), Errc::topology);
  bad = topo;
  bad.channels[0].to = 7;
  EXPECT_EQ(error_code([&] { validate_topology(bad); }), Errc::topology);
  bad = topo;
  bad.chips[1].in_groups[0].h = sample_parity_code(3, 4, 999);
  EXPECT_EQ(error_code([&] { run_system(bad, {}, {}); }), Errc::topology);
  EXPECT_EQ(error_code([] { build_pipeline({circuits::full_adder(), circuits::full_adder()}, 4, 1); }), Errc::topology);
  EXPECT_EQ(error_code([&] { run_system(topo, {at(5, "logic flip gate=f:s0")}, {}); }), Errc::topology);
}

TEST(System, ReproducibleRunsAndDigest) {
  const auto topo = two_stage();
  RunOptions o;
  o.cycles = 100;
  o.trace = true;
  const std::vector<SystemAttack> atk{at(1, "reliability stuck1 gate=f:" + topo.chips[1].f.wire_name(topo.chips[1].f.outputs()[0]) + " trigger=after_cycle:30")};
  const auto a = run_system(topo, atk, o), b = run_system(topo, atk, o);
  EXPECT_EQ(trace_csv(a), trace_csv(b));
  EXPECT_EQ(format_report(a), format_report(b));
  EXPECT_EQ(a.config_digest, config_digest(topo, 1));
  EXPECT_EQ(a.config_digest.size(), 64U);
  EXPECT_NE(config_digest(topo, 2), a.config_digest);
  EXPECT_NE(config_digest(two_stage(4), 1), a.config_digest);
  EXPECT_EQ(trace_csv(a).substr(0, 50), "cycle,chip,inputs,outputs,attack_active,monitor_at");
}

TEST(Sweep, ParseValuesAndComments) {
  const auto s = parse_experiment("# curve\nexperiment = parity\nsweep = r\nvalues = 3..8\nk = 100  # width\n");
  EXPECT_EQ(s.experiment, "parity");
  EXPECT_EQ(s.values, (std::vector<double>{3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(s.params.at("k"), "100");
  EXPECT_EQ(s.seed, 1U);
  EXPECT_EQ(parse_experiment("experiment=destructive\nsweep=t\nvalues=1000..5000:2000\nseed=9\nN=100\na=1").values,
            (std::vector<double>{1000, 3000, 5000}));
  EXPECT_EQ(parse_experiment("experiment=cp\nsweep=theta\nvalues=0.05, 0.1").values, (std::vector<double>{0.05, 0.1}));
}

TEST(Sweep, MalformedSpecs) {
  EXPECT_EQ(syntax_line("experiment = parity\nsweep r\n"), 2);
  EXPECT_EQ(syntax_line("experiment = parity\nexperiment = cp\n"), 2);
  EXPECT_EQ(syntax_line("experiment = parity\nsweep = r\nvalues = 3..x\n"), 3);
  EXPECT_EQ(syntax_line("experiment = parity\nsweep = r\nvalues = 3,,4\n"), 3);
  EXPECT_EQ(syntax_line("experiment = parity\nsweep = r\n"), 2);
  EXPECT_GT(syntax_line("experiment = nope\nsweep = r\nvalues = 1\n"), 0);
  EXPECT_GT(syntax_line("experiment = cp\nsweep = r\nvalues = 1\n"), 0);
  EXPECT_GT(syntax_line("experiment = cp\nsweep = x\nvalues = 1\nbogus = 2\n"), 0);
  EXPECT_GT(syntax_line("experiment = cp\nsweep = x\nvalues = 1\nx = 2\n"), 0);
}

TEST(Sweep, AnalyticRowsAndHeader) {
  const auto csv = run_sweep(parse_experiment("experiment=cp\nsweep=theta\nvalues=0.05,0.1\nx=64\n"));
  EXPECT_EQ(csv,
            "# tpad-sweep v1\n# experiment=cp sweep=theta seed=1 x=64\ntheta,value,ci_lo,ci_hi,trials,reference\n"
            "0.05,0.03752413921,0.03752413921,0.03752413921,0,\n"
            "0.1,0.001179018458,0.001179018458,0.001179018458,0,\n");
}

TEST(Sweep, DestructiveCrossesNearEightThousand) {
  const auto csv =
      run_sweep(parse_experiment("experiment=destructive\nsweep=t\nvalues=8796..8797\nN=100000\na=50\n"));
  EXPECT_NE(csv.find("\n8796,0.98999"), std::string::npos) << csv;
  EXPECT_NE(csv.find("\n8797,0.99000"), std::string::npos) << csv;
}

TEST(Sweep, ParityCurveAndReproducibility) {
  const auto spec = parse_experiment("experiment=parity\nsweep=r\nvalues=3..5\nw=50\ntrials=4000\nseed=3\n");
  const auto csv = run_sweep(spec);
  EXPECT_EQ(csv, run_sweep(spec));
  std::size_t rows = 0, pos = csv.find("reference\n");
  for (pos = csv.find('\n', pos); (pos = csv.find('\n', pos + 1)) != std::string::npos;) ++rows;
  EXPECT_EQ(rows, 3U);
  EXPECT_NE(csv.find("\n3,0.8"), std::string::npos) << csv;
  EXPECT_NE(csv.find(",0.875\n"), std::string::npos);
  EXPECT_NE(csv.find(",0.96875\n"), std::string::npos);
}

TEST(Sweep, ChipAndFftExperimentsRun) {
  const auto chip = run_sweep(parse_experiment("experiment=chip\nsweep=r\nvalues=4\ntrials=50\nattack=none\n"));
  EXPECT_NE(chip.find("\n4,0,0,0,50,\n"), std::string::npos) << chip;
  const auto f = run_sweep(
      parse_experiment("experiment=fft\nsweep=N\nvalues=16\ntrials=200\ncalibration=200\nattack=permutation\n"));
  EXPECT_NE(f.find("\n16,1,1,1,200,\n"), std::string::npos) << f;
}
