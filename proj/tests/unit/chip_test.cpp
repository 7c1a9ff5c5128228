#include <gtest/gtest.h>

#include <deque>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "tpad/chip.hpp"
#include "tpad/circuits.hpp"
#include "tpad/equivalence.hpp"
#include "tpad/error.hpp"
#include "tpad/random.hpp"

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

ParityCheckMatrix identity_code(std::size_t r) {
  std::vector<std::uint64_t> cols;
  for (std::size_t i = 0; i < r; ++i) cols.push_back(std::uint64_t{1} << i);
  return ParityCheckMatrix(r, r, cols);
}

// check(FA) = A over 8 input bits with r = 4.
ParityCheckMatrix input_fixture() { return ParityCheckMatrix(8, 4, {0x1, 0xB, 0x2, 0x4, 0x4, 0x8, 0x8, 0x1}); }

// 8 address bits over 16 data bits, r = 3: check(BE || 124) = 6 and
// check(BF || 124) = 2.
ParityCheckMatrix ram_fixture() {
  return ParityCheckMatrix(24, 3, {1, 2, 3, 4, 5, 5, 7, 1, 2, 3, 4, 5, 6, 7, 1, 2, 4, 4, 5, 6, 7, 1, 2, 3});
}

// Drives a chip with its upstream sender and downstream receiver in lockstep.
struct ClosedLoop {
  const ProtectedChip& chip;
  SessionKeys keys;
  ChipRuntime rt;
  Monitor monitor;
  OutputEncoderState sender;
  InputDecoderState receiver;
  Rng rng;

  ClosedLoop(const ProtectedChip& c, std::uint64_t seed)
      : chip(c),
        keys(draw_session_keys(c, seed)),
        rt(c, keys),
        monitor(c.lfsr),
        sender{c.in_groups[0].h, keys.input_prev[0]},
        receiver{c.out_groups[0].h, keys.output_prev[0]},
        rng(seed ^ 0x5eed) {}

  CycleInput next_input() {
    CycleInput in;
    in.inputs = BitVector(chip.f.inputs().size());
    for (std::size_t i = 0; i < in.inputs.width(); ++i) in.inputs.set(i, rng.coin());
    in.recv_checks = {encode_outputs(sender, in.inputs)};
    if (chip.has_ram()) {
      auto op = static_cast<RamOp>(rng.below(3));
      in.ram = RamRequest{op, rng.below(std::uint64_t{1} << chip.ram_addr_bits),
                          rng.below(std::uint64_t{1} << chip.ram_word_bits)};
    }
    return in;
  }
};

struct LoopStats {
  std::uint64_t monitor_reports = 0;
  std::uint64_t receiver_attacks = 0;
  std::uint64_t error_ne_taps = 0;
};

LoopStats run_clean(const ProtectedChip& chip, std::uint64_t cycles, std::uint64_t seed) {
  ClosedLoop loop(chip, seed);
  LoopStats s;
  for (std::uint64_t c = 0; c < cycles; ++c) {
    auto rep = chip_cycle(loop.rt, loop.monitor, loop.next_input());
    s.monitor_reports += rep.monitor_attack;
    s.error_ne_taps += rep.result.error != rep.result.taps;
    s.receiver_attacks += decode_inputs(loop.receiver, rep.result.outputs, rep.result.out_checks[0]).attack;
  }
  return s;
}

ProtectedChip adder_chip(bool pipeline, std::size_t ram_bits = 0, std::size_t r = 1) {
  ChipOptions o;
  o.t = 2;
  o.pipeline = pipeline;
  o.ram_addr_bits = ram_bits;
  return build_protected_chip(circuits::full_adder(), default_lfsr_spec(r, 0xACE1), 11, o);
}

TEST(Encoding, OutputCheckBitsChainWithPrevious) {
  OutputEncoderState st{identity_code(6), BitVector::from_uint(0x15, 6)};
  BitVector check = encode_outputs(st, BitVector::from_uint(0x35, 6));
  EXPECT_EQ(check.to_uint(), 0x20U);
  EXPECT_EQ(st.prev_check.to_uint(), 0x20U);
}

TEST(Encoding, ZeroOutputsWithZeroPreviousGiveZero) {
  OutputEncoderState st{sample_parity_code(9, 4, 3), BitVector(4)};
  EXPECT_EQ(encode_outputs(st, BitVector(9)).to_uint(), 0U);
}

TEST(Encoding, ConsecutiveCheckBitsDifferByTheCodeCheck) {
  ParityCheckMatrix h = sample_parity_code(20, 5, 17);
  OutputEncoderState st{h, tpad::testing::random_bits(5, 1)};
  BitVector prev = st.prev_check;
  for (std::uint64_t t = 0; t < 500; ++t) {
    BitVector out = tpad::testing::random_bits(20, 100 + t);
    BitVector check = encode_outputs(st, out);
    ASSERT_EQ(check ^ prev, compute_check_bits(h, out));
    prev = check;
  }
}

TEST(Encoding, DecoderAcceptsMatchingParity) {
  ParityCheckMatrix h = input_fixture();
  ASSERT_EQ(compute_check_mask(h, 0xFA), 0xAU);
  InputDecoderState st{h, BitVector::from_uint(0xB, 4)};
  DecodeVerdict v = decode_inputs(st, BitVector::from_uint(0xFA, 8), BitVector::from_uint(0x1, 4));
  EXPECT_FALSE(v.attack);
  EXPECT_EQ(v.expected.to_uint(), 0xAU);
  EXPECT_EQ(v.actual.to_uint(), 0xAU);
  EXPECT_EQ(st.prev_check.to_uint(), 0x1U);
}

TEST(Encoding, DecoderFlagsEveryFlippedInputBit) {
  ParityCheckMatrix h = input_fixture();
  for (std::size_t bit = 0; bit < 8; ++bit) {
    InputDecoderState st{h, BitVector::from_uint(0xB, 4)};
    BitVector in = BitVector::from_uint(0xFA, 8);
    in.flip(bit);
    EXPECT_TRUE(decode_inputs(st, in, BitVector::from_uint(0x1, 4)).attack) << bit;
  }
}

TEST(Encoding, LockstepSenderReceiverNeverReports) {
  ParityCheckMatrix h = sample_parity_code(32, 4, 5);
  BitVector key = tpad::testing::random_bits(4, 9);
  OutputEncoderState tx{h, key};
  InputDecoderState rx{h, key};
  Rng rng(3);
  int attacks = 0;
  for (int t = 0; t < 10000; ++t) {
    BitVector data(32);
    for (std::size_t i = 0; i < 32; ++i) data.set(i, rng.coin());
    attacks += decode_inputs(rx, data, encode_outputs(tx, data)).attack;
  }
  EXPECT_EQ(attacks, 0);
}

// A stale (data, check) pair replayed at cycle t passes only if the check
// bits sent at t-1 and t-j-1 coincide.
TEST(Encoding, StaleReplayDetectedUnlessChainMatches) {
  ParityCheckMatrix h = sample_parity_code(24, 6, 8);
  BitVector key = tpad::testing::random_bits(6, 4);
  OutputEncoderState tx{h, key};
  std::vector<BitVector> data, checks;
  checks.push_back(key);
  for (int t = 0; t < 400; ++t) {
    data.push_back(tpad::testing::random_bits(24, 1000 + t));
    checks.push_back(encode_outputs(tx, data.back()));
  }
  int detected = 0, trials = 0;
  for (std::size_t t = 10; t < 400; t += 3) {
    for (std::size_t j : {1, 2, 5}) {
      // Replay just before t: receiver state holds checks[t] (sent at t-1).
      InputDecoderState rx{h, checks[t]};
      bool attack = decode_inputs(rx, data[t - j], checks[t - j + 1]).attack;
      EXPECT_EQ(attack, checks[t] != checks[t - j]) << t << " " << j;
      detected += attack;
      ++trials;
    }
  }
  EXPECT_GT(detected, trials * 9 / 10);
}

TEST(Encoding, WidthMismatchRejected) {
  OutputEncoderState tx{sample_parity_code(5, 3, 1), BitVector(3)};
  EXPECT_EQ(error_code([&] { encode_outputs(tx, BitVector(4)); }), Errc::width_mismatch);
  InputDecoderState rx{sample_parity_code(5, 3, 1), BitVector(3)};
  EXPECT_EQ(error_code([&] { decode_inputs(rx, BitVector(5), BitVector(2)); }), Errc::width_mismatch);
}

TEST(Ram, AddressIsPartOfTheCheck) {
  ProtectedRam ram(ram_fixture(), 8, 16);
  EXPECT_EQ(ram.check_of(0xBE, 0x124), 0x6U);
  EXPECT_EQ(ram.check_of(0xBF, 0x124), 0x2U);
  RamResult w = ram.cycle(RamOp::write, 0xBE, 0x124);
  EXPECT_EQ(w.symptom, RamSymptom::none);
  EXPECT_EQ(ram.cell(0xBE).check, 0x6U);
  EXPECT_EQ(w.ram_out, w.ram_in);
  RamResult r = ram.cycle(RamOp::read, 0xBE, 0);
  EXPECT_EQ(r.symptom, RamSymptom::none);
  EXPECT_EQ(r.data_out, 0x124U);
}

TEST(Ram, RedirectedReadFlagsCheckBits) {
  ProtectedRam ram(ram_fixture(), 8, 16);
  ram.cycle(RamOp::write, 0xBE, 0x124);
  RamResult r = ram.cycle(RamOp::read, 0xBF, 0, RamFault{RamTrojan::wrong_address_read, 1, 1});
  EXPECT_EQ(r.ram_out.data, 0x124U);
  EXPECT_EQ(r.ram_out.check, 0x6U);
  EXPECT_EQ(r.symptom, RamSymptom::check_bits_incorrect);
  EXPECT_EQ(r.syndrome, 0x2U ^ 0x6U);
}

TEST(Ram, WriteTurnedIntoReadFlagsInOutMismatch) {
  ProtectedRam ram(ram_fixture(), 8, 16);
  ram.cycle(RamOp::write, 0x10, 0x55);
  RamResult r = ram.cycle(RamOp::write, 0x10, 0x66, RamFault{RamTrojan::read_instead_of_write});
  EXPECT_EQ(r.symptom, RamSymptom::ram_in_ne_ram_out);
}

TEST(Ram, TableRowsProduceTheirSymptom) {
  const std::vector<std::pair<RamTrojan, RamSymptom>> table{
      {RamTrojan::wrong_address_read, RamSymptom::check_bits_incorrect},
      {RamTrojan::wrong_data_read, RamSymptom::check_bits_incorrect},
      {RamTrojan::write_instead_of_read, RamSymptom::ram_out_ne_data_out},
      {RamTrojan::no_read, RamSymptom::check_bits_incorrect},
      {RamTrojan::wrong_write_address, RamSymptom::check_bits_incorrect},
      {RamTrojan::wrong_data_written, RamSymptom::check_bits_incorrect},
      {RamTrojan::read_instead_of_write, RamSymptom::ram_in_ne_ram_out},
      {RamTrojan::no_write, RamSymptom::ram_in_ne_ram_out},
      {RamTrojan::read_instead_of_idle, RamSymptom::ram_out_eq_data_out},
      {RamTrojan::write_instead_of_idle, RamSymptom::ram_in_eq_ram_out},
  };
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (const auto& [trojan, symptom] : table) {
      ProtectedRam ram(sample_parity_code(4 + 16, 3, seed), 4, 16);
      EXPECT_EQ(tpad::testing::run_ram_trojan(ram, trojan), symptom) << to_string(trojan) << " seed " << seed;
    }
  }
}

TEST(Ram, HonestTrafficNeverFlags) {
  ProtectedRam ram(sample_parity_code(5 + 16, 4, 2), 5, 16);
  Rng rng(7);
  int flagged = 0;
  for (int i = 0; i < 20000; ++i) {
    auto op = static_cast<RamOp>(rng.below(3));
    flagged += ram.cycle(op, rng.below(32), rng.below(1 << 16)).symptom != RamSymptom::none;
  }
  EXPECT_EQ(flagged, 0);
  for (std::uint64_t a = 0; a < 32; ++a) EXPECT_EQ(ram.cell(a).check, ram.check_of(a, ram.cell(a).data));
}

TEST(Ram, TrojanOnlyActsOnItsOperation) {
  ProtectedRam ram(sample_parity_code(20, 3, 4), 4, 16);
  RamFault fault{RamTrojan::no_write};
  EXPECT_EQ(ram.cycle(RamOp::read, 1, 0, fault).symptom, RamSymptom::none);
  EXPECT_EQ(ram.cycle(RamOp::idle, 1, 0, fault).symptom, RamSymptom::none);
}

TEST(Ram, BadGeometryRejected) {
  EXPECT_EQ(error_code([] { ProtectedRam(sample_parity_code(10, 3, 1), 4, 16); }), Errc::width_mismatch);
  ProtectedRam ram(sample_parity_code(20, 3, 1), 4, 16);
  EXPECT_EQ(error_code([&] { ram.cycle(RamOp::read, 16, 0); }), Errc::index_out_of_range);
}

TEST(Chip, DefaultLfsrPolynomialsArePrimitive) {
  EXPECT_TRUE(is_primitive(default_lfsr_spec(3).poly, 16));
  EXPECT_TRUE(is_primitive(default_lfsr_spec(20).poly, 24));
  EXPECT_EQ(error_code([] { default_lfsr_spec(25); }), Errc::invalid_argument);
}

TEST(Chip, CheckingNetlistMeetsSwitchboxContract) {
  ProtectedChip chip = adder_chip(false);
  const ObfuscatedNetlist& obf = chip.check;
  EXPECT_FALSE(obf.switchboxes.empty());
  for (std::size_t o = 0; o < obf.netlist.outputs().size(); ++o) EXPECT_GE(count_cone_switchboxes(obf, o), 2U);
  EXPECT_TRUE(individually_degenerate(obf).empty());
}

TEST(Chip, AdderClosedLoopIsSilent) {
  ProtectedChip chip = adder_chip(false);
  LoopStats s = run_clean(chip, 10000, 1);
  EXPECT_EQ(s.monitor_reports, 0U);
  EXPECT_EQ(s.error_ne_taps, 0U);
  EXPECT_EQ(s.receiver_attacks, 0U);
}

TEST(Chip, PipelinedAdderClosedLoopIsSilent) {
  ProtectedChip chip = adder_chip(true);
  LoopStats s = run_clean(chip, 10000, 2);
  EXPECT_EQ(s.monitor_reports, 0U);
  EXPECT_EQ(s.receiver_attacks, 0U);
}

TEST(Chip, RamChipClosedLoopIsSilent) {
  ProtectedChip chip = adder_chip(false, 3, 3);
  ASSERT_TRUE(chip.has_ram());
  LoopStats s = run_clean(chip, 5000, 3);
  EXPECT_EQ(s.monitor_reports, 0U);
  EXPECT_EQ(s.receiver_attacks, 0U);
}

TEST(Chip, RamTableRowsThroughObfuscatedCheckers) {
  ProtectedChip chip = adder_chip(false, 4, 3);
  SessionKeys keys = draw_session_keys(chip, 1);
  const std::vector<std::pair<RamTrojan, RamSymptom>> rows{
      {RamTrojan::wrong_address_read, RamSymptom::check_bits_incorrect},
      {RamTrojan::write_instead_of_read, RamSymptom::ram_out_ne_data_out},
      {RamTrojan::no_write, RamSymptom::ram_in_ne_ram_out},
      {RamTrojan::write_instead_of_idle, RamSymptom::ram_in_eq_ram_out},
  };
  for (const auto& [trojan, symptom] : rows) {
    ChipRuntime rt(chip, keys);
    ProtectedRam& ram = const_cast<ProtectedRam&>(*rt.ram());
    EXPECT_EQ(tpad::testing::run_ram_trojan(ram, trojan), symptom) << to_string(trojan);
  }
}

TEST(Chip, RamTrojanReachesMonitor) {
  ProtectedChip chip = adder_chip(false, 3, 3);
  ClosedLoop loop(chip, 4);
  bool seen = false;
  for (int c = 0; c < 50; ++c) {
    CycleInput in = loop.next_input();
    in.ram = RamRequest{RamOp::read, 5, 0};
    ChipTamper tamper;
    if (c == 20) tamper.ram = RamFault{RamTrojan::wrong_address_read, 1, 1};
    auto rep = chip_cycle(loop.rt, loop.monitor, in, tamper);
    EXPECT_EQ(rep.monitor_attack, c == 20) << c;
    seen |= rep.monitor_attack;
  }
  EXPECT_TRUE(seen);
}

TEST(Chip, SingleOutputFlipCaughtThatCycle) {
  ProtectedChip chip = adder_chip(false, 0, 3);
  for (std::size_t out = 0; out < chip.f.outputs().size(); ++out) {
    ClosedLoop loop(chip, 5 + out);
    for (int c = 0; c < 40; ++c) {
      ChipTamper tamper;
      if (c == 17) tamper.f_faults.push_back({chip.f.outputs()[out], FaultMode::flip});
      auto rep = chip_cycle(loop.rt, loop.monitor, loop.next_input(), tamper);
      EXPECT_EQ(rep.monitor_attack, c == 17) << "output " << out << " cycle " << c;
      // The receiver cannot tell: the encoder saw the faulty output too.
      EXPECT_FALSE(decode_inputs(loop.receiver, rep.result.outputs, rep.result.out_checks[0]).attack);
    }
  }
}

TEST(Chip, PipelinedFlipCaughtOneCycleLater) {
  ProtectedChip chip = adder_chip(true, 0, 3);
  ClosedLoop loop(chip, 6);
  for (int c = 0; c < 40; ++c) {
    ChipTamper tamper;
    if (c == 17) tamper.f_faults.push_back({chip.f.outputs()[0], FaultMode::flip});
    auto rep = chip_cycle(loop.rt, loop.monitor, loop.next_input(), tamper);
    EXPECT_EQ(rep.monitor_attack, c == 18) << c;
  }
}

TEST(Chip, TamperedCheckPinCaught) {
  ProtectedChip chip = adder_chip(false, 0, 2);
  ClosedLoop loop(chip, 7);
  for (int c = 0; c < 30; ++c) {
    CycleInput in = loop.next_input();
    if (c == 9) in.recv_checks[0].flip(1);
    auto rep = chip_cycle(loop.rt, loop.monitor, in);
    // The decoder's previous-check register also takes the tampered value,
    // so the following cycle mismatches as well.
    EXPECT_EQ(rep.monitor_attack, c == 9 || c == 10) << c;
  }
}

TEST(Chip, TamperedInputPinCaught) {
  ProtectedChip chip = adder_chip(false, 0, 3);
  int caught = 0;
  for (std::size_t bit = 0; bit < 3; ++bit) {
    ClosedLoop loop(chip, 8 + bit);
    for (int c = 0; c < 10; ++c) {
      CycleInput in = loop.next_input();
      if (c == 4) in.inputs.flip(bit);
      caught += chip_cycle(loop.rt, loop.monitor, in).monitor_attack;
    }
  }
  EXPECT_EQ(caught, 3);
}

TEST(Chip, WrongSwitchboxConfigBreaksTheLoop) {
  ProtectedChip chip = adder_chip(false, 0, 3);
  ASSERT_FALSE(chip.check.switchboxes.empty());
  SwitchboxConfig wrong = chip.check.intended;
  auto& first = wrong.begin()->second;
  first = first == SbState::parallel ? SbState::crossed : SbState::parallel;
  SessionKeys keys = draw_session_keys(chip, 3);
  ChipRuntime rt(chip, keys, wrong);
  Monitor mon(chip.lfsr);
  OutputEncoderState tx{chip.in_groups[0].h, keys.input_prev[0]};
  InputDecoderState rx{chip.out_groups[0].h, keys.output_prev[0]};
  Rng rng(1);
  int reports = 0;
  for (int c = 0; c < 256; ++c) {
    BitVector x(3);
    for (std::size_t i = 0; i < 3; ++i) x.set(i, rng.coin());
    auto rep = chip_cycle(rt, mon, CycleInput{x, {encode_outputs(tx, x)}, std::nullopt});
    reports += rep.monitor_attack || decode_inputs(rx, rep.result.outputs, rep.result.out_checks[0]).attack;
  }
  EXPECT_GT(reports, 0);
}

TEST(Chip, PortGroupsUseTheirOwnCodes) {
  ChipOptions o;
  o.t = 1;
  o.input_groups = {{0, 3, 4}, {1, 2}};
  o.output_groups = {{1}, {0, 2}};
  ParityCheckMatrix shared = sample_parity_code(2, 2, 77);
  o.input_codes = {std::nullopt, shared};
  ProtectedChip chip = build_protected_chip(circuits::ripple_adder(2), default_lfsr_spec(2, 3), 21, o);
  ASSERT_EQ(chip.in_groups.size(), 2U);
  EXPECT_EQ(chip.in_groups[1].h, shared);
  EXPECT_EQ(chip.out_groups[1].bits, (std::vector<std::size_t>{0, 2}));

  SessionKeys keys = draw_session_keys(chip, 5);
  ChipRuntime rt(chip, keys);
  Monitor mon(chip.lfsr);
  std::vector<OutputEncoderState> tx;
  for (std::size_t g = 0; g < 2; ++g) tx.push_back({chip.in_groups[g].h, keys.input_prev[g]});
  std::vector<InputDecoderState> rx;
  for (std::size_t g = 0; g < 2; ++g) rx.push_back({chip.out_groups[g].h, keys.output_prev[g]});
  Rng rng(2);
  int bad = 0;
  for (int c = 0; c < 2000; ++c) {
    CycleInput in;
    in.inputs = BitVector(5);
    for (std::size_t i = 0; i < 5; ++i) in.inputs.set(i, rng.coin());
    for (std::size_t g = 0; g < 2; ++g)
      in.recv_checks.push_back(encode_outputs(tx[g], select_bits(in.inputs, chip.in_groups[g].bits)));
    if (c == 1500) in.recv_checks[1].flip(0);
    auto rep = chip_cycle(rt, mon, in);
    for (std::size_t g = 0; g < 2; ++g)
      bad += decode_inputs(rx[g], select_bits(rep.result.outputs, chip.out_groups[g].bits), rep.result.out_checks[g])
                 .attack;
    EXPECT_EQ(rep.monitor_attack, c == 1500 || c == 1501) << c;
  }
  EXPECT_EQ(bad, 0);
}

TEST(Chip, BadGroupsRejected) {
  ChipOptions o;
  o.input_groups = {{0, 1}};
  EXPECT_EQ(error_code([&] { build_protected_chip(circuits::full_adder(), default_lfsr_spec(1), 1, o); }),
            Errc::invalid_argument);
  o.input_groups = {{0, 1}, {1, 2}};
  EXPECT_EQ(error_code([&] { build_protected_chip(circuits::full_adder(), default_lfsr_spec(1), 1, o); }),
            Errc::invalid_argument);
  o.input_groups = {};
  o.output_codes = {sample_parity_code(3, 1, 1)};
  EXPECT_EQ(error_code([&] { build_protected_chip(circuits::full_adder(), default_lfsr_spec(1), 1, o); }),
            Errc::width_mismatch);
}

TEST(Chip, UnsatisfiableInsertionSurfaces) {
  ChipOptions o;
  o.t = 500;
  o.max_iterations = 20;
  EXPECT_EQ(error_code([&] { build_protected_chip(circuits::full_adder(), default_lfsr_spec(1), 1, o); }),
            Errc::unsatisfiable);
}

TEST(Chip, SequentialFunctionRejected) {
  Netlist seq = parse_netlist(".inputs a\n.outputs q\nq = DFF(d)\nd = XOR(a, q)\n");
  EXPECT_EQ(error_code([&] { build_protected_chip(seq, default_lfsr_spec(1), 1); }), Errc::invalid_argument);
}

TEST(Chip, WidthMismatchOnStep) {
  ProtectedChip chip = adder_chip(false);
  ChipRuntime rt(chip, draw_session_keys(chip, 1));
  EXPECT_EQ(error_code([&] { rt.step(CycleInput{BitVector(2), {BitVector(1)}, std::nullopt}); }),
            Errc::width_mismatch);
}

TEST(Chip, BuildIsDeterministic) {
  ProtectedChip a = adder_chip(true), b = adder_chip(true);
  EXPECT_EQ(serialize_obfuscated(a.check), serialize_obfuscated(b.check));
  EXPECT_EQ(a.check.intended, b.check.intended);
  EXPECT_EQ(a.in_groups[0].h, b.in_groups[0].h);
}

TEST(Chip, BundleRoundTrip) {
  ProtectedChip chip = adder_chip(true, 3, 3);
  auto dir = std::filesystem::temp_directory_path() / "tpad_chip_bundle_test";
  std::filesystem::remove_all(dir);
  save_chip_bundle(chip, dir);
  ProtectedChip back = load_chip_bundle(dir);
  EXPECT_EQ(serialize_netlist(back.f), serialize_netlist(chip.f));
  EXPECT_EQ(serialize_obfuscated(back.check), serialize_obfuscated(chip.check));
  EXPECT_EQ(back.check.intended, chip.check.intended);
  EXPECT_EQ(serialize_obfuscated(*back.ram_check), serialize_obfuscated(*chip.ram_check));
  EXPECT_EQ(back.h_logic, chip.h_logic);
  ASSERT_EQ(back.out_groups.size(), chip.out_groups.size());
  EXPECT_EQ(back.out_groups[0].h, chip.out_groups[0].h);
  EXPECT_EQ(back.in_groups[0].bits, chip.in_groups[0].bits);
  EXPECT_EQ(back.h_mem, chip.h_mem);
  EXPECT_EQ(back.lfsr, chip.lfsr);
  EXPECT_EQ(back.pipeline, chip.pipeline);
  EXPECT_EQ(run_clean(back, 2000, 9).monitor_reports, 0U);

  {
    std::ofstream out(dir / "h_in0.mat", std::ios::app);
    out << "\n";
  }
  EXPECT_EQ(error_code([&] { load_chip_bundle(dir); }), Errc::io);
  std::filesystem::remove_all(dir);
  EXPECT_EQ(error_code([&] { load_chip_bundle(dir); }), Errc::io);
}

TEST(Chip, Sha256KnownDigest) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
