#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tpad/bitvector.hpp"
#include "tpad/lfsr.hpp"
#include "tpad/netlist.hpp"
#include "tpad/parity_code.hpp"
#include "tpad/ram.hpp"
#include "tpad/switchbox.hpp"

namespace tpad {

/// Sender side of a randomized-parity link: check bits are the code's check
/// XOR the previously sent check bits.
struct OutputEncoderState {
  ParityCheckMatrix h;
  BitVector prev_check;
};

/// Receiver side; uses the sender's code and the same initial prev_check.
struct InputDecoderState {
  ParityCheckMatrix h;
  BitVector prev_check;
};

BitVector encode_outputs(OutputEncoderState& state, const BitVector& outputs);

struct DecodeVerdict {
  bool attack = false;
  BitVector expected;
  BitVector actual;
};

DecodeVerdict decode_inputs(InputDecoderState& state, const BitVector& inputs, const BitVector& recv_check);

struct ChipOptions {
  /// Minimum switchboxes per output cone of each checking netlist; 0 skips
  /// obfuscation.
  std::size_t t = 1;
  /// Registers the prediction and the function output for one cycle before
  /// the checker compares them.
  bool pipeline = false;
  /// Protected RAM with 2^ram_addr_bits words; 0 means no RAM.
  std::size_t ram_addr_bits = 0;
  std::size_t ram_word_bits = 16;
  bool loose_match = false;
  std::size_t max_iterations = 1000;
  EquivalenceOptions equivalence;
  /// Partition of the input (output) bit indices into separately encoded
  /// channels. Empty means one group holding every bit.
  std::vector<std::vector<std::size_t>> input_groups;
  std::vector<std::vector<std::size_t>> output_groups;
  /// Per-group code to reuse instead of sampling one, e.g. the code of the
  /// sender feeding that input group. Missing or nullopt entries are sampled.
  std::vector<std::optional<ParityCheckMatrix>> input_codes;
  std::vector<std::optional<ParityCheckMatrix>> output_codes;
  /// Code for the logic checker instead of a sampled one.
  std::optional<ParityCheckMatrix> logic_code;
};

/// A separately encoded channel: the listed bits of the chip's input or
/// output word and their code.
struct PortGroup {
  std::vector<std::size_t> bits;
  ParityCheckMatrix h;
};

BitVector select_bits(const BitVector& word, const std::vector<std::size_t>& bits);

/// Generated chip. All checking logic for the function (prediction, checker,
/// output encoders, input decoders) lives in one switchbox-obfuscated netlist
/// `check` with named ports (g is the group index):
///   inputs  x* (received inputs), ox* (prediction inputs), y* (outputs to
///           encode), cy* (outputs to check), recv<g>_*, iprev<g>_*,
///           oprev<g>_*, tap*, and pred_d* when pipelined
///   outputs ocheck<g>_*, elog*, ein<g>_*, and pred* when pipelined
/// The RAM encoder and checker share `ram_check` with inputs a*, d*, q* and
/// outputs wcheck* (over a, d) and rcheck* (over a, q).
struct ProtectedChip {
  Netlist f;
  ParityCheckMatrix h_logic;
  std::vector<PortGroup> in_groups;
  std::vector<PortGroup> out_groups;
  std::optional<ParityCheckMatrix> h_mem;
  std::size_t ram_addr_bits = 0;
  std::size_t ram_word_bits = 16;
  LfsrSpec lfsr;
  bool pipeline = false;
  std::size_t t = 0;
  std::uint64_t seed = 0;
  ObfuscatedNetlist check;
  std::optional<ObfuscatedNetlist> ram_check;

  std::size_t r() const noexcept { return lfsr.r(); }
  bool has_ram() const noexcept { return ram_check.has_value(); }
};

/// Degree-16 (r <= 16) or degree-24 (r <= 24) primitive LFSR exposing bits
/// 0..r-1. Errc::invalid_argument for larger r.
LfsrSpec default_lfsr_spec(std::size_t r, std::uint64_t seed = 1);

/// f must be combinational. Samples the logic, output, input (and RAM) codes
/// with r = lfsr.r(), builds the predictor, and obfuscates the checking
/// netlists so every output cone holds at least options.t switchboxes.
/// Errc::unsatisfiable from insertion propagates.
ProtectedChip build_protected_chip(const Netlist& f, const LfsrSpec& lfsr, std::uint64_t seed,
                                   const ChipOptions& options = {});

/// Random initial prev_check values of one session, one per port group.
/// `input_prev[g]` is shared with whoever sends input group g to the chip,
/// `output_prev[g]` with the receivers of output group g.
struct SessionKeys {
  std::vector<BitVector> input_prev;
  std::vector<BitVector> output_prev;
};

SessionKeys draw_session_keys(const ProtectedChip& chip, std::uint64_t seed);

struct RamRequest {
  RamOp op = RamOp::idle;
  std::uint64_t addr = 0;
  std::uint64_t data = 0;
};

struct CycleInput {
  BitVector inputs;
  /// Check bits received with each input group.
  std::vector<BitVector> recv_checks;
  std::optional<RamRequest> ram;
};

/// In-chip tampering for one cycle.
struct ChipTamper {
  std::vector<WireFault> f_faults;
  std::vector<WireFault> check_faults;
  std::vector<WireFault> ram_check_faults;
  /// Replaces the function output before it reaches the pins and encoder.
  std::optional<BitVector> output_override;
  /// Values fed to the predictor and checker instead of the real ones.
  std::optional<BitVector> ced_inputs;
  std::optional<BitVector> ced_outputs;
  RamFault ram;
};

struct CycleResult {
  std::uint64_t cycle = 0;
  /// What f computed this cycle, before any output override.
  BitVector f_outputs;
  BitVector outputs;
  /// Check bits sent with each output group.
  std::vector<BitVector> out_checks;
  /// Combined, encoded error signal sent to the monitor.
  BitVector error;
  BitVector taps;
  BitVector logic_signal;
  std::vector<BitVector> input_signals;
  std::optional<BitVector> ram_signal;
  std::optional<RamResult> ram;
};

/// Cycle-stepped chip instance. Holds the switchbox configuration actually
/// programmed (the intended one by default) and all sequential state. The
/// chip must outlive the runtime.
class ChipRuntime {
 public:
  ChipRuntime(const ChipRuntime&) = delete;
  ChipRuntime& operator=(const ChipRuntime&) = delete;
  ChipRuntime(const ProtectedChip& chip, const SessionKeys& keys);
  ChipRuntime(const ProtectedChip& chip, const SessionKeys& keys, const SwitchboxConfig& check_config,
              const std::optional<SwitchboxConfig>& ram_config = std::nullopt);

  CycleResult step(const CycleInput& in, const ChipTamper& tamper = {});

  const ProtectedChip& chip() const noexcept { return *chip_; }
  const Netlist& applied_check() const noexcept { return check_; }
  const std::optional<Netlist>& applied_ram_check() const noexcept { return ram_check_; }
  std::uint64_t cycle() const noexcept { return cycle_; }
  const ProtectedRam* ram() const noexcept { return ram_ ? &*ram_ : nullptr; }

 private:
  struct Ports {
    std::vector<std::size_t> x, ox, y, cy, tap, pred_d, elog, pred;
    std::vector<std::vector<std::size_t>> recv, iprev, ein, oprev, ocheck;
  };
  struct RamPorts {
    std::vector<std::size_t> a, d, q, wcheck, rcheck;
  };

  std::uint64_t ram_check_eval(std::uint64_t addr, std::uint64_t data, bool read_side);

  const ProtectedChip* chip_;
  Netlist check_;
  std::optional<Netlist> ram_check_;
  Evaluator f_eval_;
  Evaluator check_eval_;
  std::optional<Evaluator> ram_eval_;
  Ports ports_;
  RamPorts ram_ports_;
  std::optional<ProtectedRam> ram_;
  Lfsr lfsr_;
  std::vector<BitVector> in_prev_;
  std::vector<BitVector> out_prev_;
  BitVector pred_reg_;
  BitVector y_reg_;
  std::vector<std::uint64_t> check_words_;
  std::vector<std::uint64_t> ram_words_;
  std::vector<WireFault> ram_faults_;
  std::uint64_t cycle_ = 0;
};

struct ChipCycleReport {
  CycleResult result;
  bool monitor_attack = false;
};

/// One cycle of chip plus its trusted monitor.
ChipCycleReport chip_cycle(ChipRuntime& chip, Monitor& monitor, const CycleInput& in, const ChipTamper& tamper = {});

/// Bundle directory: chip.txt, f.net, check.net, check.cfg, [ram.net,
/// ram.cfg], h_logic.mat, h_in<g>.mat, h_out<g>.mat, [h_mem.mat], lfsr.spec and
/// manifest.txt with SHA-256 digests of the others. Loading verifies the
/// manifest; a mismatch or missing file raises Errc::io.
void save_chip_bundle(const ProtectedChip& chip, const std::filesystem::path& dir);
ProtectedChip load_chip_bundle(const std::filesystem::path& dir);

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace tpad
