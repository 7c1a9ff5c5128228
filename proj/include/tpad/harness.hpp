#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tpad/attack.hpp"
#include "tpad/chip.hpp"

namespace tpad {

/// Directed link: output group `out_group` of chip `from` drives input group
/// `in_group` of chip `to`, one cycle later.
struct Channel {
  std::size_t from = 0;
  std::size_t out_group = 0;
  std::size_t to = 0;
  std::size_t in_group = 0;

  friend bool operator==(const Channel&, const Channel&) = default;
};

/// Input groups not driven by a channel are primary inputs fed by a trusted
/// source; output groups no channel reads are primary outputs checked by a
/// trusted receiver.
struct SystemTopology {
  std::vector<ProtectedChip> chips;
  std::vector<Channel> channels;
};

/// Errc::topology for unknown chips or groups, width or code mismatches on a
/// channel, or an input group driven twice.
void validate_topology(const SystemTopology& topo);

struct ChipDesign {
  Netlist f;
  ChipOptions options;
};

struct SystemDesign {
  std::vector<ChipDesign> chips;
  std::vector<Channel> channels;
  std::size_t r = 4;
};

/// Samples one code per output group of every chip (unless the design fixes
/// one), hands it to every receiver of that group and builds the chips. Each
/// output subset therefore has exactly one encoding no matter how many chips
/// read it. Feedback channels are allowed.
SystemTopology build_system(const SystemDesign& design, std::uint64_t seed);

/// Chain of chips, stage i reading all outputs of stage i-1.
SystemTopology build_pipeline(const std::vector<Netlist>& stages, std::size_t r, std::uint64_t seed,
                              const ChipOptions& options = {});

struct SystemAttack {
  std::size_t chip = 0;
  AttackDescriptor attack;
};

/// Full input word of a chip for one cycle; bits driven by channels are
/// overwritten afterwards.
using Stimulus = std::function<BitVector(std::size_t chip, std::uint64_t cycle, Rng& rng)>;

struct RunOptions {
  std::uint64_t cycles = 1000;
  std::uint64_t seed = 1;
  bool trace = false;
};

/// Reports of one checker: chip monitors are named "chip<i>", trusted
/// receivers of primary outputs "out<i>.<g>".
struct MonitorTimeline {
  std::string name;
  std::vector<std::uint64_t> reports;
};

struct AttackOutcome {
  std::size_t chip = 0;
  std::string attack;
  /// First cycle the attacked chip had any attack active, not before the
  /// trigger's own earliest cycle.
  std::optional<std::uint64_t> first_active;
  std::optional<std::uint64_t> first_detect;
  std::vector<std::string> detected_by;
};

struct TraceRow {
  std::uint64_t cycle = 0;
  std::size_t chip = 0;
  BitVector inputs;
  BitVector outputs;
  bool monitor_attack = false;
  bool attack_active = false;
};

struct RunReport {
  std::uint64_t cycles = 0;
  std::uint64_t seed = 0;
  std::vector<MonitorTimeline> monitors;
  std::vector<AttackOutcome> attacks;
  /// One trial per attack. The run counts as one clean trial, and any report
  /// before the first attack activity (or at all, without attacks) is a
  /// false positive.
  DetectionReport aggregate;
  std::string config_digest;
  std::vector<TraceRow> trace;

  std::uint64_t total_reports() const;
};

/// SHA-256 over the seed, channels and every chip's netlists, codes, LFSR,
/// switchbox configuration and options.
std::string config_digest(const SystemTopology& topo, std::uint64_t seed);

/// Lockstep simulation. Session keys come from the seed; each channel's
/// receiver starts from its sender's key and a reset word (zero data with
/// the key as check bits). The default stimulus is uniformly random.
RunReport run_system(const SystemTopology& topo, const std::vector<SystemAttack>& attacks, const RunOptions& options,
                     const Stimulus& stimulus = {});

/// `cycle,chip,inputs,outputs,attack_active,monitor_attack`; bit strings list
/// bit 0 first.
std::string trace_csv(const RunReport& report);

/// Human-readable summary of the report.
std::string format_report(const RunReport& report);

}  // namespace tpad
