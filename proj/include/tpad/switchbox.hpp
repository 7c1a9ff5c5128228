#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tpad/equivalence.hpp"
#include "tpad/netlist.hpp"

namespace tpad {

/// A two-input switchbox lives in the netlist as the buffer pair
/// z = BUF(x), w = BUF(y): that wiring is its parallel state. The crossed
/// state routes x to w and y to z.
using Switchbox = SwitchboxGates;

struct SwitchboxWires {
  WireId x, y, z, w;
};

SwitchboxWires switchbox_wires(const Netlist& n, const Switchbox& sb);

enum class SbState : std::uint8_t { parallel, crossed };

std::string_view to_string(SbState s);

/// SB id -> state. Must name every SB of the netlist it is applied to.
using SwitchboxConfig = std::map<std::string, SbState>;

/// Netlist with switchboxes. `netlist` is the all-parallel wiring;
/// applying `intended` yields the protected function.
struct ObfuscatedNetlist {
  Netlist netlist;
  std::vector<Switchbox> switchboxes;
  SwitchboxConfig intended;
  std::vector<std::size_t> per_output_sb_count;
};

/// Wraps a plain netlist with zero switchboxes.
ObfuscatedNetlist make_obfuscated(Netlist n);

/// Rebuilds the derived per-output counts; validates that the config covers
/// exactly the listed switchboxes and that every id names a buffer pair.
ObfuscatedNetlist make_obfuscated(Netlist n, std::vector<Switchbox> switchboxes, SwitchboxConfig intended);

/// Plain netlist with every SB resolved to straight or crossed wiring.
/// Missing or unknown SB ids raise Errc::invalid_argument.
Netlist apply_config(const ObfuscatedNetlist& obf, const SwitchboxConfig& cfg);

/// Number of SBs with at least one buffer in the fan-in of the output.
std::size_t count_cone_switchboxes(const ObfuscatedNetlist& obf, std::size_t output_index);

struct InsertOptions {
  std::size_t t = 1;
  std::uint64_t seed = 1;
  std::size_t max_iterations = 1000;
  /// Partner neighbourhoods must also have the same multiset of gate fan-in
  /// counts. When off, only the incoming-edge and output counts must agree.
  bool match_gate_fanins = true;
  EquivalenceOptions equivalence;
};

/// Random switchbox insertion. Repeats neighbourhood pairing, placement,
/// single-SB degeneracy testing and random intent assignment until every
/// output cone holds at least t switchboxes. Throws Errc::unsatisfiable after
/// max_iterations; the message carries the best per-output counts reached.
ObfuscatedNetlist insert_switchboxes(const Netlist& n, const InsertOptions& opts);

/// Places one SB on two gate input pins without any degeneracy test: the
/// first pin reads z, the second w. With intent crossed the inputs are
/// swapped so that the crossed state keeps the current function.
ObfuscatedNetlist place_switchbox(const ObfuscatedNetlist& obf, Sink first, Sink second,
                                  SbState intent = SbState::parallel);

/// Ids of SBs for which flipping only that SB (others intended) leaves the
/// function unchanged.
std::vector<std::string> individually_degenerate(const ObfuscatedNetlist& obf, const EquivalenceOptions& opts = {});

struct DegeneracyReport {
  std::uint64_t samples = 0;
  std::uint64_t equivalent = 0;
  double fraction() const { return samples ? static_cast<double>(equivalent) / static_cast<double>(samples) : 0.0; }
  /// Up to the first 16 configs found equivalent to the intended one.
  std::vector<SwitchboxConfig> hits;
};

/// Samples uniform configurations different from the intended one and counts
/// those functionally equivalent to it. Errc::no_incorrect_configs when the
/// netlist has no switchbox.
DegeneracyReport degeneracy_scan(const ObfuscatedNetlist& obf, std::uint64_t samples, std::uint64_t seed,
                                 const EquivalenceOptions& opts = {});

/// Config file: one `sb<id> = parallel|crossed` line per switchbox.
std::string write_config(const SwitchboxConfig& cfg);
SwitchboxConfig read_config(std::string_view text);

std::string serialize_obfuscated(const ObfuscatedNetlist& obf);
ObfuscatedNetlist parse_obfuscated(std::string_view netlist_text, std::string_view config_text);

}  // namespace tpad
