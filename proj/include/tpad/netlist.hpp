#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tpad/bitvector.hpp"

namespace tpad {

using WireId = std::uint32_t;
using GateId = std::uint32_t;

enum class GateKind : std::uint8_t { And, Or, Not, Xor, Nand, Nor, Buf, Const0, Const1, Dff };

std::string_view to_string(GateKind kind);
std::optional<GateKind> gate_kind_from_string(std::string_view name);

/// Every gate drives exactly one wire.
struct Gate {
  GateKind kind = GateKind::Buf;
  std::vector<WireId> inputs;
  WireId output = 0;

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Where a wire is read: input slot `pin` of gate `gate`.
struct Sink {
  GateId gate;
  std::uint32_t pin;

  friend bool operator==(const Sink&, const Sink&) = default;
};

/// Gate-level netlist. Wires are dense integers; names are metadata used by
/// the text format. The combinational part (DFF outputs act as cut points)
/// is acyclic, every wire has exactly one driver (a primary input or a gate),
/// and gate arity matches the gate kind. Immutable once constructed.
class Netlist {
 public:
  /// Validates every invariant; throws tpad::Error with a distinct code for
  /// each violation. Empty wire names are replaced by generated ones.
  Netlist(std::string name, std::vector<std::string> wire_names, std::vector<WireId> inputs,
          std::vector<Gate> gates, std::vector<WireId> outputs);

  const std::string& name() const noexcept { return name_; }
  std::size_t wire_count() const noexcept { return wire_names_.size(); }
  const std::string& wire_name(WireId w) const { return wire_names_.at(w); }
  const std::vector<std::string>& wire_names() const noexcept { return wire_names_; }
  std::optional<WireId> find_wire(std::string_view name) const;

  const std::vector<WireId>& inputs() const noexcept { return inputs_; }
  const std::vector<WireId>& outputs() const noexcept { return outputs_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  const Gate& gate(GateId g) const { return gates_.at(g); }

  /// Driving gate, or nullopt for a primary input.
  std::optional<GateId> driver(WireId w) const;
  const std::vector<Sink>& sinks(WireId w) const { return sinks_.at(w); }

  /// DFF gates in gate-index order; this order defines the state vector.
  const std::vector<GateId>& dffs() const noexcept { return dffs_; }
  /// Non-DFF gates in a valid evaluation order.
  const std::vector<GateId>& topo_order() const noexcept { return topo_; }
  bool is_combinational() const noexcept { return dffs_.empty(); }

 private:
  std::string name_;
  std::vector<std::string> wire_names_;
  std::vector<WireId> inputs_;
  std::vector<Gate> gates_;
  std::vector<WireId> outputs_;
  std::vector<std::int64_t> driver_;  // gate index, or -1 for a primary input
  std::vector<std::vector<Sink>> sinks_;
  std::vector<GateId> dffs_;
  std::vector<GateId> topo_;
  std::unordered_map<std::string, WireId> by_name_;
};

/// Incremental construction by wire name, in the order the text format uses.
class NetlistBuilder {
 public:
  explicit NetlistBuilder(std::string name = "top") : name_(std::move(name)) {}

  WireId wire(std::string_view name);
  WireId add_input(std::string_view name);
  /// Adds a gate driving `output`. A second driver for the same wire is kept
  /// and reported as Errc::multiple_drivers by build().
  GateId add_gate(GateKind kind, std::string_view output, const std::vector<std::string>& inputs);
  void add_output(std::string_view name);
  void set_name(std::string name) { name_ = std::move(name); }

  Netlist build() const;

 private:
  std::string name_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, WireId> ids_;
  std::vector<WireId> inputs_;
  std::vector<Gate> gates_;
  std::vector<WireId> outputs_;
};

enum class FaultMode : std::uint8_t { flip, stuck0, stuck1 };

/// Value override applied to a wire as soon as it is computed, so every
/// reader sees the faulty value. `lanes` selects which of the 64 packed
/// vectors are affected.
struct WireFault {
  WireId wire;
  FaultMode mode;
  std::uint64_t lanes = ~std::uint64_t{0};
};

struct EvalResult {
  BitVector outputs;
  BitVector next_state;
};

/// Reusable 64-lane bit-parallel simulator for one netlist. Each call
/// evaluates up to 64 independent vectors (one per bit position of a word).
class Evaluator {
 public:
  explicit Evaluator(const Netlist& netlist);

  /// inputs: one word per primary input; state: one word per DFF.
  void run(std::span<const std::uint64_t> inputs, std::span<const std::uint64_t> state,
           std::span<const WireFault> faults = {});

  std::uint64_t value(WireId w) const { return values_[w]; }
  std::uint64_t output(std::size_t i) const { return values_[netlist_->outputs()[i]]; }
  /// Word for the D input of the i-th DFF (its next state).
  std::uint64_t next_state(std::size_t i) const;

  /// Single-vector convenience over lane 0.
  EvalResult evaluate(const BitVector& inputs, const BitVector& state, std::span<const WireFault> faults = {});

  const Netlist& netlist() const noexcept { return *netlist_; }

 private:
  const Netlist* netlist_;
  std::vector<std::uint64_t> values_;
  std::vector<std::uint64_t> in_words_;
  std::vector<std::uint64_t> state_words_;
  std::vector<std::int32_t> fault_index_;
};

/// Pure single-cycle evaluation. inputs.width must equal the number of
/// primary inputs and state.width the number of DFFs.
EvalResult evaluate(const Netlist& n, const BitVector& inputs, const BitVector& state = {},
                    std::span<const WireFault> faults = {});

/// Gates in the transitive fan-in of a wire (through DFFs), in gate order.
std::vector<GateId> fanin_gates(const Netlist& n, WireId w);

/// Sub-netlist holding exactly the transitive fan-in of one output. It keeps
/// every primary input of `n` in the same order, so the same input vector
/// can be applied to both.
Netlist output_cone(const Netlist& n, std::size_t output_index);

/// Constant folding, buffer removal, structural hashing of identical gates and
/// dead-gate removal. Primary inputs and the output order are preserved.
Netlist simplify(const Netlist& n);

/// Parsed SB2 pseudo-gate: an SB named `id` realized as the buffer pair
/// z = BUF(x), w = BUF(y) in the parsed netlist.
struct SwitchboxGates {
  std::string id;
  GateId first;
  GateId second;
};

struct ParsedNetlist {
  Netlist netlist;
  std::vector<SwitchboxGates> switchboxes;
};

Netlist parse_netlist(std::string_view text);
/// Same grammar plus `id = SB2(x, y -> z, w)` lines.
ParsedNetlist parse_netlist_with_switchboxes(std::string_view text);

/// Canonical text form. Buffer pairs listed in `switchboxes` are printed as a
/// single SB2 line at the position of the first buffer.
std::string serialize_netlist(const Netlist& n, std::span<const SwitchboxGates> switchboxes = {});

}  // namespace tpad
