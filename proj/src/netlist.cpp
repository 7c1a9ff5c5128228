#include "tpad/netlist.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "tpad/error.hpp"

namespace tpad {

namespace {

constexpr std::array<std::pair<GateKind, std::string_view>, 10> kKindNames{{
    {GateKind::And, "AND"},
    {GateKind::Or, "OR"},
    {GateKind::Not, "NOT"},
    {GateKind::Xor, "XOR"},
    {GateKind::Nand, "NAND"},
    {GateKind::Nor, "NOR"},
    {GateKind::Buf, "BUF"},
    {GateKind::Const0, "CONST0"},
    {GateKind::Const1, "CONST1"},
    {GateKind::Dff, "DFF"},
}};

bool arity_ok(GateKind kind, std::size_t n) {
  switch (kind) {
    case GateKind::Not:
    case GateKind::Buf:
    case GateKind::Dff:
      return n == 1;
    case GateKind::Const0:
    case GateKind::Const1:
      return n == 0;
    default:
      return n >= 2;
  }
}

std::uint64_t eval_gate(GateKind kind, const std::vector<WireId>& ins, const std::vector<std::uint64_t>& v) {
  switch (kind) {
    case GateKind::And:
    case GateKind::Nand: {
      std::uint64_t acc = ~std::uint64_t{0};
      for (WireId w : ins) acc &= v[w];
      return kind == GateKind::And ? acc : ~acc;
    }
    case GateKind::Or:
    case GateKind::Nor: {
      std::uint64_t acc = 0;
      for (WireId w : ins) acc |= v[w];
      return kind == GateKind::Or ? acc : ~acc;
    }
    case GateKind::Xor: {
      std::uint64_t acc = 0;
      for (WireId w : ins) acc ^= v[w];
      return acc;
    }
    case GateKind::Not:
      return ~v[ins[0]];
    case GateKind::Buf:
    case GateKind::Dff:
      return v[ins[0]];
    case GateKind::Const0:
      return 0;
    case GateKind::Const1:
      return ~std::uint64_t{0};
  }
  return 0;
}

std::uint64_t apply_fault(std::uint64_t value, const WireFault& f) {
  switch (f.mode) {
    case FaultMode::flip:
      return value ^ f.lanes;
    case FaultMode::stuck0:
      return value & ~f.lanes;
    case FaultMode::stuck1:
      return value | f.lanes;
  }
  return value;
}

// Rebuild `n` keeping only the gates flagged in `keep`, all primary inputs,
// and the given outputs. Wire ids are compacted; names are preserved.
Netlist extract(const Netlist& n, const std::vector<bool>& keep, const std::vector<WireId>& outputs,
                const std::string& name) {
  std::vector<std::int64_t> remap(n.wire_count(), -1);
  std::vector<std::string> names;
  std::vector<WireId> inputs;
  for (WireId w : n.inputs()) {
    remap[w] = static_cast<std::int64_t>(names.size());
    inputs.push_back(static_cast<WireId>(names.size()));
    names.push_back(n.wire_name(w));
  }
  for (GateId g = 0; g < n.gates().size(); ++g) {
    if (!keep[g]) continue;
    WireId out = n.gate(g).output;
    remap[out] = static_cast<std::int64_t>(names.size());
    names.push_back(n.wire_name(out));
  }
  std::vector<Gate> gates;
  for (GateId g = 0; g < n.gates().size(); ++g) {
    if (!keep[g]) continue;
    Gate copy = n.gate(g);
    for (WireId& w : copy.inputs) w = static_cast<WireId>(remap[w]);
    copy.output = static_cast<WireId>(remap[copy.output]);
    gates.push_back(std::move(copy));
  }
  std::vector<WireId> outs;
  for (WireId w : outputs) outs.push_back(static_cast<WireId>(remap[w]));
  return Netlist(name, std::move(names), std::move(inputs), std::move(gates), std::move(outs));
}

}  // namespace

std::string_view to_string(GateKind kind) {
  for (const auto& [k, s] : kKindNames) {
    if (k == kind) return s;
  }
  return "?";
}

std::optional<GateKind> gate_kind_from_string(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (const auto& [k, s] : kKindNames) {
    if (s == upper) return k;
  }
  return std::nullopt;
}

Netlist::Netlist(std::string name, std::vector<std::string> wire_names, std::vector<WireId> inputs,
                 std::vector<Gate> gates, std::vector<WireId> outputs)
    : name_(std::move(name)),
      wire_names_(std::move(wire_names)),
      inputs_(std::move(inputs)),
      gates_(std::move(gates)),
      outputs_(std::move(outputs)) {
  const std::size_t wires = wire_names_.size();
  auto check_id = [&](WireId w, const char* what) {
    if (w >= wires) throw Error(Errc::index_out_of_range, std::string(what) + " refers to unknown wire " + std::to_string(w));
  };

  for (const auto& nm : wire_names_) {
    if (!nm.empty()) by_name_.emplace(nm, 0);
  }
  std::size_t counter = 0;
  for (WireId w = 0; w < wires; ++w) {
    if (!wire_names_[w].empty()) continue;
    std::string candidate;
    do {
      candidate = "_n" + std::to_string(counter++);
    } while (by_name_.count(candidate) != 0);
    wire_names_[w] = candidate;
    by_name_.emplace(candidate, 0);
  }
  by_name_.clear();
  for (WireId w = 0; w < wires; ++w) {
    if (!by_name_.emplace(wire_names_[w], w).second) {
      throw Error(Errc::invalid_argument, "duplicate wire name '" + wire_names_[w] + "'");
    }
  }

  constexpr std::int64_t kUndriven = -2;
  driver_.assign(wires, kUndriven);
  for (WireId w : inputs_) {
    check_id(w, "primary input");
    if (driver_[w] != kUndriven) throw Error(Errc::multiple_drivers, "wire '" + wire_names_[w] + "' has multiple drivers");
    driver_[w] = -1;
  }
  sinks_.assign(wires, {});
  for (GateId g = 0; g < gates_.size(); ++g) {
    const Gate& gate = gates_[g];
    check_id(gate.output, "gate output");
    if (driver_[gate.output] != kUndriven) {
      throw Error(Errc::multiple_drivers, "wire '" + wire_names_[gate.output] + "' has multiple drivers");
    }
    driver_[gate.output] = g;
    if (!arity_ok(gate.kind, gate.inputs.size())) {
      throw Error(Errc::arity_mismatch, std::string(to_string(gate.kind)) + " gate driving '" +
                                            wire_names_[gate.output] + "' has " + std::to_string(gate.inputs.size()) +
                                            " inputs");
    }
    for (std::uint32_t pin = 0; pin < gate.inputs.size(); ++pin) {
      check_id(gate.inputs[pin], "gate input");
      sinks_[gate.inputs[pin]].push_back({g, pin});
    }
    if (gate.kind == GateKind::Dff) dffs_.push_back(g);
  }
  for (WireId w = 0; w < wires; ++w) {
    if (driver_[w] == kUndriven) throw Error(Errc::undriven_wire, "wire '" + wire_names_[w] + "' has no driver");
  }
  for (WireId w : outputs_) check_id(w, "primary output");

  // Kahn's algorithm over non-DFF gates; DFF outputs and inputs are sources.
  std::vector<std::uint32_t> pending(gates_.size(), 0);
  std::vector<GateId> ready;
  std::size_t comb = 0;
  for (GateId g = 0; g < gates_.size(); ++g) {
    if (gates_[g].kind == GateKind::Dff) continue;
    ++comb;
    for (WireId w : gates_[g].inputs) {
      std::int64_t d = driver_[w];
      if (d >= 0 && gates_[static_cast<std::size_t>(d)].kind != GateKind::Dff) ++pending[g];
    }
    if (pending[g] == 0) ready.push_back(g);
  }
  topo_.reserve(comb);
  while (!ready.empty()) {
    GateId g = ready.back();
    ready.pop_back();
    topo_.push_back(g);
    for (const Sink& s : sinks_[gates_[g].output]) {
      if (gates_[s.gate].kind == GateKind::Dff) continue;
      if (--pending[s.gate] == 0) ready.push_back(s.gate);
    }
  }
  if (topo_.size() != comb) {
    for (GateId g = 0; g < gates_.size(); ++g) {
      if (gates_[g].kind != GateKind::Dff && pending[g] != 0) {
        throw Error(Errc::combinational_cycle, "combinational cycle through '" + wire_names_[gates_[g].output] + "'");
      }
    }
  }
}

std::optional<WireId> Netlist::find_wire(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<GateId> Netlist::driver(WireId w) const {
  std::int64_t d = driver_.at(w);
  if (d < 0) return std::nullopt;
  return static_cast<GateId>(d);
}

WireId NetlistBuilder::wire(std::string_view name) {
  std::string key(name);
  auto it = ids_.find(key);
  if (it != ids_.end()) return it->second;
  WireId id = static_cast<WireId>(names_.size());
  names_.push_back(key);
  ids_.emplace(std::move(key), id);
  return id;
}

WireId NetlistBuilder::add_input(std::string_view name) {
  WireId id = wire(name);
  inputs_.push_back(id);
  return id;
}

GateId NetlistBuilder::add_gate(GateKind kind, std::string_view output, const std::vector<std::string>& inputs) {
  Gate g;
  g.kind = kind;
  g.output = wire(output);
  for (const auto& in : inputs) g.inputs.push_back(wire(in));
  gates_.push_back(std::move(g));
  return static_cast<GateId>(gates_.size() - 1);
}

void NetlistBuilder::add_output(std::string_view name) { outputs_.push_back(wire(name)); }

Netlist NetlistBuilder::build() const { return Netlist(name_, names_, inputs_, gates_, outputs_); }

Evaluator::Evaluator(const Netlist& netlist)
    : netlist_(&netlist), values_(netlist.wire_count(), 0), fault_index_(netlist.wire_count(), -1) {}

void Evaluator::run(std::span<const std::uint64_t> inputs, std::span<const std::uint64_t> state,
                    std::span<const WireFault> faults) {
  const Netlist& n = *netlist_;
  if (inputs.size() != n.inputs().size()) {
    throw Error(Errc::width_mismatch, "expected " + std::to_string(n.inputs().size()) + " inputs, got " +
                                          std::to_string(inputs.size()));
  }
  if (state.size() != n.dffs().size()) {
    throw Error(Errc::width_mismatch, "expected " + std::to_string(n.dffs().size()) + " state bits, got " +
                                          std::to_string(state.size()));
  }
  for (std::size_t i = 0; i < faults.size(); ++i) {
    if (faults[i].wire >= values_.size()) throw Error(Errc::unknown_target, "fault on unknown wire");
    if (fault_index_[faults[i].wire] < 0) fault_index_[faults[i].wire] = static_cast<std::int32_t>(i);
  }
  auto settle = [&](WireId w) {
    if (fault_index_[w] < 0) return;
    for (std::size_t i = static_cast<std::size_t>(fault_index_[w]); i < faults.size(); ++i) {
      if (faults[i].wire == w) values_[w] = apply_fault(values_[w], faults[i]);
    }
  };
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    values_[n.inputs()[i]] = inputs[i];
    settle(n.inputs()[i]);
  }
  for (std::size_t i = 0; i < state.size(); ++i) {
    WireId q = n.gate(n.dffs()[i]).output;
    values_[q] = state[i];
    settle(q);
  }
  for (GateId g : n.topo_order()) {
    const Gate& gate = n.gate(g);
    values_[gate.output] = eval_gate(gate.kind, gate.inputs, values_);
    settle(gate.output);
  }
  for (const WireFault& f : faults) fault_index_[f.wire] = -1;
}

std::uint64_t Evaluator::next_state(std::size_t i) const {
  const Gate& dff = netlist_->gate(netlist_->dffs()[i]);
  return values_[dff.inputs[0]];
}

EvalResult Evaluator::evaluate(const BitVector& inputs, const BitVector& state, std::span<const WireFault> faults) {
  in_words_.resize(inputs.width());
  for (std::size_t i = 0; i < inputs.width(); ++i) in_words_[i] = inputs[i] ? 1 : 0;
  state_words_.resize(state.width());
  for (std::size_t i = 0; i < state.width(); ++i) state_words_[i] = state[i] ? 1 : 0;
  run(in_words_, state_words_, faults);
  EvalResult r{BitVector(netlist_->outputs().size()), BitVector(netlist_->dffs().size())};
  for (std::size_t i = 0; i < netlist_->outputs().size(); ++i) r.outputs.set(i, (output(i) & 1U) != 0);
  for (std::size_t i = 0; i < netlist_->dffs().size(); ++i) r.next_state.set(i, (next_state(i) & 1U) != 0);
  return r;
}

EvalResult evaluate(const Netlist& n, const BitVector& inputs, const BitVector& state,
                    std::span<const WireFault> faults) {
  Evaluator ev(n);
  return ev.evaluate(inputs, state, faults);
}

std::vector<GateId> fanin_gates(const Netlist& n, WireId w) {
  std::vector<bool> seen(n.gates().size(), false);
  std::vector<WireId> stack{w};
  while (!stack.empty()) {
    WireId cur = stack.back();
    stack.pop_back();
    auto d = n.driver(cur);
    if (!d || seen[*d]) continue;
    seen[*d] = true;
    for (WireId in : n.gate(*d).inputs) stack.push_back(in);
  }
  std::vector<GateId> out;
  for (GateId g = 0; g < seen.size(); ++g) {
    if (seen[g]) out.push_back(g);
  }
  return out;
}

Netlist output_cone(const Netlist& n, std::size_t output_index) {
  if (output_index >= n.outputs().size()) {
    throw Error(Errc::index_out_of_range, "output index " + std::to_string(output_index) + " out of range");
  }
  WireId root = n.outputs()[output_index];
  std::vector<bool> keep(n.gates().size(), false);
  for (GateId g : fanin_gates(n, root)) keep[g] = true;
  return extract(n, keep, {root}, n.name() + "_cone" + std::to_string(output_index));
}

namespace {

// Simplification works on signals: a constant or a wire of the new netlist.
struct Signal {
  int constant = -1;  // 0, 1, or -1 for a wire
  WireId wire = 0;

  static Signal of(bool v) { return {v ? 1 : 0, 0}; }
  static Signal of(WireId w) { return {-1, w}; }
  bool is_const() const { return constant >= 0; }
};

class Simplifier {
 public:
  explicit Simplifier(const Netlist& n) : src_(n), map_(n.wire_count()) {}

  Netlist run() {
    for (WireId w : src_.inputs()) {
      map_[w] = Signal::of(new_wire(src_.wire_name(w)));
      inputs_.push_back(map_[w].wire);
    }
    std::vector<GateId> dff_new;
    for (GateId g : src_.dffs()) {
      WireId out = new_wire(src_.wire_name(src_.gate(g).output));
      map_[src_.gate(g).output] = Signal::of(out);
      dff_new.push_back(static_cast<GateId>(gates_.size()));
      gates_.push_back(Gate{GateKind::Dff, {0}, out});
    }
    for (GateId g : src_.topo_order()) {
      const Gate& gate = src_.gate(g);
      map_[gate.output] = fold(gate, src_.wire_name(gate.output));
    }
    for (std::size_t i = 0; i < src_.dffs().size(); ++i) {
      gates_[dff_new[i]].inputs[0] = materialize(map_[src_.gate(src_.dffs()[i]).inputs[0]]);
    }
    std::vector<WireId> outs;
    for (WireId w : src_.outputs()) outs.push_back(materialize(map_[w]));

    Netlist raw(src_.name(), names_, inputs_, gates_, outs);
    std::vector<bool> keep(raw.gates().size(), false);
    for (WireId w : raw.outputs()) {
      for (GateId g : fanin_gates(raw, w)) keep[g] = true;
    }
    return extract(raw, keep, raw.outputs(), raw.name());
  }

 private:
  WireId new_wire(const std::string& name) {
    // Names must stay unique; a later gate may reuse an old name only once.
    std::string nm = name;
    if (!nm.empty() && !used_names_.insert(nm).second) nm.clear();
    names_.push_back(nm);
    return static_cast<WireId>(names_.size() - 1);
  }

  WireId materialize(const Signal& s) {
    if (!s.is_const()) return s.wire;
    auto& slot = const_wire_[s.constant];
    if (!slot) {
      WireId w = new_wire("");
      gates_.push_back(Gate{s.constant ? GateKind::Const1 : GateKind::Const0, {}, w});
      slot = w;
    }
    return *slot;
  }

  Signal emit(GateKind kind, std::vector<WireId> ins, const std::string& name) {
    if (kind != GateKind::Not) std::sort(ins.begin(), ins.end());
    if (kind == GateKind::Not) {
      auto d = driver_kind_.find(ins[0]);
      if (d != driver_kind_.end() && d->second.first == GateKind::Not) return Signal::of(d->second.second);
    }
    auto key = std::make_pair(kind, ins);
    auto it = strash_.find(key);
    if (it != strash_.end()) return Signal::of(it->second);
    WireId out = new_wire(name);
    gates_.push_back(Gate{kind, ins, out});
    strash_.emplace(std::move(key), out);
    if (kind == GateKind::Not) driver_kind_[out] = {GateKind::Not, ins[0]};
    return Signal::of(out);
  }

  Signal invert(const Signal& s, const std::string& name) {
    if (s.is_const()) return Signal::of(s.constant == 0);
    return emit(GateKind::Not, {s.wire}, name);
  }

  Signal fold(const Gate& gate, const std::string& name) {
    std::vector<Signal> ins;
    for (WireId w : gate.inputs) ins.push_back(map_[w]);
    switch (gate.kind) {
      case GateKind::Const0:
        return Signal::of(false);
      case GateKind::Const1:
        return Signal::of(true);
      case GateKind::Buf:
        return ins[0];
      case GateKind::Not:
        return invert(ins[0], name);
      case GateKind::And:
      case GateKind::Nand:
      case GateKind::Or:
      case GateKind::Nor: {
        const bool is_and = gate.kind == GateKind::And || gate.kind == GateKind::Nand;
        const bool negate = gate.kind == GateKind::Nand || gate.kind == GateKind::Nor;
        const int absorbing = is_and ? 0 : 1;
        std::vector<WireId> wires;
        for (const Signal& s : ins) {
          if (s.is_const()) {
            if (s.constant == absorbing) return Signal::of(static_cast<bool>(absorbing ^ negate));
            continue;
          }
          if (std::find(wires.begin(), wires.end(), s.wire) == wires.end()) wires.push_back(s.wire);
        }
        if (wires.empty()) return Signal::of(static_cast<bool>((1 - absorbing) ^ negate));
        if (wires.size() == 1) return negate ? invert(Signal::of(wires[0]), name) : Signal::of(wires[0]);
        return emit(gate.kind, wires, name);
      }
      case GateKind::Xor: {
        bool parity = false;
        std::map<WireId, int> counts;
        for (const Signal& s : ins) {
          if (s.is_const()) {
            parity ^= s.constant == 1;
          } else {
            counts[s.wire] ^= 1;
          }
        }
        std::vector<WireId> wires;
        for (auto [w, c] : counts) {
          if (c) wires.push_back(w);
        }
        if (wires.empty()) return Signal::of(parity);
        if (wires.size() == 1) return parity ? invert(Signal::of(wires[0]), name) : Signal::of(wires[0]);
        if (!parity) return emit(GateKind::Xor, wires, name);
        return invert(emit(GateKind::Xor, wires, ""), name);
      }
      case GateKind::Dff:
        break;
    }
    return ins[0];
  }

  const Netlist& src_;
  std::vector<Signal> map_;
  std::vector<std::string> names_;
  std::set<std::string> used_names_;
  std::vector<WireId> inputs_;
  std::vector<Gate> gates_;
  std::map<std::pair<GateKind, std::vector<WireId>>, WireId> strash_;
  std::map<WireId, std::pair<GateKind, WireId>> driver_kind_;
  std::array<std::optional<WireId>, 2> const_wire_;
};

}  // namespace

Netlist simplify(const Netlist& n) { return Simplifier(n).run(); }

// ---------------------------------------------------------------------------
// Text format

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$' || c == '[' || c == ']' ||
         c == ':';
}

class LineLexer {
 public:
  LineLexer(std::string_view line, int line_no) : line_(line), line_no_(line_no) {}

  void skip_ws() {
    while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= line_.size();
  }
  int column() const { return static_cast<int>(pos_) + 1; }

  std::string name(const char* what) {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < line_.size() && is_name_char(line_[pos_])) ++pos_;
    if (start == pos_) fail(std::string("expected ") + what);
    return std::string(line_.substr(start, pos_ - start));
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (line_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_no_, column(), msg); }

 private:
  std::string_view line_;
  int line_no_;
  std::size_t pos_ = 0;
};

ParsedNetlist parse_impl(std::string_view text, bool allow_switchboxes) {
  NetlistBuilder b;
  struct PendingSb {
    std::string id;
    GateId first;
    GateId second;
  };
  std::vector<PendingSb> sbs;
  std::set<std::string> sb_ids;

  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    LineLexer lx(line, line_no);
    if (lx.at_end()) continue;
    if (lx.accept(".model")) {
      b.set_name(lx.name("model name"));
    } else if (lx.accept(".inputs")) {
      while (!lx.at_end()) b.add_input(lx.name("input name"));
    } else if (lx.accept(".outputs")) {
      while (!lx.at_end()) b.add_output(lx.name("output name"));
    } else if (lx.accept(".")) {
      lx.fail("unknown directive");
    } else {
      std::string lhs = lx.name("wire name");
      lx.expect("=");
      std::string kind_name = lx.name("gate kind");
      lx.expect("(");
      if (kind_name == "SB2") {
        if (!allow_switchboxes) lx.fail("SB2 pseudo-gate is only valid in obfuscated netlists");
        std::string x = lx.name("switchbox input");
        lx.expect(",");
        std::string y = lx.name("switchbox input");
        lx.expect("->");
        std::string z = lx.name("switchbox output");
        lx.expect(",");
        std::string w = lx.name("switchbox output");
        lx.expect(")");
        if (!sb_ids.insert(lhs).second) lx.fail("duplicate switchbox id '" + lhs + "'");
        GateId g1 = b.add_gate(GateKind::Buf, z, {x});
        GateId g2 = b.add_gate(GateKind::Buf, w, {y});
        sbs.push_back({lhs, g1, g2});
      } else {
        auto kind = gate_kind_from_string(kind_name);
        if (!kind) lx.fail("unknown gate kind '" + kind_name + "'");
        std::vector<std::string> args;
        if (!lx.accept(")")) {
          args.push_back(lx.name("gate input"));
          while (lx.accept(",")) args.push_back(lx.name("gate input"));
          lx.expect(")");
        }
        b.add_gate(*kind, lhs, args);
      }
    }
    if (!lx.at_end()) lx.fail("unexpected trailing text");
    if (end == text.size()) break;
  }
  ParsedNetlist out{b.build(), {}};
  for (auto& sb : sbs) out.switchboxes.push_back({sb.id, sb.first, sb.second});
  return out;
}

}  // namespace

Netlist parse_netlist(std::string_view text) { return parse_impl(text, false).netlist; }

ParsedNetlist parse_netlist_with_switchboxes(std::string_view text) { return parse_impl(text, true); }

std::string serialize_netlist(const Netlist& n, std::span<const SwitchboxGates> switchboxes) {
  std::map<GateId, const SwitchboxGates*> first;
  std::set<GateId> second;
  for (const auto& sb : switchboxes) {
    first[sb.first] = &sb;
    second.insert(sb.second);
  }
  std::ostringstream os;
  os << ".model " << n.name() << '\n';
  os << ".inputs";
  for (WireId w : n.inputs()) os << ' ' << n.wire_name(w);
  os << '\n' << ".outputs";
  for (WireId w : n.outputs()) os << ' ' << n.wire_name(w);
  os << '\n';
  for (GateId g = 0; g < n.gates().size(); ++g) {
    if (second.count(g)) continue;
    if (auto it = first.find(g); it != first.end()) {
      const Gate& a = n.gate(it->second->first);
      const Gate& c = n.gate(it->second->second);
      os << it->second->id << " = SB2(" << n.wire_name(a.inputs[0]) << ", " << n.wire_name(c.inputs[0]) << " -> "
         << n.wire_name(a.output) << ", " << n.wire_name(c.output) << ")\n";
      continue;
    }
    const Gate& gate = n.gate(g);
    os << n.wire_name(gate.output) << " = " << to_string(gate.kind) << '(';
    for (std::size_t i = 0; i < gate.inputs.size(); ++i) {
      if (i) os << ", ";
      os << n.wire_name(gate.inputs[i]);
    }
    os << ")\n";
  }
  return os.str();
}

}  // namespace tpad
