#include "tpad/chip.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "tpad/error.hpp"
#include "tpad/random.hpp"

namespace tpad {

namespace {

void require_width(const BitVector& v, std::size_t width, const char* what) {
  if (v.width() != width)
    throw Error(Errc::width_mismatch, std::string(what) + " has width " + std::to_string(v.width()) + ", expected " +
                                          std::to_string(width));
}

std::vector<std::string> port_names(std::string_view prefix, std::size_t count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(std::string(prefix) + std::to_string(i));
  return out;
}

template <typename... Vs>
std::vector<std::string> join(Vs&&... vs) {
  std::vector<std::string> out;
  (out.insert(out.end(), vs.begin(), vs.end()), ...);
  return out;
}

struct Block {
  const Netlist* netlist;
  std::string prefix;
  std::vector<std::string> inputs;   // merged wire for each block input
  std::vector<std::string> outputs;  // name given to each block output
};

// Copies every block into one netlist. Internal wires get the block prefix;
// a block output takes its given name, through a buffer when its wire is a
// block input or already named.
Netlist merge_blocks(std::string name, const std::vector<std::string>& inputs,
                     const std::vector<std::string>& outputs, const std::vector<Block>& blocks) {
  NetlistBuilder b(std::move(name));
  for (const auto& in : inputs) b.add_input(in);
  for (const auto& blk : blocks) {
    const Netlist& n = *blk.netlist;
    if (blk.inputs.size() != n.inputs().size() || blk.outputs.size() != n.outputs().size())
      throw Error(Errc::width_mismatch, "block " + blk.prefix + " port count mismatch");
    std::unordered_map<WireId, std::string> names;
    for (std::size_t i = 0; i < n.inputs().size(); ++i) names[n.inputs()[i]] = blk.inputs[i];
    std::vector<std::pair<std::string, WireId>> buffers;
    for (std::size_t j = 0; j < n.outputs().size(); ++j) {
      WireId w = n.outputs()[j];
      if (names.contains(w)) buffers.emplace_back(blk.outputs[j], w);
      else names[w] = blk.outputs[j];
    }
    auto name_of = [&](WireId w) {
      auto it = names.find(w);
      return it != names.end() ? it->second : blk.prefix + n.wire_name(w);
    };
    for (const Gate& g : n.gates()) {
      std::vector<std::string> ins;
      ins.reserve(g.inputs.size());
      for (WireId w : g.inputs) ins.push_back(name_of(w));
      b.add_gate(g.kind, name_of(g.output), ins);
    }
    for (const auto& [out, w] : buffers) b.add_gate(GateKind::Buf, out, {name_of(w)});
  }
  for (const auto& out : outputs) b.add_output(out);
  return b.build();
}

std::vector<std::string> pick(std::string_view prefix, const std::vector<std::size_t>& bits) {
  std::vector<std::string> out;
  for (std::size_t b : bits) out.push_back(std::string(prefix) + std::to_string(b));
  return out;
}

std::string group_prefix(std::string_view base, std::size_t g) { return std::string(base) + std::to_string(g) + "_"; }

Netlist build_check_netlist(const Netlist& f, const ProtectedChip& c) {
  const std::size_t n = f.inputs().size(), m = f.outputs().size(), r = c.r();
  const std::array<std::string, 2> chk_groups{"pred", "tap"};
  const std::array<std::string, 1> enc_groups{"prev"};
  const std::array<std::string, 3> dec_groups{"recv", "prev", "tap"};
  std::vector<Netlist> parts;
  parts.reserve(2 + c.in_groups.size() + c.out_groups.size());
  parts.push_back(build_ocp(f, c.h_logic));
  parts.push_back(build_parity_netlist(c.h_logic, "chk", chk_groups));
  for (const auto& g : c.out_groups) parts.push_back(build_parity_netlist(g.h, "oenc", enc_groups));
  for (const auto& g : c.in_groups) parts.push_back(build_parity_netlist(g.h, "idec", dec_groups));

  const auto pred = port_names("pred", r);
  const auto pred_in = c.pipeline ? port_names("pred_d", r) : pred;
  const auto tap = port_names("tap", r);
  auto inputs = join(port_names("x", n), port_names("ox", n), port_names("y", m), port_names("cy", m));
  std::vector<std::string> outputs;
  std::vector<Block> blocks{
      {&parts[0], "ocp.", port_names("ox", n), pred},
      {&parts[1], "chk.", join(port_names("cy", m), pred_in, tap), port_names("elog", r)},
  };
  for (std::size_t g = 0; g < c.out_groups.size(); ++g) {
    const std::string sfx = std::to_string(g);
    auto oprev = port_names(group_prefix("oprev", g), r);
    auto ocheck = port_names(group_prefix("ocheck", g), r);
    inputs = join(inputs, oprev);
    outputs = join(outputs, ocheck);
    blocks.push_back({&parts[2 + g], "oenc" + sfx + ".", join(pick("y", c.out_groups[g].bits), oprev), ocheck});
  }
  for (std::size_t g = 0; g < c.in_groups.size(); ++g) {
    const std::string sfx = std::to_string(g);
    auto recv = port_names(group_prefix("recv", g), r);
    auto iprev = port_names(group_prefix("iprev", g), r);
    auto ein = port_names(group_prefix("ein", g), r);
    inputs = join(inputs, recv, iprev);
    outputs = join(outputs, ein);
    blocks.push_back({&parts[2 + c.out_groups.size() + g], "idec" + sfx + ".",
                      join(pick("x", c.in_groups[g].bits), recv, iprev, tap), ein});
  }
  inputs = join(inputs, tap);
  outputs = join(outputs, port_names("elog", r));
  if (c.pipeline) {
    inputs = join(inputs, pred_in);
    outputs = join(outputs, pred);
  }
  return merge_blocks("check", inputs, outputs, blocks);
}

std::vector<PortGroup> make_groups(std::vector<std::vector<std::size_t>> groups,
                                   const std::vector<std::optional<ParityCheckMatrix>>& codes, std::size_t width,
                                   std::size_t r, std::uint64_t seed, const char* what) {
  if (groups.empty()) {
    groups.emplace_back();
    for (std::size_t i = 0; i < width; ++i) groups.back().push_back(i);
  }
  std::vector<int> seen(width, 0);
  std::vector<PortGroup> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& bits = groups[g];
    if (bits.empty()) throw Error(Errc::invalid_argument, std::string(what) + " group " + std::to_string(g) + " is empty");
    for (std::size_t b : bits) {
      if (b >= width) throw Error(Errc::index_out_of_range, std::string(what) + " bit " + std::to_string(b) + " out of range");
      if (seen[b]++) throw Error(Errc::invalid_argument, std::string(what) + " bit " + std::to_string(b) + " in two groups");
    }
    if (g < codes.size() && codes[g]) {
      if (codes[g]->k() != bits.size() || codes[g]->r() != r)
        throw Error(Errc::width_mismatch, std::string(what) + " group " + std::to_string(g) + " code has wrong shape");
      out.push_back({bits, *codes[g]});
    } else {
      out.push_back({bits, sample_parity_code(bits.size(), r, derive_seed(seed, g))});
    }
  }
  for (std::size_t b = 0; b < width; ++b)
    if (!seen[b]) throw Error(Errc::invalid_argument, std::string(what) + " bit " + std::to_string(b) + " in no group");
  return out;
}

// Info bit j of the RAM code is data bit j below the word width, address bit
// j - word_bits above it.
Netlist build_ram_netlist(const ParityCheckMatrix& h, std::size_t addr_bits, std::size_t word_bits) {
  Netlist enc = build_parity_netlist(h, "renc");
  Netlist chk = build_parity_netlist(h, "rchk");
  const auto a = port_names("a", addr_bits);
  const auto d = port_names("d", word_bits);
  const auto q = port_names("q", word_bits);
  std::vector<Block> blocks{
      {&enc, "renc.", join(d, a), port_names("wcheck", h.r())},
      {&chk, "rchk.", join(q, a), port_names("rcheck", h.r())},
  };
  return merge_blocks("ram_check", join(a, d, q), join(port_names("wcheck", h.r()), port_names("rcheck", h.r())),
                      blocks);
}

ObfuscatedNetlist obfuscate(const Netlist& n, const ChipOptions& o, std::uint64_t seed) {
  if (o.t == 0) return make_obfuscated(n);
  InsertOptions io;
  io.t = o.t;
  io.seed = seed;
  io.max_iterations = o.max_iterations;
  io.match_gate_fanins = !o.loose_match;
  io.equivalence = o.equivalence;
  return insert_switchboxes(n, io);
}

BitVector random_bits(std::size_t width, Rng& rng) {
  BitVector v(width);
  for (std::size_t i = 0; i < width; ++i) v.set(i, rng.coin());
  return v;
}

std::vector<std::size_t> resolve(const std::vector<WireId>& ports, const Netlist& n, std::string_view prefix,
                                 std::size_t count) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < ports.size(); ++i) index[n.wire_name(ports[i])] = i;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::string name = std::string(prefix) + std::to_string(i);
    auto it = index.find(name);
    if (it == index.end()) throw Error(Errc::topology, "checking netlist lacks port " + name);
    out.push_back(it->second);
  }
  return out;
}

void put(std::vector<std::uint64_t>& words, const std::vector<std::size_t>& idx, const BitVector& v) {
  for (std::size_t i = 0; i < idx.size(); ++i) words[idx[i]] = v[i] ? ~std::uint64_t{0} : 0;
}

void put(std::vector<std::uint64_t>& words, const std::vector<std::size_t>& idx, std::uint64_t v) {
  for (std::size_t i = 0; i < idx.size(); ++i) words[idx[i]] = ((v >> i) & 1U) ? ~std::uint64_t{0} : 0;
}

BitVector get(const Evaluator& e, const std::vector<std::size_t>& idx) {
  BitVector v(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) v.set(i, (e.output(idx[i]) & 1U) != 0);
  return v;
}

std::uint64_t get_mask(const Evaluator& e, const std::vector<std::size_t>& idx) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) v |= (e.output(idx[i]) & 1U) << i;
  return v;
}

std::vector<std::uint64_t> to_words(const BitVector& v) {
  std::vector<std::uint64_t> w(v.width());
  for (std::size_t i = 0; i < v.width(); ++i) w[i] = v[i] ? ~std::uint64_t{0} : 0;
  return w;
}

}  // namespace

BitVector select_bits(const BitVector& word, const std::vector<std::size_t>& bits) {
  BitVector out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out.set(i, word.at(bits[i]));
  return out;
}

BitVector encode_outputs(OutputEncoderState& state, const BitVector& outputs) {
  require_width(outputs, state.h.k(), "outputs");
  require_width(state.prev_check, state.h.r(), "previous check bits");
  BitVector check = compute_check_bits(state.h, outputs) ^ state.prev_check;
  state.prev_check = check;
  return check;
}

DecodeVerdict decode_inputs(InputDecoderState& state, const BitVector& inputs, const BitVector& recv_check) {
  require_width(inputs, state.h.k(), "inputs");
  require_width(recv_check, state.h.r(), "received check bits");
  require_width(state.prev_check, state.h.r(), "previous check bits");
  DecodeVerdict v;
  v.expected = recv_check ^ state.prev_check;
  v.actual = compute_check_bits(state.h, inputs);
  v.attack = v.expected != v.actual;
  state.prev_check = recv_check;
  return v;
}

LfsrSpec default_lfsr_spec(std::size_t r, std::uint64_t seed) {
  if (r == 0 || r > 24) throw Error(Errc::invalid_argument, "default LFSR supports 1..24 check bits");
  LfsrSpec s;
  if (r <= 16) {
    s.degree = 16;
    s.poly = 0x1002D;  // x^16 + x^5 + x^3 + x^2 + 1
  } else {
    s.degree = 24;
    s.poly = 0x1000087;  // x^24 + x^7 + x^2 + x + 1
  }
  const std::uint64_t mask = (std::uint64_t{1} << s.degree) - 1;
  s.seed = seed & mask;
  if (s.seed == 0) s.seed = 1;
  for (unsigned i = 0; i < r; ++i) s.taps.push_back(i);
  return s;
}

ProtectedChip build_protected_chip(const Netlist& f, const LfsrSpec& lfsr, std::uint64_t seed,
                                   const ChipOptions& options) {
  if (!f.is_combinational()) throw Error(Errc::invalid_argument, "protected function must be combinational");
  if (f.inputs().empty() || f.outputs().empty())
    throw Error(Errc::invalid_argument, "protected function needs inputs and outputs");
  validate(lfsr);
  const std::size_t r = lfsr.r();
  if (r == 0) throw Error(Errc::invalid_argument, "LFSR must expose at least one tap");

  if (options.logic_code && (options.logic_code->k() != f.outputs().size() || options.logic_code->r() != r))
    throw Error(Errc::width_mismatch, "logic code has wrong shape");
  ProtectedChip c{
      .f = f,
      .h_logic = options.logic_code ? *options.logic_code : sample_parity_code(f.outputs().size(), r, derive_seed(seed, 1)),
      .in_groups = make_groups(options.input_groups, options.input_codes, f.inputs().size(), r,
                               derive_seed(seed, 3), "input"),
      .out_groups = make_groups(options.output_groups, options.output_codes, f.outputs().size(), r,
                                derive_seed(seed, 2), "output"),
      .h_mem = std::nullopt,
      .ram_addr_bits = options.ram_addr_bits,
      .ram_word_bits = options.ram_word_bits,
      .lfsr = lfsr,
      .pipeline = options.pipeline,
      .t = options.t,
      .seed = seed,
      .check = make_obfuscated(f),
      .ram_check = std::nullopt,
  };
  c.check = obfuscate(build_check_netlist(f, c), options, derive_seed(seed, 5));
  if (options.ram_addr_bits > 0) {
    c.h_mem = sample_parity_code(options.ram_addr_bits + options.ram_word_bits, r, derive_seed(seed, 4));
    // Validates the geometry before any insertion work.
    ProtectedRam probe(*c.h_mem, options.ram_addr_bits, options.ram_word_bits);
    (void)probe;
    c.ram_check = obfuscate(build_ram_netlist(*c.h_mem, options.ram_addr_bits, options.ram_word_bits), options,
                            derive_seed(seed, 6));
  }
  return c;
}

SessionKeys draw_session_keys(const ProtectedChip& chip, std::uint64_t seed) {
  Rng rng(seed);
  SessionKeys k;
  for (std::size_t g = 0; g < chip.in_groups.size(); ++g) k.input_prev.push_back(random_bits(chip.r(), rng));
  for (std::size_t g = 0; g < chip.out_groups.size(); ++g) k.output_prev.push_back(random_bits(chip.r(), rng));
  return k;
}

ChipRuntime::ChipRuntime(const ProtectedChip& chip, const SessionKeys& keys)
    : ChipRuntime(chip, keys, chip.check.intended,
                  chip.ram_check ? std::optional<SwitchboxConfig>(chip.ram_check->intended) : std::nullopt) {}

ChipRuntime::ChipRuntime(const ProtectedChip& chip, const SessionKeys& keys, const SwitchboxConfig& check_config,
                         const std::optional<SwitchboxConfig>& ram_config)
    : chip_(&chip),
      check_(apply_config(chip.check, check_config)),
      ram_check_(chip.ram_check ? std::optional<Netlist>(apply_config(
                                      *chip.ram_check, ram_config ? *ram_config : chip.ram_check->intended))
                                : std::nullopt),
      f_eval_(chip.f),
      check_eval_(check_),
      lfsr_(chip.lfsr) {
  const std::size_t n = chip.f.inputs().size(), m = chip.f.outputs().size(), r = chip.r();
  if (keys.input_prev.size() != chip.in_groups.size() || keys.output_prev.size() != chip.out_groups.size())
    throw Error(Errc::width_mismatch, "session keys do not match the chip's port groups");
  for (const auto& k : keys.input_prev) require_width(k, r, "input session key");
  for (const auto& k : keys.output_prev) require_width(k, r, "output session key");
  const auto& ins = check_.inputs();
  const auto& outs = check_.outputs();
  ports_.x = resolve(ins, check_, "x", n);
  ports_.ox = resolve(ins, check_, "ox", n);
  ports_.y = resolve(ins, check_, "y", m);
  ports_.cy = resolve(ins, check_, "cy", m);
  ports_.tap = resolve(ins, check_, "tap", r);
  ports_.elog = resolve(outs, check_, "elog", r);
  for (std::size_t g = 0; g < chip.in_groups.size(); ++g) {
    ports_.recv.push_back(resolve(ins, check_, group_prefix("recv", g), r));
    ports_.iprev.push_back(resolve(ins, check_, group_prefix("iprev", g), r));
    ports_.ein.push_back(resolve(outs, check_, group_prefix("ein", g), r));
  }
  for (std::size_t g = 0; g < chip.out_groups.size(); ++g) {
    ports_.oprev.push_back(resolve(ins, check_, group_prefix("oprev", g), r));
    ports_.ocheck.push_back(resolve(outs, check_, group_prefix("ocheck", g), r));
  }
  if (chip.pipeline) {
    ports_.pred_d = resolve(ins, check_, "pred_d", r);
    ports_.pred = resolve(outs, check_, "pred", r);
  }
  check_words_.assign(ins.size(), 0);
  in_prev_ = keys.input_prev;
  out_prev_ = keys.output_prev;
  pred_reg_ = BitVector(r);
  y_reg_ = BitVector(m);

  if (ram_check_) {
    const std::size_t a = chip.ram_addr_bits, w = chip.ram_word_bits;
    ram_eval_.emplace(*ram_check_);
    ram_ports_.a = resolve(ram_check_->inputs(), *ram_check_, "a", a);
    ram_ports_.d = resolve(ram_check_->inputs(), *ram_check_, "d", w);
    ram_ports_.q = resolve(ram_check_->inputs(), *ram_check_, "q", w);
    ram_ports_.wcheck = resolve(ram_check_->outputs(), *ram_check_, "wcheck", r);
    ram_ports_.rcheck = resolve(ram_check_->outputs(), *ram_check_, "rcheck", r);
    ram_words_.assign(ram_check_->inputs().size(), 0);
    ram_.emplace(*chip.h_mem, a, w);
    ram_->set_check_functions([this](std::uint64_t ad, std::uint64_t d) { return ram_check_eval(ad, d, false); },
                              [this](std::uint64_t ad, std::uint64_t d) { return ram_check_eval(ad, d, true); });
  }
}

std::uint64_t ChipRuntime::ram_check_eval(std::uint64_t addr, std::uint64_t data, bool read_side) {
  put(ram_words_, ram_ports_.a, addr);
  put(ram_words_, ram_ports_.d, data);
  put(ram_words_, ram_ports_.q, data);
  ram_eval_->run(ram_words_, {}, ram_faults_);
  return get_mask(*ram_eval_, read_side ? ram_ports_.rcheck : ram_ports_.wcheck);
}

CycleResult ChipRuntime::step(const CycleInput& in, const ChipTamper& tamper) {
  const ProtectedChip& c = *chip_;
  const std::size_t n = c.f.inputs().size(), m = c.f.outputs().size(), r = c.r();
  require_width(in.inputs, n, "chip inputs");
  if (in.recv_checks.size() != c.in_groups.size())
    throw Error(Errc::width_mismatch, "expected check bits for " + std::to_string(c.in_groups.size()) + " input groups");
  for (const auto& rc : in.recv_checks) require_width(rc, r, "received check bits");

  CycleResult res;
  res.cycle = cycle_;
  res.taps = lfsr_.taps();

  auto x_words = to_words(in.inputs);
  f_eval_.run(x_words, {}, tamper.f_faults);
  BitVector y(m);
  for (std::size_t i = 0; i < m; ++i) y.set(i, (f_eval_.output(i) & 1U) != 0);
  res.f_outputs = y;
  if (tamper.output_override) {
    require_width(*tamper.output_override, m, "output override");
    y = *tamper.output_override;
  }
  const BitVector& ox = tamper.ced_inputs ? *tamper.ced_inputs : in.inputs;
  const BitVector& cy_now = tamper.ced_outputs ? *tamper.ced_outputs : y;
  require_width(ox, n, "checker inputs");
  require_width(cy_now, m, "checker outputs");

  put(check_words_, ports_.x, in.inputs);
  put(check_words_, ports_.ox, ox);
  put(check_words_, ports_.y, y);
  put(check_words_, ports_.cy, c.pipeline ? y_reg_ : cy_now);
  for (std::size_t g = 0; g < c.in_groups.size(); ++g) {
    put(check_words_, ports_.recv[g], in.recv_checks[g]);
    put(check_words_, ports_.iprev[g], in_prev_[g]);
  }
  for (std::size_t g = 0; g < c.out_groups.size(); ++g) put(check_words_, ports_.oprev[g], out_prev_[g]);
  put(check_words_, ports_.tap, res.taps);
  if (c.pipeline) put(check_words_, ports_.pred_d, pred_reg_);
  check_eval_.run(check_words_, {}, tamper.check_faults);

  res.outputs = y;
  for (const auto& p : ports_.ocheck) res.out_checks.push_back(get(check_eval_, p));
  res.logic_signal = get(check_eval_, ports_.elog);
  for (const auto& p : ports_.ein) res.input_signals.push_back(get(check_eval_, p));
  if (c.pipeline) {
    pred_reg_ = get(check_eval_, ports_.pred);
    y_reg_ = cy_now;
  }
  in_prev_ = in.recv_checks;
  out_prev_ = res.out_checks;

  std::vector<BitVector> signals{res.logic_signal};
  signals.insert(signals.end(), res.input_signals.begin(), res.input_signals.end());
  if (ram_) {
    RamRequest req = in.ram.value_or(RamRequest{});
    ram_faults_ = tamper.ram_check_faults;
    RamResult rr = ram_->cycle(req.op, req.addr, req.data, tamper.ram);
    ram_faults_.clear();
    std::uint64_t fold = 0;
    if (rr.symptom == RamSymptom::check_bits_incorrect) fold = rr.syndrome;
    else if (rr.symptom != RamSymptom::none) fold = ~std::uint64_t{0};
    if (r < 64) fold &= (std::uint64_t{1} << r) - 1;
    res.ram_signal = res.taps ^ BitVector::from_uint(fold, r);
    signals.push_back(*res.ram_signal);
    res.ram = rr;
  } else if (in.ram && in.ram->op != RamOp::idle) {
    throw Error(Errc::invalid_argument, "chip has no RAM");
  }
  res.error = combine_error_signals(res.taps, signals);
  lfsr_.step();
  ++cycle_;
  return res;
}

ChipCycleReport chip_cycle(ChipRuntime& chip, Monitor& monitor, const CycleInput& in, const ChipTamper& tamper) {
  ChipCycleReport rep;
  rep.result = chip.step(in, tamper);
  rep.monitor_attack = monitor.check(rep.result.error);
  return rep;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error(Errc::io, "SHA-256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text)) throw Error(Errc::io, "cannot write " + p.string());
}

std::string chip_header(const ProtectedChip& c) {
  std::ostringstream os;
  os << "tpad-chip 1\n"
     << "inputs " << c.f.inputs().size() << "\n"
     << "outputs " << c.f.outputs().size() << "\n"
     << "r " << c.r() << "\n"
     << "t " << c.t << "\n"
     << "pipeline " << (c.pipeline ? 1 : 0) << "\n"
     << "ram_addr_bits " << c.ram_addr_bits << "\n"
     << "ram_word_bits " << c.ram_word_bits << "\n"
     << "seed " << c.seed << "\n";
  auto groups = [&](const char* key, const std::vector<PortGroup>& gs) {
    for (const auto& g : gs) {
      os << key;
      for (std::size_t b : g.bits) os << ' ' << b;
      os << "\n";
    }
  };
  groups("input_group", c.in_groups);
  groups("output_group", c.out_groups);
  return os.str();
}

}  // namespace

void save_chip_bundle(const ProtectedChip& chip, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io, "cannot create " + dir.string() + ": " + ec.message());
  std::map<std::string, std::string> files{
      {"chip.txt", chip_header(chip)},
      {"f.net", serialize_netlist(chip.f)},
      {"check.net", serialize_obfuscated(chip.check)},
      {"check.cfg", write_config(chip.check.intended)},
      {"h_logic.mat", write_matrix(chip.h_logic)},
      {"lfsr.spec", write_lfsr_spec(chip.lfsr)},
  };
  for (std::size_t g = 0; g < chip.in_groups.size(); ++g)
    files["h_in" + std::to_string(g) + ".mat"] = write_matrix(chip.in_groups[g].h);
  for (std::size_t g = 0; g < chip.out_groups.size(); ++g)
    files["h_out" + std::to_string(g) + ".mat"] = write_matrix(chip.out_groups[g].h);
  if (chip.ram_check) {
    files["ram.net"] = serialize_obfuscated(*chip.ram_check);
    files["ram.cfg"] = write_config(chip.ram_check->intended);
    files["h_mem.mat"] = write_matrix(*chip.h_mem);
  }
  std::string manifest;
  for (const auto& [name, text] : files) {
    write_file(dir / name, text);
    manifest += sha256_hex(text) + "  " + name + "\n";
  }
  write_file(dir / "manifest.txt", manifest);
}

ProtectedChip load_chip_bundle(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  {
    std::istringstream man(read_file(dir / "manifest.txt"));
    std::string digest, name;
    while (man >> digest >> name) {
      if (name.find('/') != std::string::npos || name.find("..") != std::string::npos)
        throw Error(Errc::io, "bad manifest entry " + name);
      std::string text = read_file(dir / name);
      if (sha256_hex(text) != digest) throw Error(Errc::io, "digest mismatch for " + name);
      files[name] = std::move(text);
    }
  }
  auto need = [&](const std::string& name) -> const std::string& {
    auto it = files.find(name);
    if (it == files.end()) throw Error(Errc::io, "bundle manifest lacks " + name);
    return it->second;
  };

  std::map<std::string, std::string> header;
  std::vector<std::vector<std::size_t>> in_bits, out_bits;
  {
    std::istringstream hs(need("chip.txt"));
    std::string line;
    while (std::getline(hs, line)) {
      std::istringstream ls(line);
      std::string key;
      if (!(ls >> key)) continue;
      if (key == "input_group" || key == "output_group") {
        auto& dst = key == "input_group" ? in_bits : out_bits;
        dst.emplace_back();
        std::size_t b;
        while (ls >> b) dst.back().push_back(b);
        if (!ls.eof()) throw Error(Errc::io, "chip.txt: bad " + key + " line");
        continue;
      }
      std::string value;
      ls >> value;
      header[key] = value;
    }
    if (header["tpad-chip"] != "1") throw Error(Errc::io, "unsupported chip bundle version");
  }
  auto num = [&](const std::string& key) -> std::uint64_t {
    auto it = header.find(key);
    if (it == header.end()) throw Error(Errc::io, "chip.txt lacks " + key);
    try {
      return std::stoull(it->second);
    } catch (const std::exception&) {
      throw Error(Errc::io, "chip.txt: bad value for " + key);
    }
  };
  auto load_groups = [&](const std::vector<std::vector<std::size_t>>& bits, const char* base) {
    std::vector<PortGroup> gs;
    for (std::size_t g = 0; g < bits.size(); ++g)
      gs.push_back({bits[g], read_matrix(need(base + std::to_string(g) + ".mat"))});
    return gs;
  };

  ProtectedChip c{
      .f = parse_netlist(need("f.net")),
      .h_logic = read_matrix(need("h_logic.mat")),
      .in_groups = load_groups(in_bits, "h_in"),
      .out_groups = load_groups(out_bits, "h_out"),
      .h_mem = std::nullopt,
      .ram_addr_bits = num("ram_addr_bits"),
      .ram_word_bits = num("ram_word_bits"),
      .lfsr = read_lfsr_spec(need("lfsr.spec")),
      .pipeline = num("pipeline") != 0,
      .t = num("t"),
      .seed = num("seed"),
      .check = parse_obfuscated(need("check.net"), need("check.cfg")),
      .ram_check = std::nullopt,
  };
  if (c.ram_addr_bits > 0) {
    c.h_mem = read_matrix(need("h_mem.mat"));
    c.ram_check = parse_obfuscated(need("ram.net"), need("ram.cfg"));
  }
  const std::size_t r = c.r();
  bool ok = num("r") == r && c.h_logic.r() == r && c.h_logic.k() == c.f.outputs().size() &&
            num("inputs") == c.f.inputs().size() && num("outputs") == c.f.outputs().size() &&
            !c.in_groups.empty() && !c.out_groups.empty() &&
            (!c.h_mem || (c.h_mem->r() == r && c.h_mem->k() == c.ram_addr_bits + c.ram_word_bits));
  auto groups_ok = [&](const std::vector<PortGroup>& gs, std::size_t width) {
    std::vector<int> seen(width, 0);
    for (const auto& g : gs) {
      if (g.h.r() != r || g.h.k() != g.bits.size()) return false;
      for (std::size_t b : g.bits)
        if (b >= width || seen[b]++) return false;
    }
    return std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; });
  };
  ok = ok && groups_ok(c.in_groups, c.f.inputs().size()) && groups_ok(c.out_groups, c.f.outputs().size());
  if (!ok) throw Error(Errc::width_mismatch, "chip bundle components disagree on dimensions");
  return c;
}

}  // namespace tpad
