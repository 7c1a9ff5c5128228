#include "tpad/attack.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "tpad/error.hpp"

namespace tpad {

namespace {

constexpr std::array<std::pair<AttackKind, std::string_view>, 7> kKindNames{{
    {AttackKind::pin, "pin"},
    {AttackKind::logic, "logic"},
    {AttackKind::electrical, "electrical"},
    {AttackKind::reliability, "reliability"},
    {AttackKind::decoupling_stored_state, "decoupling_stored_state"},
    {AttackKind::decoupling_parity_null, "decoupling_parity_null"},
    {AttackKind::decoupling_fft_zero, "decoupling_fft_zero"},
}};

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

struct Token {
  std::string_view text;
  int column;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size() || line[i] == '#') break;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

[[noreturn]] void bad(const Token& tok, const std::string& msg) {
  throw SyntaxError(1, tok.column, msg + " '" + std::string(tok.text) + "'");
}

// channel[g]:i
void parse_pin(const Token& tok, std::string_view spec, AttackTarget& t) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) bad(tok, "pin target needs <channel>:<index>");
  std::string_view ch = spec.substr(0, colon);
  if (!parse_number(spec.substr(colon + 1), t.index)) bad(tok, "bad pin index in");
  auto strip = [&](std::string_view base) {
    if (!ch.starts_with(base)) return false;
    std::string_view g = ch.substr(base.size());
    if (g.empty()) return true;
    if (!parse_number(g, t.group)) bad(tok, "bad pin group in");
    return true;
  };
  t.kind = AttackTarget::Kind::pin;
  if (ch == "in") {
    t.channel = PinChannel::in;
  } else if (ch == "out") {
    t.channel = PinChannel::out;
  } else if (strip("ocheck")) {
    t.channel = PinChannel::ocheck;
  } else if (strip("check")) {
    t.channel = PinChannel::check;
  } else {
    bad(tok, "unknown pin channel in");
  }
}

AttackTarget parse_target(const Token& tok) {
  std::string_view s = tok.text;
  AttackTarget t;
  if (s == "ram") {
    t.kind = AttackTarget::Kind::ram;
  } else if (s == "chip") {
    t.kind = AttackTarget::Kind::chip;
  } else if (s == "fft") {
    t.kind = AttackTarget::Kind::fft;
  } else if (s.starts_with("gate=")) {
    s.remove_prefix(5);
    t.kind = AttackTarget::Kind::f_wire;
    if (s.starts_with("f:")) {
      s.remove_prefix(2);
    } else if (s.starts_with("check:")) {
      s.remove_prefix(6);
      t.kind = AttackTarget::Kind::check_wire;
    } else if (s.starts_with("ram:")) {
      s.remove_prefix(4);
      t.kind = AttackTarget::Kind::ram_wire;
    }
    if (s.empty()) bad(tok, "empty wire name in");
    t.wire = std::string(s);
  } else if (s.starts_with("pin=")) {
    parse_pin(tok, s.substr(4), t);
  } else {
    bad(tok, "unknown target");
  }
  return t;
}

Trigger parse_trigger(const Token& tok) {
  std::string_view s = tok.text;
  if (!s.starts_with("trigger=")) bad(tok, "expected trigger=..., got");
  s.remove_prefix(8);
  Trigger tr;
  if (s == "always") return tr;
  auto colon = s.find(':');
  if (colon == std::string_view::npos) bad(tok, "unknown trigger");
  std::string_view kind = s.substr(0, colon), arg = s.substr(colon + 1);
  if (kind == "at_cycle" || kind == "after_cycle") {
    tr.kind = kind == "at_cycle" ? Trigger::Kind::at_cycle : Trigger::Kind::after_cycle;
    if (!parse_number(arg, tr.cycle)) bad(tok, "bad cycle in");
  } else if (kind == "random") {
    tr.kind = Trigger::Kind::random;
    if (!parse_number(arg, tr.probability) || !(tr.probability >= 0.0 && tr.probability <= 1.0))
      bad(tok, "probability must be in [0, 1] in");
  } else {
    bad(tok, "unknown trigger");
  }
  return tr;
}

bool is_fault_payload(Payload p) { return p == Payload::flip || p == Payload::stuck0 || p == Payload::stuck1; }

// Which payload/target pairs each kind accepts.
bool combination_ok(const AttackDescriptor& a) {
  using K = AttackTarget::Kind;
  const K t = a.target.kind;
  switch (a.kind) {
    case AttackKind::pin: return t == K::pin && is_fault_payload(a.payload);
    case AttackKind::logic:
    case AttackKind::electrical:
    case AttackKind::reliability:
      if (t == K::ram) return a.payload == Payload::ram_trojan;
      if (t == K::chip) return a.payload == Payload::stuck0 || a.payload == Payload::stuck1;
      return (t == K::f_wire || t == K::check_wire || t == K::ram_wire) && is_fault_payload(a.payload);
    case AttackKind::decoupling_stored_state: return t == K::chip && a.payload == Payload::replay;
    case AttackKind::decoupling_parity_null: return t == K::chip && a.payload == Payload::zero;
    case AttackKind::decoupling_fft_zero: return t == K::fft && a.payload == Payload::zero;
  }
  return false;
}

FaultMode fault_mode(Payload p) {
  switch (p) {
    case Payload::stuck0: return FaultMode::stuck0;
    case Payload::stuck1: return FaultMode::stuck1;
    default: return FaultMode::flip;
  }
}

void apply_bit(BitVector& v, std::size_t i, Payload p) {
  if (p == Payload::flip) {
    v.flip(i);
  } else {
    v.set(i, p == Payload::stuck1);
  }
}

BitVector filled(std::size_t width, bool one) {
  BitVector v(width);
  if (one)
    for (std::size_t i = 0; i < width; ++i) v.set(i, true);
  return v;
}

BitVector random_bits(std::size_t width, Rng& rng) {
  BitVector v(width);
  for (std::size_t i = 0; i < width; ++i) v.set(i, rng.coin());
  return v;
}

}  // namespace

std::string_view to_string(AttackKind k) {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

std::string_view to_string(Payload p) {
  switch (p) {
    case Payload::flip: return "flip";
    case Payload::stuck0: return "stuck0";
    case Payload::stuck1: return "stuck1";
    case Payload::replay: return "replay";
    case Payload::zero: return "zero";
    case Payload::ram_trojan: return "ram_trojan";
  }
  return "?";
}

bool Trigger::fires(std::uint64_t now, Rng& rng) const {
  switch (kind) {
    case Kind::always: return true;
    case Kind::at_cycle: return now == cycle;
    case Kind::after_cycle: return now >= cycle;
    case Kind::random: return rng.bernoulli(probability);
  }
  return false;
}

AttackDescriptor parse_attack(std::string_view line) {
  auto toks = tokenize(line);
  if (toks.size() < 3 || toks.size() > 4)
    throw SyntaxError(1, toks.empty() ? 1 : toks.back().column,
                      "expected '<kind> <payload> <target> [trigger=...]'");
  AttackDescriptor a;
  bool kind_found = false;
  for (const auto& [kind, name] : kKindNames) {
    if (name == toks[0].text) {
      a.kind = kind;
      kind_found = true;
    }
  }
  if (!kind_found) bad(toks[0], "unknown attack kind");

  std::string_view p = toks[1].text;
  if (p == "flip") {
    a.payload = Payload::flip;
  } else if (p == "stuck0") {
    a.payload = Payload::stuck0;
  } else if (p == "stuck1") {
    a.payload = Payload::stuck1;
  } else if (p == "zero") {
    a.payload = Payload::zero;
  } else if (p.starts_with("replay:")) {
    a.payload = Payload::replay;
    if (!parse_number(p.substr(7), a.replay_depth) || a.replay_depth == 0) bad(toks[1], "replay depth must be >= 1 in");
  } else if (auto t = ram_trojan_from_string(p); t && *t != RamTrojan::none) {
    a.payload = Payload::ram_trojan;
    a.ram_trojan = *t;
  } else {
    bad(toks[1], "unknown payload");
  }

  a.target = parse_target(toks[2]);
  if (toks.size() == 4) a.trigger = parse_trigger(toks[3]);
  if (!combination_ok(a))
    throw SyntaxError(1, toks[1].column,
                      std::string(to_string(a.kind)) + " attack cannot use payload '" + std::string(p) +
                          "' with target '" + std::string(toks[2].text) + "'");
  return a;
}

std::vector<AttackDescriptor> parse_attack_file(std::string_view text) {
  std::vector<AttackDescriptor> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (tokenize(line).empty()) continue;
    try {
      out.push_back(parse_attack(line));
    } catch (const SyntaxError& e) {
      std::string msg = e.what();
      // Drop the single-line position prefix; the file position replaces it.
      auto colon = msg.find(": ");
      throw SyntaxError(line_no, e.column(), colon == std::string::npos ? msg : msg.substr(colon + 2));
    }
  }
  return out;
}

std::string format_attack(const AttackDescriptor& a) {
  std::ostringstream os;
  os << to_string(a.kind) << ' ';
  switch (a.payload) {
    case Payload::replay: os << "replay:" << a.replay_depth; break;
    case Payload::ram_trojan: os << to_string(a.ram_trojan); break;
    default: os << to_string(a.payload); break;
  }
  os << ' ';
  const AttackTarget& t = a.target;
  switch (t.kind) {
    case AttackTarget::Kind::f_wire: os << "gate=f:" << t.wire; break;
    case AttackTarget::Kind::check_wire: os << "gate=check:" << t.wire; break;
    case AttackTarget::Kind::ram_wire: os << "gate=ram:" << t.wire; break;
    case AttackTarget::Kind::pin: {
      os << "pin=";
      switch (t.channel) {
        case PinChannel::in: os << "in"; break;
        case PinChannel::out: os << "out"; break;
        case PinChannel::check: os << "check" << t.group; break;
        case PinChannel::ocheck: os << "ocheck" << t.group; break;
      }
      os << ':' << t.index;
      break;
    }
    case AttackTarget::Kind::ram: os << "ram"; break;
    case AttackTarget::Kind::chip: os << "chip"; break;
    case AttackTarget::Kind::fft: os << "fft"; break;
  }
  switch (a.trigger.kind) {
    case Trigger::Kind::always: break;
    case Trigger::Kind::at_cycle: os << " trigger=at_cycle:" << a.trigger.cycle; break;
    case Trigger::Kind::after_cycle: os << " trigger=after_cycle:" << a.trigger.cycle; break;
    case Trigger::Kind::random: {
      std::array<char, 32> buf{};
      auto res = std::to_chars(buf.data(), buf.data() + buf.size(), a.trigger.probability);
      os << " trigger=random:" << std::string_view(buf.data(), static_cast<std::size_t>(res.ptr - buf.data()));
      break;
    }
  }
  return os.str();
}

namespace {

std::optional<WireId> resolve_wire(const AttackDescriptor& a, const ProtectedChip& chip) {
  const AttackTarget& t = a.target;
  auto missing = [&](std::string_view where) -> Error {
    return Error(Errc::unknown_target, "no wire '" + t.wire + "' in " + std::string(where));
  };
  switch (t.kind) {
    case AttackTarget::Kind::f_wire: {
      auto w = chip.f.find_wire(t.wire);
      if (!w) throw missing("the function netlist");
      return w;
    }
    case AttackTarget::Kind::check_wire: {
      auto w = chip.check.netlist.find_wire(t.wire);
      if (!w) throw missing("the checking netlist");
      return w;
    }
    case AttackTarget::Kind::ram_wire: {
      if (!chip.ram_check) throw Error(Errc::unknown_target, "chip has no RAM");
      auto w = chip.ram_check->netlist.find_wire(t.wire);
      if (!w) throw missing("the RAM checking netlist");
      return w;
    }
    default: return std::nullopt;
  }
}

}  // namespace

void validate_attack(const AttackDescriptor& a, const ProtectedChip& chip) {
  if (!combination_ok(a)) throw Error(Errc::invalid_argument, "payload does not fit the attack kind and target");
  const AttackTarget& t = a.target;
  auto out_of_range = [](const std::string& what) { return Error(Errc::unknown_target, what + " out of range"); };
  switch (t.kind) {
    case AttackTarget::Kind::f_wire:
    case AttackTarget::Kind::check_wire:
    case AttackTarget::Kind::ram_wire: resolve_wire(a, chip); break;
    case AttackTarget::Kind::pin:
      switch (t.channel) {
        case PinChannel::in:
          if (t.index >= chip.f.inputs().size()) throw out_of_range("input pin " + std::to_string(t.index));
          break;
        case PinChannel::out:
          if (t.index >= chip.f.outputs().size()) throw out_of_range("output pin " + std::to_string(t.index));
          break;
        case PinChannel::check:
          if (t.group >= chip.in_groups.size()) throw out_of_range("input group " + std::to_string(t.group));
          if (t.index >= chip.r()) throw out_of_range("check pin " + std::to_string(t.index));
          break;
        case PinChannel::ocheck:
          if (t.group >= chip.out_groups.size()) throw out_of_range("output group " + std::to_string(t.group));
          if (t.index >= chip.r()) throw out_of_range("check pin " + std::to_string(t.index));
          break;
      }
      break;
    case AttackTarget::Kind::ram:
      if (!chip.has_ram()) throw Error(Errc::unknown_target, "chip has no RAM");
      break;
    case AttackTarget::Kind::chip: break;
    case AttackTarget::Kind::fft: throw Error(Errc::unknown_target, "fft target does not exist on a logic chip");
  }
}

InjectedChip::InjectedChip(const ProtectedChip& chip, const SessionKeys& keys, std::vector<AttackDescriptor> attacks,
                           std::uint64_t seed)
    : chip_(&chip), rt_(chip, keys), rng_(seed), last_sent_checks_(keys.output_prev) {
  for (auto& a : attacks) {
    validate_attack(a, chip);
    auto wire = resolve_wire(a, chip);
    attacks_.push_back({std::move(a), wire});
  }
}

InjectedChip::Step InjectedChip::step(const CycleInput& honest) {
  const std::uint64_t now = rt_.cycle();
  CycleInput in = honest;
  ChipTamper tamper;
  Step out;
  std::vector<const AttackDescriptor*> output_side;
  std::size_t keep = 0;

  for (const Resolved& r : attacks_) {
    const AttackDescriptor& d = r.desc;
    if (d.payload == Payload::replay) keep = std::max(keep, d.replay_depth);
    if (!d.trigger.fires(now, rng_)) continue;
    const AttackTarget& t = d.target;
    switch (t.kind) {
      case AttackTarget::Kind::f_wire: tamper.f_faults.push_back({*r.wire, fault_mode(d.payload)}); break;
      case AttackTarget::Kind::check_wire: tamper.check_faults.push_back({*r.wire, fault_mode(d.payload)}); break;
      case AttackTarget::Kind::ram_wire: tamper.ram_check_faults.push_back({*r.wire, fault_mode(d.payload)}); break;
      case AttackTarget::Kind::pin:
        if (t.channel == PinChannel::in) {
          apply_bit(in.inputs, t.index, d.payload);
        } else if (t.channel == PinChannel::check) {
          apply_bit(in.recv_checks.at(t.group), t.index, d.payload);
        } else {
          output_side.push_back(&d);
        }
        break;
      case AttackTarget::Kind::ram: tamper.ram = RamFault{d.ram_trojan, 1, 1}; break;
      case AttackTarget::Kind::chip:
        if (d.payload == Payload::replay) {
          // Nothing stored yet: the attack cannot act this cycle.
          if (history_.size() < d.replay_depth) continue;
          const auto& [x, y] = history_[d.replay_depth - 1];
          tamper.ced_inputs = x;
          tamper.ced_outputs = y;
          tamper.output_override = random_bits(chip_->f.outputs().size(), rng_);
        } else {
          output_side.push_back(&d);
        }
        break;
      case AttackTarget::Kind::fft: break;
    }
    out.attack_active = true;
  }

  CycleResult res = rt_.step(in, tamper);
  if (keep > 0) {
    history_.emplace_front(in.inputs, res.f_outputs);
    while (history_.size() > keep) history_.pop_back();
  }

  for (const AttackDescriptor* d : output_side) {
    const AttackTarget& t = d->target;
    if (t.kind == AttackTarget::Kind::pin) {
      if (t.channel == PinChannel::out) {
        apply_bit(res.outputs, t.index, d->payload);
      } else {
        apply_bit(res.out_checks.at(t.group), t.index, d->payload);
      }
    } else if (d->payload == Payload::zero) {
      // Parity null: zero outputs paired with the last check bits sent, which
      // is exactly what an honest encoder emits for an all-zero word.
      res.outputs = BitVector(res.outputs.width());
      res.out_checks = last_sent_checks_;
    } else {
      const bool one = d->payload == Payload::stuck1;
      res.outputs = filled(res.outputs.width(), one);
      for (auto& c : res.out_checks) c = filled(c.width(), one);
      res.error = filled(res.error.width(), one);
    }
  }
  last_sent_checks_ = res.out_checks;
  out.result = std::move(res);
  return out;
}

InjectedChip inject(const ProtectedChip& chip, const AttackDescriptor& attack, const SessionKeys& keys,
                    std::uint64_t seed) {
  return InjectedChip(chip, keys, {attack}, seed);
}

TrialResult run_trial(const ProtectedChip& chip, const std::vector<AttackDescriptor>& attacks, std::size_t cycles,
                      std::uint64_t seed) {
  SessionKeys keys = draw_session_keys(chip, derive_seed(seed, 0));
  InjectedChip ic(chip, keys, attacks, derive_seed(seed, 1));
  Monitor monitor(chip.lfsr);
  std::vector<OutputEncoderState> senders;
  for (std::size_t g = 0; g < chip.in_groups.size(); ++g) senders.push_back({chip.in_groups[g].h, keys.input_prev[g]});
  std::vector<InputDecoderState> receivers;
  for (std::size_t g = 0; g < chip.out_groups.size(); ++g)
    receivers.push_back({chip.out_groups[g].h, keys.output_prev[g]});
  Evaluator reference(chip.f);
  Rng rng(derive_seed(seed, 2));

  TrialResult tr;
  const std::size_t n = chip.f.inputs().size();
  for (std::size_t c = 0; c < cycles; ++c) {
    CycleInput in;
    in.inputs = random_bits(n, rng);
    for (std::size_t g = 0; g < senders.size(); ++g)
      in.recv_checks.push_back(encode_outputs(senders[g], select_bits(in.inputs, chip.in_groups[g].bits)));
    if (chip.has_ram()) {
      in.ram = RamRequest{static_cast<RamOp>(rng.below(3)), rng.below(std::uint64_t{1} << chip.ram_addr_bits),
                          rng.below(std::uint64_t{1} << chip.ram_word_bits)};
    }
    InjectedChip::Step s = ic.step(in);
    const bool by_monitor = monitor.check(s.result.error);
    bool by_receiver = false;
    for (std::size_t g = 0; g < receivers.size(); ++g) {
      by_receiver |= decode_inputs(receivers[g], select_bits(s.result.outputs, chip.out_groups[g].bits),
                                   s.result.out_checks[g])
                         .attack;
    }
    tr.by_monitor |= by_monitor;
    tr.by_receiver |= by_receiver;
    if ((by_monitor || by_receiver) && !tr.detected) {
      tr.detected = true;
      tr.first_detect_cycle = c;
    }
    tr.attack_engaged |= reference.evaluate(in.inputs, {}).outputs != s.result.outputs;
  }
  return tr;
}

std::pair<double, double> DetectionReport::interval(double z) const {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = rate();
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Clamp so the point estimate always lies inside despite rounding.
  return {std::clamp(centre - half, 0.0, p), std::clamp(centre + half, p, 1.0)};
}

AttackGenerator logic_flip_generator() {
  return [](const ProtectedChip& chip, std::size_t cycles, Rng& rng) {
    const auto& outs = chip.f.outputs();
    const std::uint64_t cycle = rng.below(cycles);
    std::vector<AttackDescriptor> v;
    for (std::size_t i : rng.sample_without_replacement(outs.size(), 1 + rng.below(outs.size()))) {
      AttackDescriptor a;
      a.kind = AttackKind::logic;
      a.target.kind = AttackTarget::Kind::f_wire;
      a.target.wire = chip.f.wire_name(outs[i]);
      a.trigger = {Trigger::Kind::at_cycle, cycle, 1.0};
      v.push_back(std::move(a));
    }
    return v;
  };
}

AttackGenerator pin_flip_generator() {
  return [](const ProtectedChip& chip, std::size_t cycles, Rng& rng) {
    const std::size_t n = chip.f.inputs().size();
    const std::uint64_t cycle = rng.below(cycles);
    std::vector<AttackDescriptor> v;
    for (std::size_t i : rng.sample_without_replacement(n, 1 + rng.below(n))) {
      AttackDescriptor a;
      a.kind = AttackKind::pin;
      a.target.kind = AttackTarget::Kind::pin;
      a.target.channel = PinChannel::in;
      a.target.index = i;
      a.trigger = {Trigger::Kind::at_cycle, cycle, 1.0};
      v.push_back(std::move(a));
    }
    return v;
  };
}

AttackGenerator attack_free_generator() {
  return [](const ProtectedChip&, std::size_t, Rng&) { return std::vector<AttackDescriptor>{}; };
}

AttackGenerator fixed_generator(std::vector<AttackDescriptor> attacks) {
  return [attacks = std::move(attacks)](const ProtectedChip&, std::size_t, Rng&) { return attacks; };
}

DetectionReport run_campaign(const ProtectedChip& chip, const AttackGenerator& gen, const CampaignOptions& opts) {
  if (opts.cycles_per_trial == 0) throw Error(Errc::invalid_argument, "cycles_per_trial must be >= 1");
  DetectionReport rep;
  for (std::uint64_t t = 0; t < opts.trials; ++t) {
    Rng rng(derive_seed(opts.seed, 2 * t));
    auto attacks = gen(chip, opts.cycles_per_trial, rng);
    const std::uint64_t trial_seed = derive_seed(opts.seed, 2 * t + 1);
    TrialResult res = run_trial(chip, attacks, opts.cycles_per_trial, trial_seed);
    std::string kind = attacks.empty() ? "none" : std::string(to_string(attacks.front().kind));
    ++rep.trials;
    rep.detected += res.detected;
    auto& [k_trials, k_detected] = rep.per_kind[kind];
    ++k_trials;
    k_detected += res.detected;
    rep.records.push_back({t, kind, res.detected, res.first_detect_cycle});
    if (opts.paired_clean) {
      // Same stimulus and keys, no attack.
      ++rep.clean_trials;
      rep.false_positives += run_trial(chip, {}, opts.cycles_per_trial, trial_seed).detected;
    }
  }
  return rep;
}

std::string campaign_csv(const DetectionReport& report) {
  std::ostringstream os;
  os << "trial,attack_kind,detected,first_detect_cycle\n";
  for (const auto& r : report.records) {
    os << r.trial << ',' << r.kind << ',' << (r.detected ? 1 : 0) << ',';
    if (r.first_detect_cycle) os << *r.first_detect_cycle;
    os << '\n';
  }
  os << "summary,all," << report.detected << '/' << report.trials << ",false_positives=" << report.false_positives
     << '\n';
  return os.str();
}

DetectionEstimate uniform_weight_detection(std::size_t k, std::size_t r, std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw Error(Errc::invalid_argument, "trials must be >= 1");
  DetectionEstimate est;
  est.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    ParityCheckMatrix h = sample_parity_code(k, r, rng);
    // The codeword itself cancels out of the syndrome, so only the error
    // pattern is drawn.
    const std::size_t weight = 1 + static_cast<std::size_t>(rng.below(k + r));
    std::uint64_t syndrome = 0;
    for (std::size_t pos : rng.sample_without_replacement(k + r, weight))
      syndrome ^= pos < k ? h.column(pos) : std::uint64_t{1} << (pos - k);
    est.detected += syndrome != 0;
  }
  return est;
}

double cp_attack_probability(double theta, double x) {
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(Errc::invalid_argument, "theta must be in [0, 1]");
  if (!(x >= 0.0)) throw Error(Errc::invalid_argument, "switchbox count must be >= 0");
  return std::pow(1.0 - theta, x);
}

double per_sb_attack_probability(double p, double x) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::invalid_argument, "p must be in [0, 1]");
  if (!(x >= 0.0)) throw Error(Errc::invalid_argument, "switchbox count must be >= 0");
  return std::pow(p, x);
}

namespace {

bool symmetric(GateKind k) {
  return k == GateKind::And || k == GateKind::Or || k == GateKind::Xor || k == GateKind::Nand || k == GateKind::Nor;
}

bool matchable(GateKind k) { return k != GateKind::Const0 && k != GateKind::Const1 && k != GateKind::Dff; }

// Backtracking structural matcher of a fan-in subcircuit of f onto the
// checking netlist. Leaves outside the subcircuit bind to any wire, except
// primary inputs of f, which must bind to their predictor input.
class SubcircuitMatcher {
 public:
  SubcircuitMatcher(const Netlist& f, const Netlist& target, const std::unordered_set<GateId>& sub)
      : f_(f), t_(target), sub_(sub) {
    pi_index_.assign(f.wire_count(), -1);
    for (std::size_t i = 0; i < f.inputs().size(); ++i) pi_index_[f.inputs()[i]] = static_cast<std::int64_t>(i);
    ox_.resize(f.inputs().size());
    for (std::size_t i = 0; i < ox_.size(); ++i) ox_[i] = target.find_wire("ox" + std::to_string(i));
  }

  bool matches(WireId f_root, WireId t_root) const { return solve({{f_root, t_root}}, State{}); }

 private:
  struct State {
    std::unordered_map<GateId, GateId> gates;
    std::unordered_set<GateId> used;
    std::unordered_map<WireId, WireId> leaves;
  };

  bool solve(std::vector<std::pair<WireId, WireId>> pending, State st) const {
    if (pending.empty()) return true;
    const auto [fw, tw] = pending.back();
    pending.pop_back();
    const auto fg = f_.driver(fw);
    if (!fg || !sub_.count(*fg)) {
      if (!fg) {
        const auto& ox = ox_[static_cast<std::size_t>(pi_index_[fw])];
        if (!ox || *ox != tw) return false;
      }
      auto [it, fresh] = st.leaves.emplace(fw, tw);
      if (!fresh && it->second != tw) return false;
      return solve(std::move(pending), std::move(st));
    }
    const auto tg = t_.driver(tw);
    if (!tg) return false;
    if (auto it = st.gates.find(*fg); it != st.gates.end()) {
      return it->second == *tg && solve(std::move(pending), std::move(st));
    }
    if (st.used.count(*tg)) return false;
    const Gate& a = f_.gate(*fg);
    const Gate& b = t_.gate(*tg);
    if (a.kind != b.kind || a.inputs.size() != b.inputs.size()) return false;
    st.gates.emplace(*fg, *tg);
    st.used.insert(*tg);
    const std::size_t arity = a.inputs.size();
    for (int order = 0; order < (symmetric(a.kind) && arity == 2 ? 2 : 1); ++order) {
      auto next = pending;
      for (std::size_t i = 0; i < arity; ++i) next.emplace_back(a.inputs[i], b.inputs[order ? arity - 1 - i : i]);
      if (solve(std::move(next), st)) return true;
    }
    return false;
  }

  const Netlist& f_;
  const Netlist& t_;
  const std::unordered_set<GateId>& sub_;
  std::vector<std::int64_t> pi_index_;
  std::vector<std::optional<WireId>> ox_;
};

// Random connected fan-in subcircuit rooted at a random gate.
std::unordered_set<GateId> grow_subcircuit(const Netlist& f, GateId root, std::size_t size, Rng& rng) {
  std::unordered_set<GateId> sub{root};
  std::vector<GateId> frontier;
  auto extend = [&](GateId g) {
    for (WireId w : f.gate(g).inputs) {
      auto d = f.driver(w);
      if (d && matchable(f.gate(*d).kind) && !sub.count(*d) &&
          std::find(frontier.begin(), frontier.end(), *d) == frontier.end())
        frontier.push_back(*d);
    }
  };
  extend(root);
  while (sub.size() < size && !frontier.empty()) {
    std::size_t i = static_cast<std::size_t>(rng.below(frontier.size()));
    GateId g = frontier[i];
    frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(i));
    sub.insert(g);
    extend(g);
  }
  return sub;
}

}  // namespace

SubcircuitMatchReport subcircuit_match_attack(const ProtectedChip& chip, std::uint64_t trials, std::uint64_t seed,
                                              std::size_t max_gates, std::size_t cycles) {
  if (max_gates == 0) throw Error(Errc::invalid_argument, "max_gates must be >= 1");
  const Netlist& f = chip.f;
  const Netlist& target = chip.check.netlist;
  std::vector<GateId> roots;
  for (GateId g = 0; g < f.gates().size(); ++g)
    if (matchable(f.gate(g).kind)) roots.push_back(g);
  if (roots.empty()) throw Error(Errc::invalid_argument, "function netlist has no gates to match");

  SubcircuitMatchReport rep;
  for (std::uint64_t t = 0; t < trials; ++t) {
    ++rep.trials;
    Rng rng(derive_seed(seed, t));
    const GateId root = roots[rng.below(roots.size())];
    const std::size_t size = 1 + static_cast<std::size_t>(rng.below(max_gates));
    auto sub = grow_subcircuit(f, root, size, rng);
    SubcircuitMatcher matcher(f, target, sub);
    std::vector<GateId> partners;
    for (GateId g = 0; g < target.gates().size(); ++g) {
      if (target.gate(g).kind != f.gate(root).kind) continue;
      if (matcher.matches(f.gate(root).output, target.gate(g).output)) partners.push_back(g);
    }
    if (partners.empty()) continue;
    ++rep.matched;
    const GateId partner = partners[rng.below(partners.size())];

    AttackDescriptor in_f;
    in_f.kind = AttackKind::logic;
    in_f.target.kind = AttackTarget::Kind::f_wire;
    in_f.target.wire = f.wire_name(f.gate(root).output);
    AttackDescriptor in_check = in_f;
    in_check.target.kind = AttackTarget::Kind::check_wire;
    in_check.target.wire = target.wire_name(target.gate(partner).output);
    TrialResult res = run_trial(chip, {in_f, in_check}, cycles, derive_seed(seed, trials + t));
    rep.succeeded += res.attack_engaged && !res.detected;
  }
  return rep;
}

DecouplingCost decoupling_cost(const DecouplingDesign& d) {
  auto need = [](const std::optional<std::uint64_t>& v, const char* what) {
    if (!v) throw Error(Errc::invalid_argument, std::string("decoupling cost needs ") + what);
    return *v;
  };
  switch (d.kind) {
    case AttackKind::decoupling_parity_null:
      // One transmission gate pair per output bit, a register per check bit.
      return {2 * need(d.outputs, "the output count"), need(d.check_bits, "the check bit count")};
    case AttackKind::decoupling_stored_state: return {0, need(d.flip_flops, "the flip-flop count")};
    case AttackKind::decoupling_fft_zero: return {120 * need(d.fft_points, "the FFT size"), 0};
    default: throw Error(Errc::invalid_argument, "not a decoupling attack");
  }
}

bool exceeds_inspection_threshold(const DecouplingCost& c, std::uint64_t transistor_threshold,
                                  std::uint64_t flip_flop_threshold) {
  return c.transistors > transistor_threshold || c.flip_flops > flip_flop_threshold;
}

double destructive_detection_probability(std::uint64_t n, std::uint64_t a, std::uint64_t t) {
  if (a > n || t > n) throw Error(Errc::invalid_argument, "need a <= N and t <= N");
  if (a == 0 || t == 0) return 0.0;
  if (t > n - a) return 1.0;
  // C(N-a, t) / C(N, t) as a running product.
  double miss = 1.0;
  for (std::uint64_t i = 0; i < t && miss > 0.0; ++i)
    miss *= static_cast<double>(n - a - i) / static_cast<double>(n - i);
  return 1.0 - miss;
}

double destructive_detection_monte_carlo(std::uint64_t n, std::uint64_t a, std::uint64_t t, std::uint64_t trials,
                                         std::uint64_t seed) {
  if (a > n || t > n) throw Error(Errc::invalid_argument, "need a <= N and t <= N");
  if (trials == 0) throw Error(Errc::invalid_argument, "trials must be >= 1");
  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    // Chips 0..a-1 are the attacked ones.
    auto picked = rng.sample_without_replacement(n, t);
    hits += std::any_of(picked.begin(), picked.end(), [a](std::size_t c) { return c < a; });
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace tpad
