#include "tpad/harness.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "tpad/error.hpp"
#include "tpad/switchbox.hpp"

namespace tpad {

namespace {

BitVector random_bits(std::size_t width, Rng& rng) {
  BitVector v(width);
  for (std::size_t i = 0; i < width; ++i) v.set(i, rng.coin());
  return v;
}

[[noreturn]] void topology_error(const std::string& msg) { throw Error(Errc::topology, msg); }

std::vector<std::vector<std::size_t>> groups_or_all(const std::vector<std::vector<std::size_t>>& groups,
                                                    std::size_t width) {
  if (!groups.empty()) return groups;
  std::vector<std::size_t> all(width);
  for (std::size_t i = 0; i < width; ++i) all[i] = i;
  return {all};
}

std::uint64_t earliest_cycle(const Trigger& t) {
  switch (t.kind) {
    case Trigger::Kind::at_cycle:
    case Trigger::Kind::after_cycle:
      return t.cycle;
    default:
      return 0;
  }
}

}  // namespace

std::uint64_t RunReport::total_reports() const {
  std::uint64_t n = 0;
  for (const auto& m : monitors) n += m.reports.size();
  return n;
}

void validate_topology(const SystemTopology& topo) {
  std::set<std::pair<std::size_t, std::size_t>> driven;
  for (std::size_t c = 0; c < topo.channels.size(); ++c) {
    const Channel& ch = topo.channels[c];
    const std::string where = "channel " + std::to_string(c);
    if (ch.from >= topo.chips.size() || ch.to >= topo.chips.size()) topology_error(where + " names an unknown chip");
    const ProtectedChip& s = topo.chips[ch.from];
    const ProtectedChip& d = topo.chips[ch.to];
    if (ch.out_group >= s.out_groups.size()) topology_error(where + ": sender has no such output group");
    if (ch.in_group >= d.in_groups.size()) topology_error(where + ": receiver has no such input group");
    const PortGroup& og = s.out_groups[ch.out_group];
    const PortGroup& ig = d.in_groups[ch.in_group];
    if (og.bits.size() != ig.bits.size()) topology_error(where + ": group widths differ");
    if (!(og.h == ig.h)) topology_error(where + ": receiver does not use the sender's code");
    if (!driven.insert({ch.to, ch.in_group}).second) topology_error(where + ": input group driven twice");
  }
}

SystemTopology build_system(const SystemDesign& design, std::uint64_t seed) {
  const std::size_t n = design.chips.size();
  std::vector<ChipOptions> opts;
  for (const auto& c : design.chips) opts.push_back(c.options);

  for (std::size_t i = 0; i < n; ++i) {
    const auto groups = groups_or_all(opts[i].output_groups, design.chips[i].f.outputs().size());
    opts[i].output_codes.resize(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (!opts[i].output_codes[g])
        opts[i].output_codes[g] = sample_parity_code(groups[g].size(), design.r, derive_seed(derive_seed(seed, 100 + i), g));
    }
  }
  for (std::size_t c = 0; c < design.channels.size(); ++c) {
    const Channel& ch = design.channels[c];
    if (ch.from >= n || ch.to >= n) topology_error("channel " + std::to_string(c) + " names an unknown chip");
    if (ch.out_group >= opts[ch.from].output_codes.size())
      topology_error("channel " + std::to_string(c) + ": sender has no such output group");
    auto& codes = opts[ch.to].input_codes;
    if (codes.size() <= ch.in_group) codes.resize(ch.in_group + 1);
    codes[ch.in_group] = opts[ch.from].output_codes[ch.out_group];
  }

  SystemTopology topo;
  topo.channels = design.channels;
  for (std::size_t i = 0; i < n; ++i) {
    try {
      topo.chips.push_back(build_protected_chip(design.chips[i].f, default_lfsr_spec(design.r, derive_seed(seed, 200 + i)),
                                                derive_seed(seed, i), opts[i]));
    } catch (const Error& e) {
      if (e.code() == Errc::width_mismatch) topology_error("chip " + std::to_string(i) + ": " + e.what());
      throw;
    }
  }
  validate_topology(topo);
  return topo;
}

SystemTopology build_pipeline(const std::vector<Netlist>& stages, std::size_t r, std::uint64_t seed,
                              const ChipOptions& options) {
  SystemDesign d;
  d.r = r;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    d.chips.push_back({stages[i], options});
    if (i > 0) {
      if (stages[i - 1].outputs().size() != stages[i].inputs().size())
        topology_error("stage " + std::to_string(i) + " input width differs from the previous stage's outputs");
      d.channels.push_back({i - 1, 0, i, 0});
    }
  }
  return build_system(d, seed);
}

std::string config_digest(const SystemTopology& topo, std::uint64_t seed) {
  std::ostringstream os;
  os << "seed " << seed << '\n';
  for (const auto& ch : topo.channels) os << "channel " << ch.from << ' ' << ch.out_group << ' ' << ch.to << ' ' << ch.in_group << '\n';
  for (std::size_t i = 0; i < topo.chips.size(); ++i) {
    const ProtectedChip& c = topo.chips[i];
    os << "chip " << i << " seed " << c.seed << " t " << c.t << " pipeline " << c.pipeline << " ram " << c.ram_addr_bits
       << ' ' << c.ram_word_bits << '\n';
    os << serialize_netlist(c.f) << write_matrix(c.h_logic) << write_lfsr_spec(c.lfsr);
    for (const auto* groups : {&c.in_groups, &c.out_groups}) {
      for (const auto& g : *groups) {
        for (std::size_t b : g.bits) os << b << ' ';
        os << '\n' << write_matrix(g.h);
      }
    }
    if (c.h_mem) os << write_matrix(*c.h_mem);
    os << serialize_obfuscated(c.check) << write_config(c.check.intended);
    if (c.ram_check) os << serialize_obfuscated(*c.ram_check) << write_config(c.ram_check->intended);
  }
  return sha256_hex(os.str());
}

RunReport run_system(const SystemTopology& topo, const std::vector<SystemAttack>& attacks, const RunOptions& options,
                     const Stimulus& stimulus) {
  validate_topology(topo);
  const std::size_t n = topo.chips.size();
  for (const auto& a : attacks)
    if (a.chip >= n) topology_error("attack names unknown chip " + std::to_string(a.chip));

  // Keys: every receiver starts from its sender's key.
  std::vector<SessionKeys> keys;
  for (std::size_t i = 0; i < n; ++i) keys.push_back(draw_session_keys(topo.chips[i], derive_seed(options.seed, i)));
  std::vector<std::vector<std::optional<Channel>>> driver(n);
  for (std::size_t i = 0; i < n; ++i) driver[i].resize(topo.chips[i].in_groups.size());
  std::vector<std::vector<bool>> consumed(n);
  for (std::size_t i = 0; i < n; ++i) consumed[i].assign(topo.chips[i].out_groups.size(), false);
  for (const auto& ch : topo.channels) {
    keys[ch.to].input_prev[ch.in_group] = keys[ch.from].output_prev[ch.out_group];
    driver[ch.to][ch.in_group] = ch;
    consumed[ch.from][ch.out_group] = true;
  }

  std::vector<std::vector<AttackDescriptor>> per_chip(n);
  for (const auto& a : attacks) per_chip[a.chip].push_back(a.attack);
  std::vector<std::unique_ptr<InjectedChip>> chips;
  for (std::size_t i = 0; i < n; ++i)
    chips.push_back(std::make_unique<InjectedChip>(topo.chips[i], keys[i], per_chip[i],
                                                   derive_seed(derive_seed(options.seed, 1000), i)));

  std::vector<Monitor> monitors;
  for (const auto& c : topo.chips) monitors.emplace_back(c.lfsr);

  // Trusted senders for primary input groups, trusted receivers for primary
  // output groups.
  std::vector<std::vector<std::optional<OutputEncoderState>>> senders(n);
  std::vector<std::vector<std::optional<InputDecoderState>>> receivers(n);
  RunReport rep;
  rep.cycles = options.cycles;
  rep.seed = options.seed;
  for (std::size_t i = 0; i < n; ++i) rep.monitors.push_back({"chip" + std::to_string(i), {}});
  std::vector<std::vector<std::size_t>> receiver_slot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = topo.chips[i];
    for (std::size_t g = 0; g < c.in_groups.size(); ++g) {
      senders[i].emplace_back();
      if (!driver[i][g]) senders[i][g] = OutputEncoderState{c.in_groups[g].h, keys[i].input_prev[g]};
    }
    receiver_slot[i].assign(c.out_groups.size(), 0);
    for (std::size_t g = 0; g < c.out_groups.size(); ++g) {
      receivers[i].emplace_back();
      if (!consumed[i][g]) {
        receivers[i][g] = InputDecoderState{c.out_groups[g].h, keys[i].output_prev[g]};
        receiver_slot[i][g] = rep.monitors.size();
        rep.monitors.push_back({"out" + std::to_string(i) + "." + std::to_string(g), {}});
      }
    }
  }

  // Channel registers hold last cycle's word; the reset word is valid and
  // leaves the receiver's state unchanged.
  struct Word {
    BitVector data;
    BitVector check;
  };
  std::vector<std::vector<Word>> last(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t g = 0; g < topo.chips[i].out_groups.size(); ++g)
      last[i].push_back({BitVector(topo.chips[i].out_groups[g].bits.size()), keys[i].output_prev[g]});
  }

  std::vector<std::optional<std::uint64_t>> chip_active(n);
  std::vector<std::vector<std::uint64_t>> chip_active_cycles(n);
  std::vector<Rng> stim;
  for (std::size_t i = 0; i < n; ++i) stim.emplace_back(derive_seed(derive_seed(options.seed, 2000), i));

  for (std::uint64_t cyc = 0; cyc < options.cycles; ++cyc) {
    std::vector<std::vector<Word>> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      const ProtectedChip& c = topo.chips[i];
      CycleInput in;
      in.inputs = stimulus ? stimulus(i, cyc, stim[i]) : random_bits(c.f.inputs().size(), stim[i]);
      if (in.inputs.width() != c.f.inputs().size())
        throw Error(Errc::width_mismatch, "stimulus width for chip " + std::to_string(i));
      in.recv_checks.resize(c.in_groups.size());
      for (std::size_t g = 0; g < c.in_groups.size(); ++g) {
        const auto& bits = c.in_groups[g].bits;
        if (const auto& ch = driver[i][g]) {
          const Word& w = last[ch->from][ch->out_group];
          for (std::size_t b = 0; b < bits.size(); ++b) in.inputs.set(bits[b], w.data[b]);
          in.recv_checks[g] = w.check;
        } else {
          in.recv_checks[g] = encode_outputs(*senders[i][g], select_bits(in.inputs, bits));
        }
      }
      if (c.has_ram()) {
        Rng& rng = stim[i];
        in.ram = RamRequest{static_cast<RamOp>(rng.below(3)), rng.below(std::uint64_t{1} << c.ram_addr_bits),
                            rng.below(std::uint64_t{1} << c.ram_word_bits)};
      }
      InjectedChip::Step s = chips[i]->step(in);
      if (s.attack_active) {
        if (!chip_active[i]) chip_active[i] = cyc;
        chip_active_cycles[i].push_back(cyc);
      }
      const bool mon = monitors[i].check(s.result.error);
      if (mon) rep.monitors[i].reports.push_back(cyc);
      for (std::size_t g = 0; g < c.out_groups.size(); ++g) {
        BitVector data = select_bits(s.result.outputs, c.out_groups[g].bits);
        if (receivers[i][g]) {
          if (decode_inputs(*receivers[i][g], data, s.result.out_checks[g]).attack)
            rep.monitors[receiver_slot[i][g]].reports.push_back(cyc);
        }
        next[i].push_back({std::move(data), s.result.out_checks[g]});
      }
      if (options.trace) rep.trace.push_back({cyc, i, in.inputs, s.result.outputs, mon, s.attack_active});
    }
    last = std::move(next);
  }

  // Outcomes.
  std::optional<std::uint64_t> earliest_activity;
  for (std::size_t a = 0; a < attacks.size(); ++a) {
    const auto& sa = attacks[a];
    AttackOutcome out;
    out.chip = sa.chip;
    out.attack = format_attack(sa.attack);
    const std::uint64_t from = earliest_cycle(sa.attack.trigger);
    const auto& act = chip_active_cycles[sa.chip];
    auto it = std::lower_bound(act.begin(), act.end(), from);
    if (it != act.end()) out.first_active = *it;
    if (out.first_active) {
      if (!earliest_activity || *out.first_active < *earliest_activity) earliest_activity = out.first_active;
      for (const auto& m : rep.monitors) {
        auto r = std::lower_bound(m.reports.begin(), m.reports.end(), *out.first_active);
        if (r == m.reports.end()) continue;
        out.detected_by.push_back(m.name);
        if (!out.first_detect || *r < *out.first_detect) out.first_detect = *r;
      }
    }
    const std::string kind(to_string(sa.attack.kind));
    const bool detected = out.first_detect.has_value();
    ++rep.aggregate.trials;
    rep.aggregate.detected += detected;
    auto& [kt, kd] = rep.aggregate.per_kind[kind];
    ++kt;
    kd += detected;
    rep.aggregate.records.push_back({a, kind, detected, out.first_detect});
    rep.attacks.push_back(std::move(out));
  }
  rep.aggregate.clean_trials = 1;
  for (const auto& m : rep.monitors) {
    if (!m.reports.empty() && (!earliest_activity || m.reports.front() < *earliest_activity)) {
      rep.aggregate.false_positives = 1;
      break;
    }
  }
  rep.config_digest = config_digest(topo, options.seed);
  return rep;
}

std::string trace_csv(const RunReport& report) {
  std::ostringstream os;
  os << "cycle,chip,inputs,outputs,attack_active,monitor_attack\n";
  for (const auto& t : report.trace)
    os << t.cycle << ',' << t.chip << ',' << t.inputs.to_string() << ',' << t.outputs.to_string() << ','
       << (t.attack_active ? 1 : 0) << ',' << (t.monitor_attack ? 1 : 0) << '\n';
  return os.str();
}

std::string format_report(const RunReport& report) {
  std::ostringstream os;
  os << "cycles " << report.cycles << " seed " << report.seed << "\nconfig " << report.config_digest << '\n';
  for (const auto& m : report.monitors) {
    os << m.name << ": " << m.reports.size() << " reports";
    if (!m.reports.empty()) os << ", first at cycle " << m.reports.front();
    os << '\n';
  }
  for (const auto& a : report.attacks) {
    os << "attack on chip" << a.chip << " [" << a.attack << "]: ";
    if (!a.first_active)
      os << "never active\n";
    else if (!a.first_detect)
      os << "active from " << *a.first_active << ", undetected\n";
    else {
      os << "active from " << *a.first_active << ", detected at " << *a.first_detect << " by";
      for (const auto& d : a.detected_by) os << ' ' << d;
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace tpad
