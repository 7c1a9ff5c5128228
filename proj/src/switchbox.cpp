#include "tpad/switchbox.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "tpad/error.hpp"
#include "tpad/random.hpp"

namespace tpad {

std::string_view to_string(SbState s) { return s == SbState::parallel ? "parallel" : "crossed"; }

SwitchboxWires switchbox_wires(const Netlist& n, const Switchbox& sb) {
  const Gate& a = n.gate(sb.first);
  const Gate& b = n.gate(sb.second);
  return {a.inputs.at(0), b.inputs.at(0), a.output, b.output};
}

namespace {

constexpr std::int64_t kNone = -1;

struct SbRec {
  GateId first;
  GateId second;
  bool crossed = false;
  bool dead = false;
  // Output-type SBs hand the driven wire's name to their first output so
  // downstream names stay stable; removal swaps the names back.
  bool names_swapped = false;
  std::string id;
};

// Mutable netlist used during insertion. Its wiring is always the intended
// one, so it computes the protected function at every step.
struct Work {
  std::string name;
  std::vector<std::string> names;
  std::vector<WireId> inputs;
  std::vector<Gate> gates;
  std::vector<WireId> outputs;
  std::vector<char> dead;
  std::vector<std::int64_t> sb_of;  // per gate: index into sbs, or kNone
  std::vector<SbRec> sbs;
  std::unordered_set<std::string> used;
  std::size_t fresh = 0;

  static Work from(const ObfuscatedNetlist& obf) {
    const Netlist& n = obf.netlist;
    Work w;
    w.name = n.name();
    w.names = n.wire_names();
    w.inputs = n.inputs();
    w.gates = n.gates();
    w.outputs = n.outputs();
    w.dead.assign(w.gates.size(), 0);
    w.sb_of.assign(w.gates.size(), kNone);
    w.used.insert(w.names.begin(), w.names.end());
    for (const auto& sb : obf.switchboxes) {
      SbRec rec{sb.first, sb.second, obf.intended.at(sb.id) == SbState::crossed, false, false, sb.id};
      if (rec.crossed) std::swap(w.gates[rec.first].inputs[0], w.gates[rec.second].inputs[0]);
      w.sb_of[rec.first] = w.sb_of[rec.second] = static_cast<std::int64_t>(w.sbs.size());
      w.sbs.push_back(std::move(rec));
    }
    return w;
  }

  WireId new_wire() {
    std::string candidate;
    do {
      candidate = "_sb" + std::to_string(fresh++);
    } while (used.count(candidate));
    used.insert(candidate);
    names.push_back(candidate);
    return static_cast<WireId>(names.size() - 1);
  }

  GateId add_buf(WireId in, WireId out) {
    gates.push_back(Gate{GateKind::Buf, {in}, out});
    dead.push_back(0);
    sb_of.push_back(kNone);
    return static_cast<GateId>(gates.size() - 1);
  }

  std::vector<std::int64_t> drivers() const {
    std::vector<std::int64_t> d(names.size(), kNone);
    for (GateId g = 0; g < gates.size(); ++g)
      if (!dead[g]) d[gates[g].output] = g;
    return d;
  }

  std::vector<std::vector<Sink>> sinks() const {
    std::vector<std::vector<Sink>> s(names.size());
    for (GateId g = 0; g < gates.size(); ++g) {
      if (dead[g]) continue;
      for (std::uint32_t p = 0; p < gates[g].inputs.size(); ++p) s[gates[g].inputs[p]].push_back({g, p});
    }
    return s;
  }

  bool is_plain(GateId g) const { return !dead[g] && sb_of[g] == kNone; }

  // Compacted netlist: dead gates and the wires they drove are dropped.
  // `swap` lists SB indices whose buffers exchange inputs. gate_map receives
  // old gate id -> new gate id for live gates.
  Netlist build(const std::vector<std::size_t>& swap, std::vector<GateId>* gate_map = nullptr) const {
    std::vector<Gate> g2 = gates;
    for (std::size_t s : swap) std::swap(g2[sbs[s].first].inputs[0], g2[sbs[s].second].inputs[0]);
    std::vector<char> keep(names.size(), 0);
    for (WireId w : inputs) keep[w] = 1;
    for (GateId g = 0; g < g2.size(); ++g)
      if (!dead[g]) keep[g2[g].output] = 1;
    std::vector<WireId> wmap(names.size(), 0);
    std::vector<std::string> new_names;
    for (WireId w = 0; w < names.size(); ++w) {
      if (!keep[w]) continue;
      wmap[w] = static_cast<WireId>(new_names.size());
      new_names.push_back(names[w]);
    }
    std::vector<Gate> new_gates;
    if (gate_map) gate_map->assign(g2.size(), 0);
    for (GateId g = 0; g < g2.size(); ++g) {
      if (dead[g]) continue;
      Gate ng = g2[g];
      for (auto& in : ng.inputs) in = wmap[in];
      ng.output = wmap[ng.output];
      if (gate_map) (*gate_map)[g] = static_cast<GateId>(new_gates.size());
      new_gates.push_back(std::move(ng));
    }
    std::vector<WireId> ins, outs;
    for (WireId w : inputs) ins.push_back(wmap[w]);
    for (WireId w : outputs) outs.push_back(wmap[w]);
    return Netlist(name, std::move(new_names), std::move(ins), std::move(new_gates), std::move(outs));
  }

  // True when no SB configuration can close a combinational loop: SB outputs
  // are treated as depending on both SB inputs.
  bool acyclic_all_configs() const {
    std::vector<std::vector<WireId>> deps(names.size());
    for (GateId g = 0; g < gates.size(); ++g) {
      if (dead[g]) continue;
      auto& d = deps[gates[g].output];
      d = gates[g].inputs;
      if (sb_of[g] != kNone) {
        const SbRec& sb = sbs[sb_of[g]];
        d = {gates[sb.first].inputs[0], gates[sb.second].inputs[0]};
      }
    }
    // Iterative DFS with colors.
    std::vector<std::uint8_t> color(names.size(), 0);
    for (WireId root = 0; root < names.size(); ++root) {
      if (color[root]) continue;
      std::vector<std::pair<WireId, std::size_t>> stack{{root, 0}};
      color[root] = 1;
      while (!stack.empty()) {
        auto& [w, i] = stack.back();
        if (i < deps[w].size()) {
          WireId next = deps[w][i++];
          if (color[next] == 1) return false;
          if (color[next] == 0) {
            color[next] = 1;
            stack.push_back({next, 0});
          }
        } else {
          color[w] = 2;
          stack.pop_back();
        }
      }
    }
    return true;
  }

  std::size_t add_sb(WireId x, WireId y, bool crossed) {
    WireId z = new_wire(), w = new_wire();
    GateId a = add_buf(x, z), b = add_buf(y, w);
    sb_of[a] = sb_of[b] = static_cast<std::int64_t>(sbs.size());
    sbs.push_back(SbRec{a, b, crossed, false, false, {}});
    return sbs.size() - 1;
  }

  void rewire_all(WireId from, WireId to, GateId except) {
    for (GateId g = 0; g < gates.size(); ++g) {
      if (dead[g] || g == except) continue;
      for (auto& in : gates[g].inputs)
        if (in == from) in = to;
    }
    for (auto& o : outputs)
      if (o == from) o = to;
  }

  void remove_sb(std::size_t s) {
    SbRec& sb = sbs[s];
    for (GateId g : {sb.first, sb.second}) {
      WireId in = gates[g].inputs[0], out = gates[g].output;
      dead[g] = 1;
      rewire_all(out, in, g);
    }
    if (sb.names_swapped) {
      std::swap(names[gates[sb.first].inputs[0]], names[gates[sb.first].output]);
      std::swap(names[gates[sb.second].inputs[0]], names[gates[sb.second].output]);
    }
    sb.dead = true;
  }

  ObfuscatedNetlist finish() {
    std::set<std::string> taken;
    for (const auto& sb : sbs)
      if (!sb.dead && !sb.id.empty()) taken.insert(sb.id);
    std::size_t next = 0;
    for (auto& sb : sbs) {
      if (sb.dead || !sb.id.empty()) continue;
      while (taken.count("sb" + std::to_string(next))) ++next;
      sb.id = "sb" + std::to_string(next++);
      taken.insert(sb.id);
    }
    std::vector<std::size_t> crossed;
    for (std::size_t s = 0; s < sbs.size(); ++s)
      if (!sbs[s].dead && sbs[s].crossed) crossed.push_back(s);
    std::vector<GateId> gmap;
    Netlist templ = build(crossed, &gmap);
    std::vector<Switchbox> out;
    SwitchboxConfig cfg;
    for (const auto& sb : sbs) {
      if (sb.dead) continue;
      out.push_back({sb.id, gmap[sb.first], gmap[sb.second]});
      cfg[sb.id] = sb.crossed ? SbState::crossed : SbState::parallel;
    }
    return make_obfuscated(std::move(templ), std::move(out), std::move(cfg));
  }
};

std::vector<std::size_t> cone_counts(const Netlist& intended, const std::vector<Switchbox>& sbs) {
  std::vector<std::size_t> counts;
  for (WireId o : intended.outputs()) {
    auto fan = fanin_gates(intended, o);
    std::unordered_set<GateId> in(fan.begin(), fan.end());
    std::size_t c = 0;
    for (const auto& sb : sbs) c += in.count(sb.first) || in.count(sb.second);
    counts.push_back(c);
  }
  return counts;
}

std::string counts_text(const std::vector<std::size_t>& c) {
  std::string s = "[";
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? ", " : "") + std::to_string(c[i]);
  return s + "]";
}

struct Neighborhood {
  std::vector<GateId> gates;
  std::vector<std::pair<WireId, Sink>> incoming;
  std::vector<WireId> outputs;
};

Neighborhood neighborhood(const Work& w, GateId v, const std::vector<std::int64_t>& drv,
                          const std::vector<std::vector<Sink>>& snk, const std::vector<char>& is_po) {
  std::set<GateId> members{v};
  for (WireId in : w.gates[v].inputs)
    if (drv[in] != kNone && w.is_plain(static_cast<GateId>(drv[in]))) members.insert(static_cast<GateId>(drv[in]));
  for (const Sink& s : snk[w.gates[v].output])
    if (w.is_plain(s.gate)) members.insert(s.gate);
  Neighborhood nb;
  nb.gates.assign(members.begin(), members.end());
  for (GateId g : nb.gates) {
    const Gate& gate = w.gates[g];
    for (std::uint32_t p = 0; p < gate.inputs.size(); ++p) {
      std::int64_t d = drv[gate.inputs[p]];
      if (d == kNone || !members.count(static_cast<GateId>(d))) nb.incoming.push_back({gate.inputs[p], Sink{g, p}});
    }
    bool leaves = is_po[gate.output] != 0;
    for (const Sink& s : snk[gate.output]) leaves = leaves || !members.count(s.gate);
    if (leaves) nb.outputs.push_back(gate.output);
  }
  return nb;
}

// Sorted fan-in counts of the neighbourhood's gates.
std::vector<std::size_t> degree_profile(const Work& w, const Neighborhood& nb) {
  std::vector<std::size_t> d;
  for (GateId g : nb.gates) d.push_back(w.gates[g].inputs.size());
  std::sort(d.begin(), d.end());
  return d;
}

bool disjoint(const Neighborhood& a, const Neighborhood& b) {
  for (GateId g : a.gates)
    if (std::binary_search(b.gates.begin(), b.gates.end(), g)) return false;
  return true;
}

bool outputs_of_same_sb(const Work& w, WireId x, WireId y, const std::vector<std::int64_t>& drv) {
  if (drv[x] == kNone || drv[y] == kNone) return false;
  std::int64_t a = w.sb_of[drv[x]], b = w.sb_of[drv[y]];
  return a != kNone && a == b;
}

// Step III on a copy; returns the indices of the new SBs.
std::vector<std::size_t> place_pair(Work& w, const Neighborhood& nv, const Neighborhood& nu, Rng& rng) {
  auto drv = w.drivers();
  std::vector<std::size_t> added;
  std::vector<std::size_t> in_order(nu.incoming.size()), out_order(nu.outputs.size());
  std::iota(in_order.begin(), in_order.end(), 0);
  std::iota(out_order.begin(), out_order.end(), 0);
  rng.shuffle(in_order);
  rng.shuffle(out_order);

  for (std::size_t i = 0; i < nv.incoming.size(); ++i) {
    auto [x, zs] = nv.incoming[i];
    auto [y, ws] = nu.incoming[in_order[i]];
    if (x == y || outputs_of_same_sb(w, x, y, drv)) continue;
    std::size_t s = w.add_sb(x, y, false);
    w.gates[zs.gate].inputs[zs.pin] = w.gates[w.sbs[s].first].output;
    w.gates[ws.gate].inputs[ws.pin] = w.gates[w.sbs[s].second].output;
    added.push_back(s);
  }
  for (std::size_t j = 0; j < nv.outputs.size(); ++j) {
    WireId s = nv.outputs[j], t = nu.outputs[out_order[j]];
    std::size_t k = w.add_sb(s, t, false);
    SbRec& sb = w.sbs[k];
    WireId z = w.gates[sb.first].output, wz = w.gates[sb.second].output;
    w.rewire_all(s, z, sb.first);
    w.rewire_all(t, wz, sb.second);
    std::swap(w.names[s], w.names[z]);
    std::swap(w.names[t], w.names[wz]);
    sb.names_swapped = true;
    added.push_back(k);
  }
  return added;
}

}  // namespace

ObfuscatedNetlist make_obfuscated(Netlist n) {
  std::vector<std::size_t> zeros(n.outputs().size(), 0);
  return ObfuscatedNetlist{std::move(n), {}, {}, std::move(zeros)};
}

ObfuscatedNetlist make_obfuscated(Netlist n, std::vector<Switchbox> switchboxes, SwitchboxConfig intended) {
  std::set<std::string> ids;
  std::set<GateId> used_gates;
  for (const auto& sb : switchboxes) {
    if (!ids.insert(sb.id).second) throw Error(Errc::invalid_argument, "duplicate switchbox id '" + sb.id + "'");
    if (sb.first >= n.gates().size() || sb.second >= n.gates().size())
      throw Error(Errc::index_out_of_range, "switchbox '" + sb.id + "' refers to an unknown gate");
    if (n.gate(sb.first).kind != GateKind::Buf || n.gate(sb.second).kind != GateKind::Buf)
      throw Error(Errc::invalid_argument, "switchbox '" + sb.id + "' is not a buffer pair");
    if (!used_gates.insert(sb.first).second || !used_gates.insert(sb.second).second)
      throw Error(Errc::invalid_argument, "switchbox '" + sb.id + "' shares a buffer");
    auto wires = switchbox_wires(n, sb);
    std::set<WireId> four{wires.x, wires.y, wires.z, wires.w};
    if (four.size() != 4) throw Error(Errc::invalid_argument, "switchbox '" + sb.id + "' wires are not distinct");
  }
  for (const auto& [id, state] : intended)
    if (!ids.count(id)) throw Error(Errc::invalid_argument, "config names unknown switchbox '" + id + "'");
  for (const auto& id : ids)
    if (!intended.count(id)) throw Error(Errc::invalid_argument, "config misses switchbox '" + id + "'");
  ObfuscatedNetlist obf{std::move(n), std::move(switchboxes), std::move(intended), {}};
  Netlist resolved = apply_config(obf, obf.intended);
  obf.per_output_sb_count = cone_counts(resolved, obf.switchboxes);
  return obf;
}

Netlist apply_config(const ObfuscatedNetlist& obf, const SwitchboxConfig& cfg) {
  if (cfg.size() != obf.switchboxes.size())
    throw Error(Errc::invalid_argument, "config has " + std::to_string(cfg.size()) + " entries for " +
                                            std::to_string(obf.switchboxes.size()) + " switchboxes");
  const Netlist& n = obf.netlist;
  std::vector<Gate> gates = n.gates();
  bool any = false;
  for (const auto& sb : obf.switchboxes) {
    auto it = cfg.find(sb.id);
    if (it == cfg.end()) throw Error(Errc::invalid_argument, "config misses switchbox '" + sb.id + "'");
    if (it->second == SbState::crossed) {
      std::swap(gates[sb.first].inputs[0], gates[sb.second].inputs[0]);
      any = true;
    }
  }
  if (!any) return n;
  return Netlist(n.name(), n.wire_names(), n.inputs(), std::move(gates), n.outputs());
}

std::size_t count_cone_switchboxes(const ObfuscatedNetlist& obf, std::size_t output_index) {
  if (output_index >= obf.per_output_sb_count.size())
    throw Error(Errc::index_out_of_range, "output index " + std::to_string(output_index) + " out of range");
  return obf.per_output_sb_count[output_index];
}

ObfuscatedNetlist insert_switchboxes(const Netlist& n, const InsertOptions& opts) {
  if (!n.is_combinational()) throw Error(Errc::invalid_argument, "switchbox insertion needs a combinational netlist");
  if (opts.t < 1) throw Error(Errc::invalid_argument, "t must be at least 1");
  Rng rng(opts.seed);
  Work work = Work::from(make_obfuscated(n));
  const Netlist original = n;

  std::vector<GateId> vertices;
  for (GateId g = 0; g < work.gates.size(); ++g) vertices.push_back(g);

  auto counts_now = [&] {
    std::vector<std::size_t> live;
    for (std::size_t s = 0; s < work.sbs.size(); ++s)
      if (!work.sbs[s].dead) live.push_back(s);
    std::vector<GateId> gmap;
    Netlist built = work.build({}, &gmap);
    std::vector<Switchbox> sbs;
    for (std::size_t s : live) sbs.push_back({"", gmap[work.sbs[s].first], gmap[work.sbs[s].second]});
    return cone_counts(built, sbs);
  };
  auto satisfied = [&](const std::vector<std::size_t>& c) {
    return std::all_of(c.begin(), c.end(), [&](std::size_t x) { return x >= opts.t; });
  };
  auto better = [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    auto ma = a.empty() ? 0 : *std::min_element(a.begin(), a.end());
    auto mb = b.empty() ? 0 : *std::min_element(b.begin(), b.end());
    if (ma != mb) return ma > mb;
    return std::accumulate(a.begin(), a.end(), std::size_t{0}) > std::accumulate(b.begin(), b.end(), std::size_t{0});
  };

  std::vector<std::size_t> best = counts_now();
  if (satisfied(best)) return work.finish();

  for (std::size_t iter = 0; iter < opts.max_iterations && !vertices.empty(); ++iter) {
    auto drv = work.drivers();
    auto snk = work.sinks();
    std::vector<char> is_po(work.names.size(), 0);
    for (WireId o : work.outputs) is_po[o] = 1;

    // Step I
    GateId v = vertices[rng.below(vertices.size())];
    Neighborhood nv = neighborhood(work, v, drv, snk, is_po);

    // Step II
    std::vector<GateId> candidates = vertices;
    rng.shuffle(candidates);
    std::optional<Work> placed;
    std::vector<std::size_t> added;
    for (GateId u : candidates) {
      if (u == v) continue;
      Neighborhood nu = neighborhood(work, u, drv, snk, is_po);
      if (nu.incoming.size() != nv.incoming.size() || nu.outputs.size() != nv.outputs.size()) continue;
      if (!disjoint(nv, nu)) continue;
      if (opts.match_gate_fanins && degree_profile(work, nu) != degree_profile(work, nv)) continue;
      // Step III
      Work trial = work;
      auto new_sbs = place_pair(trial, nv, nu, rng);
      if (new_sbs.empty() || !trial.acyclic_all_configs()) continue;
      placed = std::move(trial);
      added = std::move(new_sbs);
      break;
    }
    if (!placed) continue;
    work = std::move(*placed);

    // Step IV
    for (std::size_t s : added) {
      Netlist straight = work.build({});
      Netlist flipped = work.build({s});
      auto verdict = check_equivalence(straight, flipped, opts.equivalence);
      if (verdict.equivalent) {
        work.remove_sb(s);
      } else {
        work.sbs[s].crossed = rng.coin();
      }
    }

    // Step V
    auto counts = counts_now();
    if (better(counts, best)) best = counts;
    if (satisfied(counts)) {
      ObfuscatedNetlist obf = work.finish();
      if (!check_equivalence(apply_config(obf, obf.intended), original, opts.equivalence).equivalent)
        throw Error(Errc::invalid_argument, "switchbox insertion changed the function");
      return obf;
    }
  }
  throw Error(Errc::unsatisfiable, "could not place " + std::to_string(opts.t) + " switchboxes in every output cone after " +
                                       std::to_string(opts.max_iterations) + " iterations; best per-output counts " +
                                       counts_text(best));
}

ObfuscatedNetlist place_switchbox(const ObfuscatedNetlist& obf, Sink first, Sink second, SbState intent) {
  Work w = Work::from(obf);
  for (const Sink& s : {first, second}) {
    if (s.gate >= w.gates.size() || s.pin >= w.gates[s.gate].inputs.size())
      throw Error(Errc::index_out_of_range, "switchbox pin out of range");
  }
  if (first == second) throw Error(Errc::invalid_argument, "switchbox pins must differ");
  WireId x = w.gates[first.gate].inputs[first.pin];
  WireId y = w.gates[second.gate].inputs[second.pin];
  if (x == y) throw Error(Errc::invalid_argument, "switchbox inputs must be distinct wires");
  std::size_t s = w.add_sb(x, y, intent == SbState::crossed);
  w.gates[first.gate].inputs[first.pin] = w.gates[w.sbs[s].first].output;
  w.gates[second.gate].inputs[second.pin] = w.gates[w.sbs[s].second].output;
  if (!w.acyclic_all_configs()) throw Error(Errc::combinational_cycle, "switchbox would allow a combinational cycle");
  return w.finish();
}

std::vector<std::string> individually_degenerate(const ObfuscatedNetlist& obf, const EquivalenceOptions& opts) {
  Netlist intended = apply_config(obf, obf.intended);
  std::vector<std::string> out;
  for (const auto& sb : obf.switchboxes) {
    SwitchboxConfig cfg = obf.intended;
    cfg[sb.id] = cfg[sb.id] == SbState::parallel ? SbState::crossed : SbState::parallel;
    if (check_equivalence(intended, apply_config(obf, cfg), opts).equivalent) out.push_back(sb.id);
  }
  return out;
}

DegeneracyReport degeneracy_scan(const ObfuscatedNetlist& obf, std::uint64_t samples, std::uint64_t seed,
                                 const EquivalenceOptions& opts) {
  if (obf.switchboxes.empty()) throw Error(Errc::no_incorrect_configs, "no incorrect configurations exist without switchboxes");
  if (samples < 1) throw Error(Errc::invalid_argument, "samples must be at least 1");
  Netlist intended = apply_config(obf, obf.intended);
  Rng rng(seed);
  DegeneracyReport report;
  for (std::uint64_t i = 0; i < samples; ++i) {
    SwitchboxConfig cfg;
    bool differs = false;
    do {
      cfg.clear();
      differs = false;
      for (const auto& sb : obf.switchboxes) {
        SbState s = rng.coin() ? SbState::crossed : SbState::parallel;
        differs = differs || s != obf.intended.at(sb.id);
        cfg[sb.id] = s;
      }
    } while (!differs);
    ++report.samples;
    if (check_equivalence(intended, apply_config(obf, cfg), opts).equivalent) {
      ++report.equivalent;
      if (report.hits.size() < 16) report.hits.push_back(cfg);
    }
  }
  return report;
}

std::string write_config(const SwitchboxConfig& cfg) {
  // Numeric order of the sb<k> ids reads better than lexicographic.
  std::vector<std::pair<std::string, SbState>> entries(cfg.begin(), cfg.end());
  auto key = [](const std::string& id) {
    std::uint64_t v = 0;
    if (id.size() > 2 && id.rfind("sb", 0) == 0 &&
        std::from_chars(id.data() + 2, id.data() + id.size(), v).ptr == id.data() + id.size())
      return std::pair<std::uint64_t, std::string>{v, id};
    return std::pair<std::uint64_t, std::string>{~std::uint64_t{0}, id};
  };
  std::sort(entries.begin(), entries.end(), [&](const auto& a, const auto& b) { return key(a.first) < key(b.first); });
  std::string out;
  for (const auto& [id, s] : entries) out += id + " = " + std::string(to_string(s)) + "\n";
  return out;
}

SwitchboxConfig read_config(std::string_view text) {
  SwitchboxConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string id, eq, state, extra;
    if (!(ls >> id)) continue;
    if (!(ls >> eq >> state) || eq != "=" || (ls >> extra))
      throw SyntaxError(line_no, 1, "expected '<id> = parallel|crossed'");
    SbState s;
    if (state == "parallel") s = SbState::parallel;
    else if (state == "crossed") s = SbState::crossed;
    else throw SyntaxError(line_no, static_cast<int>(line.find(state)) + 1, "unknown state '" + state + "'");
    if (!cfg.emplace(id, s).second) throw SyntaxError(line_no, 1, "duplicate switchbox '" + id + "'");
  }
  return cfg;
}

std::string serialize_obfuscated(const ObfuscatedNetlist& obf) { return serialize_netlist(obf.netlist, obf.switchboxes); }

ObfuscatedNetlist parse_obfuscated(std::string_view netlist_text, std::string_view config_text) {
  ParsedNetlist parsed = parse_netlist_with_switchboxes(netlist_text);
  return make_obfuscated(std::move(parsed.netlist), std::move(parsed.switchboxes), read_config(config_text));
}

}  // namespace tpad
