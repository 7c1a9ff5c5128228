#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tpad/attack.hpp"
#include "tpad/chip.hpp"
#include "tpad/error.hpp"
#include "tpad/fft.hpp"
#include "tpad/harness.hpp"
#include "tpad/lfsr.hpp"
#include "tpad/parity_code.hpp"
#include "tpad/sweep.hpp"
#include "tpad/switchbox.hpp"

using namespace tpad;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Writes to `path`, or stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write " + path);
  out << text;
}

// Splits an attack file whose lines may start with `chip<i>:` into one text
// per chip. Lines keep their numbers and columns so parse errors point at the
// original file; unprefixed lines belong to chip 0.
std::vector<std::vector<AttackDescriptor>> parse_system_attacks(const std::string& text, std::size_t chips) {
  std::vector<std::string> per(chips);
  std::istringstream is(text);
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    std::size_t owner = 0;
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line.compare(first, 4, "chip") == 0) {
      const auto colon = line.find(':', first);
      std::size_t idx = 0;
      if (colon == std::string::npos || std::sscanf(line.c_str() + first + 4, "%zu", &idx) != 1)
        throw SyntaxError(no, static_cast<int>(first + 1), "expected chip<i>: before the attack");
      if (idx >= chips) throw SyntaxError(no, static_cast<int>(first + 1), "no chip " + std::to_string(idx));
      owner = idx;
      for (std::size_t i = first; i <= colon; ++i) line[i] = ' ';
    }
    for (std::size_t c = 0; c < chips; ++c) per[c] += (c == owner ? line : std::string()) + "\n";
  }
  std::vector<std::vector<AttackDescriptor>> out;
  for (const auto& t : per) out.push_back(parse_attack_file(t));
  return out;
}

FftAttackGenerator fft_generator(const std::string& name) {
  if (name == "butterfly") return butterfly_flip_generator();
  if (name == "permutation") return permutation_generator();
  if (name == "preserving") return plancherel_preserving_generator();
  if (name == "none") return fft_attack_free_generator();
  throw Error(Errc::invalid_argument, "unknown fft attack " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trojan prevention and detection toolkit"};
  app.require_subcommand(1);

  // gen-code
  auto* gen = app.add_subcommand("gen-code", "Sample a randomized parity-check matrix");
  std::size_t gk = 0, gr = 0;
  std::uint64_t gseed = 1;
  std::string gout;
  gen->add_option("--k", gk, "Information bits")->required();
  gen->add_option("--r", gr, "Check bits")->required();
  gen->add_option("--seed", gseed, "Seed");
  gen->add_option("-o,--out", gout, "Output file (default stdout)");

  // insert-sb
  auto* ins = app.add_subcommand("insert-sb", "Obfuscate a netlist with switchboxes");
  std::string inet, iout, icfg;
  InsertOptions iopts;
  bool loose = false;
  ins->add_option("netlist", inet, "Netlist file")->required();
  ins->add_option("--t", iopts.t, "Minimum switchboxes per output cone");
  ins->add_option("--seed", iopts.seed, "Seed");
  ins->add_option("--max-iterations", iopts.max_iterations, "Insertion attempts before giving up");
  ins->add_flag("--loose-match", loose, "Pair neighbourhoods without comparing gate fan-ins");
  ins->add_option("-o,--out", iout, "Obfuscated netlist file (default stdout)");
  ins->add_option("--config", icfg, "Intended configuration file (default stdout)");

  // build-chip
  auto* build = app.add_subcommand("build-chip", "Generate a protected chip bundle");
  std::string bnet, bdir, bincode;
  std::size_t br = 4;
  std::uint64_t bseed = 1;
  ChipOptions bopts;
  build->add_option("netlist", bnet, "Combinational netlist file")->required();
  build->add_option("--r", br, "Check bits");
  build->add_option("--t", bopts.t, "Minimum switchboxes per output cone");
  build->add_option("--seed", bseed, "Seed");
  build->add_flag("--pipeline", bopts.pipeline, "Register prediction and output before the checker");
  build->add_option("--ram-addr-bits", bopts.ram_addr_bits, "Protected RAM address bits (0 = none)");
  build->add_option("--ram-word-bits", bopts.ram_word_bits, "Protected RAM word bits");
  build->add_flag("--loose-match", bopts.loose_match, "Loose neighbourhood matching for switchbox insertion");
  build->add_option("--input-code", bincode, "Matrix file of the upstream sender's output code");
  build->add_option("-o,--out", bdir, "Bundle directory")->required();

  // run
  auto* run = app.add_subcommand("run", "Simulate a chain of chip bundles with monitors");
  std::vector<std::string> rbundles;
  std::string rattacks, rtrace;
  RunOptions ropts;
  run->add_option("bundles", rbundles, "Bundle directories; each chip reads all outputs of the previous one")
      ->required();
  run->add_option("--cycles", ropts.cycles, "Cycles to simulate");
  run->add_option("--seed", ropts.seed, "Seed for keys and stimulus");
  run->add_option("--attacks", rattacks, "Attack file; lines may start with chip<i>:");
  run->add_option("--trace-csv", rtrace, "Write a per-cycle trace CSV");

  // attack
  auto* atk = app.add_subcommand("attack", "Run an attack campaign against one chip bundle");
  std::string abundle, afile, agen = "logic", acsv;
  CampaignOptions aopts;
  atk->add_option("bundle", abundle, "Bundle directory")->required();
  atk->add_option("--generator", agen, "logic, pin, none or file")->check(CLI::IsMember({"logic", "pin", "none", "file"}));
  atk->add_option("--attacks", afile, "Attack file for --generator file");
  atk->add_option("--trials", aopts.trials, "Trials");
  atk->add_option("--cycles", aopts.cycles_per_trial, "Cycles per trial");
  atk->add_option("--seed", aopts.seed, "Seed");
  atk->add_option("--csv", acsv, "Write per-trial CSV");

  // fft
  auto* fftc = app.add_subcommand("fft", "Plancherel-checked half-precision FFT");
  std::size_t fn = 128;
  std::uint64_t fseed = 1, fcal = 10000, ftrials = 1000;
  double fmargin = 2.0, fthreshold = -1.0;
  std::string fref, fref_out, fattack = "butterfly", fcsv;
  bool fcalibrate = false, fselftest = false, fcampaign = false, fzeroed = false;
  fftc->add_option("--n", fn, "Transform size (power of two)");
  fftc->add_option("--seed", fseed, "Seed");
  fftc->add_option("--margin", fmargin, "Threshold margin over the worst calibration residual");
  fftc->add_option("--calibration-trials", fcal, "Attack-free calibration runs");
  fftc->add_option("--threshold", fthreshold, "Use this threshold instead of calibrating");
  fftc->add_option("--reference", fref, "Reference file to program instead of a seeded one");
  fftc->add_option("--reference-out", fref_out, "Write the programmed reference");
  fftc->add_flag("--calibrate", fcalibrate, "Print the calibrated threshold");
  fftc->add_flag("--selftest", fselftest, "Run the non-pair reference self-test");
  fftc->add_flag("--campaign", fcampaign, "Run an attack campaign");
  fftc->add_option("--attack", fattack, "butterfly, permutation, preserving or none");
  fftc->add_option("--trials", ftrials, "Campaign trials");
  fftc->add_flag("--zeroed", fzeroed, "Model the reference-zeroing Trojan");
  fftc->add_option("--csv", fcsv, "Write per-trial CSV");

  // destructive
  auto* des = app.add_subcommand("destructive", "Detection probability of destructive sampling");
  std::uint64_t dn = 0, da = 0, dt = 0, dmc = 0, dseed = 1;
  double dtarget = -1.0;
  des->add_option("--N", dn, "Population size")->required();
  des->add_option("--a", da, "Infected chips")->required();
  des->add_option("--t", dt, "Chips tested");
  des->add_option("--mc-trials", dmc, "Also estimate by Monte Carlo");
  des->add_option("--seed", dseed, "Monte Carlo seed");
  des->add_option("--target", dtarget, "Print the smallest t reaching this probability");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Run an experiment spec and print CSV");
  std::string sspec, sout;
  swp->add_option("spec", sspec, "Experiment spec file")->required();
  swp->add_option("-o,--out", sout, "Output CSV (default stdout)");

  // lfsr
  auto* lf = app.add_subcommand("lfsr", "Print an LFSR spec and its first tap vectors");
  std::size_t lr = 4, lcycles = 8;
  std::uint64_t lseed = 1;
  lf->add_option("--r", lr, "Exposed bits");
  lf->add_option("--seed", lseed, "Initial state");
  lf->add_option("--cycles", lcycles, "Tap vectors to print");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      emit(gout, write_matrix(sample_parity_code(gk, gr, gseed)));
    } else if (ins->parsed()) {
      iopts.match_gate_fanins = !loose;
      const ObfuscatedNetlist obf = insert_switchboxes(parse_netlist(read_file(inet)), iopts);
      emit(iout, serialize_obfuscated(obf));
      emit(icfg, write_config(obf.intended));
    } else if (build->parsed()) {
      if (!bincode.empty()) bopts.input_codes = {read_matrix(read_file(bincode))};
      const ProtectedChip chip =
          build_protected_chip(parse_netlist(read_file(bnet)), default_lfsr_spec(br, bseed), bseed, bopts);
      save_chip_bundle(chip, bdir);
      std::cout << "bundle " << bdir << ": " << chip.f.inputs().size() << " inputs, " << chip.f.outputs().size()
                << " outputs, r=" << chip.r() << ", " << chip.check.switchboxes.size() << " switchboxes\n";
    } else if (run->parsed()) {
      SystemTopology topo;
      for (const auto& b : rbundles) topo.chips.push_back(load_chip_bundle(b));
      for (std::size_t i = 1; i < topo.chips.size(); ++i) topo.channels.push_back({i - 1, 0, i, 0});
      std::vector<SystemAttack> attacks;
      if (!rattacks.empty()) {
        const auto per = parse_system_attacks(read_file(rattacks), topo.chips.size());
        for (std::size_t c = 0; c < per.size(); ++c) {
          for (const auto& a : per[c]) {
            validate_attack(a, topo.chips[c]);
            attacks.push_back({c, a});
          }
        }
      }
      ropts.trace = !rtrace.empty();
      const RunReport rep = run_system(topo, attacks, ropts);
      std::cout << format_report(rep);
      if (!rtrace.empty()) emit(rtrace, trace_csv(rep));
    } else if (atk->parsed()) {
      const ProtectedChip chip = load_chip_bundle(abundle);
      AttackGenerator g;
      if (agen == "logic")
        g = logic_flip_generator();
      else if (agen == "pin")
        g = pin_flip_generator();
      else if (agen == "none")
        g = attack_free_generator();
      else {
        if (afile.empty()) throw Error(Errc::invalid_argument, "--generator file needs --attacks");
        auto list = parse_attack_file(read_file(afile));
        for (const auto& a : list) validate_attack(a, chip);
        g = fixed_generator(std::move(list));
      }
      const DetectionReport rep = run_campaign(chip, g, aopts);
      const auto [lo, hi] = rep.interval();
      std::printf("detected %llu/%llu (%.4f, 3-sigma [%.4f, %.4f]), false positives %llu/%llu\n",
                  static_cast<unsigned long long>(rep.detected), static_cast<unsigned long long>(rep.trials),
                  rep.rate(), lo, hi, static_cast<unsigned long long>(rep.false_positives),
                  static_cast<unsigned long long>(rep.clean_trials));
      if (!acsv.empty()) emit(acsv, campaign_csv(rep));
    } else if (fftc->parsed()) {
      PlancherelReference ref = fref.empty() ? make_reference(fn, fseed) : parse_reference(read_file(fref));
      const double threshold = fthreshold >= 0 ? fthreshold : calibrate_threshold(ref, fcal, fmargin, derive_seed(fseed, 1));
      if (!fref_out.empty()) emit(fref_out, write_reference(ref));
      FftEngine engine(ref, threshold);
      engine.set_reference_zeroed(fzeroed);
      std::printf("N=%zu threshold=%.6g\n", ref.size(), threshold);
      if (fselftest) {
        const auto v = reference_selftest(engine, make_non_pair(ref.size(), derive_seed(fseed, 3)));
        std::printf("selftest: %s\n", std::string(to_string(v)).c_str());
      }
      if (fcampaign) {
        FftCampaignOptions o;
        o.trials = ftrials;
        o.seed = derive_seed(fseed, 2);
        o.kind = fattack;
        const DetectionReport rep = fft_attack_campaign(engine, fft_generator(fattack), o);
        std::printf("%s: detected %llu/%llu (%.4f), false positives %llu/%llu\n", fattack.c_str(),
                    static_cast<unsigned long long>(rep.detected), static_cast<unsigned long long>(rep.trials),
                    rep.rate(), static_cast<unsigned long long>(rep.false_positives),
                    static_cast<unsigned long long>(rep.clean_trials));
        if (!fcsv.empty()) emit(fcsv, campaign_csv(rep));
      }
      (void)fcalibrate;  // the threshold line above is the calibration output
    } else if (des->parsed()) {
      if (dtarget >= 0) {
        std::uint64_t lo = 0, hi = dn;
        while (lo < hi) {
          const std::uint64_t mid = lo + (hi - lo) / 2;
          if (destructive_detection_probability(dn, da, mid) >= dtarget)
            hi = mid;
          else
            lo = mid + 1;
        }
        std::printf("smallest t with P >= %g: %llu (%.2f%% of N)\n", dtarget, static_cast<unsigned long long>(lo),
                    dn ? 100.0 * static_cast<double>(lo) / static_cast<double>(dn) : 0.0);
      }
      std::printf("P(N=%llu, a=%llu, t=%llu) = %.6f\n", static_cast<unsigned long long>(dn),
                  static_cast<unsigned long long>(da), static_cast<unsigned long long>(dt),
                  destructive_detection_probability(dn, da, dt));
      if (dmc > 0)
        std::printf("Monte Carlo (%llu trials) = %.6f\n", static_cast<unsigned long long>(dmc),
                    destructive_detection_monte_carlo(dn, da, dt, dmc, dseed));
    } else if (swp->parsed()) {
      emit(sout, run_sweep(parse_experiment(read_file(sspec))));
    } else if (lf->parsed()) {
      const LfsrSpec spec = default_lfsr_spec(lr, lseed);
      std::cout << write_lfsr_spec(spec);
      Lfsr l(spec);
      for (std::size_t c = 0; c < lcycles; ++c, l.step()) std::cout << c << ' ' << l.taps().to_string() << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  }
  return 0;
}
