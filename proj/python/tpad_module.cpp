#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tpad/attack.hpp"
#include "tpad/chip.hpp"
#include "tpad/error.hpp"
#include "tpad/fft.hpp"
#include "tpad/harness.hpp"
#include "tpad/parity_code.hpp"
#include "tpad/sweep.hpp"

namespace py = pybind11;
using namespace tpad;

namespace {

py::dict report_dict(const DetectionReport& rep) {
  py::dict d;
  d["trials"] = rep.trials;
  d["detected"] = rep.detected;
  d["rate"] = rep.rate();
  d["clean_trials"] = rep.clean_trials;
  d["false_positives"] = rep.false_positives;
  return d;
}

HalfVector halves(const std::vector<std::complex<double>>& v) { return to_half(v); }

std::vector<std::complex<double>> values(const HalfVector& v) {
  std::vector<std::complex<double>> out;
  for (const auto& z : v) out.push_back(z.value());
  return out;
}

}  // namespace

PYBIND11_MODULE(tpad, m) {
  m.doc() = "Randomized parity CED, switchbox obfuscation and Trojan attack simulation";
  py::register_exception<Error>(m, "TpadError", PyExc_RuntimeError);

  py::class_<ParityCheckMatrix>(m, "ParityCheckMatrix")
      .def_property_readonly("k", &ParityCheckMatrix::k)
      .def_property_readonly("r", &ParityCheckMatrix::r)
      .def_property_readonly("columns", &ParityCheckMatrix::columns)
      .def("rows", [](const ParityCheckMatrix& h) {
        std::vector<std::string> rows;
        for (std::size_t i = 0; i < h.r(); ++i) rows.push_back(h.row(i).to_string());
        return rows;
      })
      .def("check_bits", [](const ParityCheckMatrix& h, std::uint64_t info) { return compute_check_mask(h, info); })
      .def("write", &write_matrix)
      .def("__eq__", [](const ParityCheckMatrix& a, const ParityCheckMatrix& b) { return a == b; });

  m.def("sample_parity_code", py::overload_cast<std::size_t, std::size_t, std::uint64_t>(&sample_parity_code),
        py::arg("k"), py::arg("r"), py::arg("seed") = 1);
  m.def("read_matrix", &read_matrix);

  m.def(
      "uniform_weight_detection",
      [](std::size_t k, std::size_t r, std::uint64_t trials, std::uint64_t seed) {
        const auto e = uniform_weight_detection(k, r, trials, seed);
        return py::make_tuple(e.detected, e.trials);
      },
      py::arg("k"), py::arg("r"), py::arg("trials"), py::arg("seed") = 1);
  m.def("destructive_detection_probability", &destructive_detection_probability, py::arg("n"), py::arg("a"),
        py::arg("t"));
  m.def("destructive_detection_monte_carlo", &destructive_detection_monte_carlo, py::arg("n"), py::arg("a"),
        py::arg("t"), py::arg("trials"), py::arg("seed") = 1);
  m.def("cp_attack_probability", &cp_attack_probability, py::arg("theta"), py::arg("x"));
  m.def("per_sb_attack_probability", &per_sb_attack_probability, py::arg("p"), py::arg("x"));

  m.def("half_bits", [](double v) { return Half::from_double(v).bits(); });
  m.def("half_value", [](std::uint16_t bits) { return Half::from_bits(bits).to_double(); });
  m.def("fft", [](const std::vector<std::complex<double>>& x) { return values(fft(halves(x))); },
        "Half-precision FFT; inputs are rounded to half first.");
  m.def("dft_reference", [](const std::vector<std::complex<double>>& x) { return dft_reference(x); });
  m.def("calibrate_threshold", py::overload_cast<std::size_t, std::uint64_t, double, std::uint64_t>(&calibrate_threshold),
        py::arg("n"), py::arg("trials"), py::arg("margin") = 2.0, py::arg("seed") = 1);
  m.def(
      "fft_campaign",
      [](std::size_t n, const std::string& attack, std::uint64_t trials, std::uint64_t seed, double margin,
         std::uint64_t calibration, bool zeroed) {
        auto ref = make_reference(n, seed);
        FftEngine engine(ref, calibrate_threshold(ref, calibration, margin, derive_seed(seed, 1)));
        engine.set_reference_zeroed(zeroed);
        FftAttackGenerator gen;
        if (attack == "butterfly")
          gen = butterfly_flip_generator();
        else if (attack == "permutation")
          gen = permutation_generator();
        else if (attack == "preserving")
          gen = plancherel_preserving_generator();
        else if (attack == "none")
          gen = fft_attack_free_generator();
        else
          throw Error(Errc::invalid_argument, "unknown fft attack " + attack);
        FftCampaignOptions o;
        o.trials = trials;
        o.seed = derive_seed(seed, 2);
        py::dict d = report_dict(fft_attack_campaign(engine, gen, o));
        d["threshold"] = engine.threshold();
        d["selftest"] = std::string(to_string(reference_selftest(engine, make_non_pair(n, derive_seed(seed, 3)))));
        return d;
      },
      py::arg("n"), py::arg("attack") = "butterfly", py::arg("trials") = 1000, py::arg("seed") = 1,
      py::arg("margin") = 2.0, py::arg("calibration") = 1000, py::arg("zeroed") = false);

  py::class_<ProtectedChip>(m, "Chip")
      .def_property_readonly("inputs", [](const ProtectedChip& c) { return c.f.inputs().size(); })
      .def_property_readonly("outputs", [](const ProtectedChip& c) { return c.f.outputs().size(); })
      .def_property_readonly("r", &ProtectedChip::r)
      .def_property_readonly("switchboxes", [](const ProtectedChip& c) { return c.check.switchboxes.size(); })
      .def_property_readonly("h_logic", [](const ProtectedChip& c) { return c.h_logic; })
      .def("save", [](const ProtectedChip& c, const std::string& dir) { save_chip_bundle(c, dir); })
      .def(
          "campaign",
          [](const ProtectedChip& c, const std::string& generator, std::uint64_t trials, std::size_t cycles,
             std::uint64_t seed) {
            AttackGenerator g;
            if (generator == "logic")
              g = logic_flip_generator();
            else if (generator == "pin")
              g = pin_flip_generator();
            else if (generator == "none")
              g = attack_free_generator();
            else {
              auto list = parse_attack_file(generator);
              for (const auto& a : list) validate_attack(a, c);
              g = fixed_generator(std::move(list));
            }
            CampaignOptions o;
            o.trials = trials;
            o.cycles_per_trial = cycles;
            o.seed = seed;
            return report_dict(run_campaign(c, g, o));
          },
          py::arg("generator") = "logic", py::arg("trials") = 1000, py::arg("cycles") = 8, py::arg("seed") = 1,
          "generator is logic, pin, none, or the text of an attack file");

  m.def(
      "build_chip",
      [](const std::string& netlist, std::size_t r, std::size_t t, std::uint64_t seed, bool pipeline,
         std::size_t ram_addr_bits) {
        ChipOptions o;
        o.t = t;
        o.pipeline = pipeline;
        o.ram_addr_bits = ram_addr_bits;
        return build_protected_chip(parse_netlist(netlist), default_lfsr_spec(r, seed), seed, o);
      },
      py::arg("netlist"), py::arg("r") = 4, py::arg("t") = 1, py::arg("seed") = 1, py::arg("pipeline") = false,
      py::arg("ram_addr_bits") = 0);
  m.def("load_chip", [](const std::string& dir) { return load_chip_bundle(dir); });

  m.def(
      "run_pipeline",
      [](const std::vector<std::string>& netlists, std::size_t r, std::uint64_t cycles, std::uint64_t seed,
         const std::vector<std::pair<std::size_t, std::string>>& attacks) {
        std::vector<Netlist> stages;
        for (const auto& text : netlists) stages.push_back(parse_netlist(text));
        const auto topo = build_pipeline(stages, r, seed);
        std::vector<SystemAttack> sa;
        for (const auto& [chip, text] : attacks) sa.push_back({chip, parse_attack(text)});
        RunOptions o;
        o.cycles = cycles;
        o.seed = seed;
        const RunReport rep = run_system(topo, sa, o);
        py::dict d;
        d["total_reports"] = rep.total_reports();
        d["config_digest"] = rep.config_digest;
        d["summary"] = format_report(rep);
        py::list outcomes;
        for (const auto& a : rep.attacks) {
          py::dict od;
          od["chip"] = a.chip;
          od["attack"] = a.attack;
          od["first_active"] = a.first_active;
          od["first_detect"] = a.first_detect;
          od["detected_by"] = a.detected_by;
          outcomes.append(od);
        }
        d["attacks"] = outcomes;
        return d;
      },
      py::arg("netlists"), py::arg("r") = 4, py::arg("cycles") = 1000, py::arg("seed") = 1,
      py::arg("attacks") = std::vector<std::pair<std::size_t, std::string>>{});

  m.def("run_sweep", [](const std::string& spec) { return run_sweep(parse_experiment(spec)); });
  m.def("format_attack", [](const std::string& text) { return format_attack(parse_attack(text)); });
}
