#include "tpad/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "tpad/attack.hpp"
#include "tpad/chip.hpp"
#include "tpad/circuits.hpp"
#include "tpad/error.hpp"
#include "tpad/fft.hpp"

namespace tpad {

namespace {

struct ExperimentInfo {
  std::string_view name;
  std::vector<std::string_view> variables;
  std::vector<std::string_view> params;
};

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> v{
      {"parity", {"k", "w", "r"}, {"k", "w", "r", "trials"}},
      {"destructive", {"N", "a", "t"}, {"N", "a", "t", "mc_trials"}},
      {"cp", {"theta", "x"}, {"theta", "x"}},
      {"per_sb", {"p", "x"}, {"p", "x"}},
      {"fft", {"N", "margin"}, {"N", "margin", "trials", "calibration", "attack"}},
      {"chip", {"r", "t"}, {"r", "t", "trials", "cycles", "circuit", "attack"}},
  };
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> to_number(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<double> parse_values(std::string_view s, int line) {
  std::vector<double> out;
  const auto dots = s.find("..");
  if (dots != std::string_view::npos) {
    std::string_view rest = s.substr(dots + 2);
    std::string_view step_text = "1";
    if (auto colon = rest.find(':'); colon != std::string_view::npos) {
      step_text = rest.substr(colon + 1);
      rest = rest.substr(0, colon);
    }
    auto lo = to_number(s.substr(0, dots)), hi = to_number(rest), step = to_number(step_text);
    if (!lo || !hi || !step || *step <= 0 || *hi < *lo) throw SyntaxError(line, 1, "bad range in values");
    const auto count = static_cast<std::uint64_t>(std::floor((*hi - *lo) / *step + 1e-9)) + 1;
    if (count > 100000) throw SyntaxError(line, 1, "range has too many points");
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(*lo + static_cast<double>(i) * *step);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string_view::npos) comma = s.size();
    auto v = to_number(s.substr(pos, comma - pos));
    if (!v) throw SyntaxError(line, static_cast<int>(pos + 1), "bad number in values");
    out.push_back(*v);
    pos = comma + 1;
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class Params {
 public:
  Params(const ExperimentSpec& spec, double var_value) : spec_(spec), value_(var_value) {}

  double num(const std::string& key, double def) const {
    if (key == spec_.variable) return value_;
    auto it = spec_.params.find(key);
    if (it == spec_.params.end()) return def;
    auto v = to_number(it->second);
    if (!v) throw Error(Errc::invalid_argument, "parameter " + key + " is not a number");
    return *v;
  }
  std::uint64_t count(const std::string& key, double def) const {
    const double v = num(key, def);
    if (v < 0 || v != std::floor(v)) throw Error(Errc::invalid_argument, "parameter " + key + " must be a whole number");
    return static_cast<std::uint64_t>(v);
  }
  std::string str(const std::string& key, const std::string& def) const {
    auto it = spec_.params.find(key);
    return it == spec_.params.end() ? def : it->second;
  }

 private:
  const ExperimentSpec& spec_;
  double value_;
};

struct Row {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t trials = 0;
  std::optional<double> reference;
};

Row analytic(double v, std::optional<double> ref = std::nullopt) { return {v, v, v, 0, ref}; }

Row monte_carlo(std::uint64_t detected, std::uint64_t trials, std::optional<double> ref = std::nullopt) {
  const double p = trials ? static_cast<double>(detected) / static_cast<double>(trials) : 0.0;
  const double hw = trials ? 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 0.0;
  return {p, std::max(0.0, p - hw), std::min(1.0, p + hw), trials, ref};
}

Netlist circuit_by_name(const std::string& name) {
  if (name == "full_adder") return circuits::full_adder();
  if (name == "alu2") return circuits::two_bit_alu();
  if (name.rfind("adder", 0) == 0) {
    std::size_t bits = 0;
    auto [p, ec] = std::from_chars(name.data() + 5, name.data() + name.size(), bits);
    if (ec == std::errc{} && p == name.data() + name.size() && bits > 0) return circuits::ripple_adder(bits);
  }
  throw Error(Errc::invalid_argument, "unknown circuit " + name);
}

Row run_point(const ExperimentSpec& spec, double x, std::uint64_t point_seed) {
  const Params p(spec, x);
  const std::string& e = spec.experiment;
  if (e == "parity") {
    const std::size_t k = spec.variable == "w" || spec.params.count("w") ? p.count("w", 100) : p.count("k", 100);
    const std::size_t r = p.count("r", 3);
    const auto est = uniform_weight_detection(k, r, p.count("trials", 30000), point_seed);
    return monte_carlo(est.detected, est.trials, 1.0 - std::ldexp(1.0, -static_cast<int>(r)));
  }
  if (e == "destructive") {
    const auto n = p.count("N", 0), a = p.count("a", 0), t = p.count("t", 0);
    const double exact = destructive_detection_probability(n, a, t);
    const auto mc = p.count("mc_trials", 0);
    if (mc == 0) return analytic(exact);
    const double est = destructive_detection_monte_carlo(n, a, t, mc, point_seed);
    return monte_carlo(static_cast<std::uint64_t>(std::llround(est * static_cast<double>(mc))), mc, exact);
  }
  if (e == "cp") return analytic(cp_attack_probability(p.num("theta", 0.1), p.num("x", 64)));
  if (e == "per_sb") return analytic(per_sb_attack_probability(p.num("p", 0.5), p.num("x", 64)));
  if (e == "fft") {
    const std::size_t n = p.count("N", 128);
    const auto ref = make_reference(n, derive_seed(point_seed, 0));
    const double threshold =
        calibrate_threshold(ref, p.count("calibration", 1000), p.num("margin", 2.0), derive_seed(point_seed, 1));
    FftEngine engine(ref, threshold);
    const std::string attack = p.str("attack", "butterfly");
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
    o.trials = p.count("trials", 1000);
    o.seed = derive_seed(point_seed, 2);
    o.paired_clean = false;
    const auto rep = fft_attack_campaign(engine, gen, o);
    return monte_carlo(rep.detected, rep.trials);
  }
  if (e == "chip") {
    const std::size_t r = p.count("r", 4);
    ChipOptions opts;
    opts.t = p.count("t", 1);
    const auto chip = build_protected_chip(circuit_by_name(p.str("circuit", "full_adder")),
                                           default_lfsr_spec(r, derive_seed(point_seed, 0)), derive_seed(point_seed, 1), opts);
    const std::string attack = p.str("attack", "logic");
    AttackGenerator gen;
    if (attack == "logic")
      gen = logic_flip_generator();
    else if (attack == "pin")
      gen = pin_flip_generator();
    else if (attack == "none")
      gen = attack_free_generator();
    else
      throw Error(Errc::invalid_argument, "unknown chip attack " + attack);
    CampaignOptions o;
    o.trials = p.count("trials", 200);
    o.cycles_per_trial = p.count("cycles", 8);
    o.seed = derive_seed(point_seed, 2);
    o.paired_clean = false;
    const auto rep = run_campaign(chip, gen, o);
    return monte_carlo(rep.detected, rep.trials);
  }
  throw Error(Errc::invalid_argument, "unknown experiment " + e);
}

}  // namespace

ExperimentSpec parse_experiment(std::string_view text) {
  ExperimentSpec spec;
  std::set<std::string> seen;
  std::string values_text;
  int values_line = 0;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw SyntaxError(line_no, 1, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) throw SyntaxError(line_no, 1, "expected key = value");
    if (!seen.insert(key).second) throw SyntaxError(line_no, 1, "duplicate key " + key);
    if (key == "experiment") {
      spec.experiment = value;
    } else if (key == "sweep") {
      spec.variable = value;
    } else if (key == "values") {
      values_text = value;
      values_line = line_no;
    } else if (key == "seed") {
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), spec.seed);
      if (ec != std::errc{} || p != value.data() + value.size()) throw SyntaxError(line_no, static_cast<int>(eq + 2), "bad seed");
    } else {
      spec.params[key] = value;
    }
  }
  const int last = std::max(line_no, 1);
  if (spec.experiment.empty()) throw SyntaxError(last, 1, "missing experiment");
  if (spec.variable.empty()) throw SyntaxError(last, 1, "missing sweep");
  if (values_text.empty()) throw SyntaxError(last, 1, "missing values");
  spec.values = parse_values(values_text, values_line);

  const auto& all = experiments();
  auto it = std::find_if(all.begin(), all.end(), [&](const ExperimentInfo& e) { return e.name == spec.experiment; });
  if (it == all.end()) throw SyntaxError(last, 1, "unknown experiment " + spec.experiment);
  if (std::find(it->variables.begin(), it->variables.end(), spec.variable) == it->variables.end())
    throw SyntaxError(last, 1, "experiment " + spec.experiment + " cannot sweep " + spec.variable);
  for (const auto& [k, v] : spec.params) {
    if (std::find(it->params.begin(), it->params.end(), k) == it->params.end())
      throw SyntaxError(last, 1, "unknown parameter " + k + " for " + spec.experiment);
    if (k == spec.variable) throw SyntaxError(last, 1, "parameter " + k + " is also the sweep variable");
  }
  return spec;
}

std::string run_sweep(const ExperimentSpec& spec) {
  std::ostringstream os;
  os << "# tpad-sweep v1\n# experiment=" << spec.experiment << " sweep=" << spec.variable << " seed=" << spec.seed;
  for (const auto& [k, v] : spec.params) os << ' ' << k << '=' << v;
  os << '\n' << spec.variable << ",value,ci_lo,ci_hi,trials,reference\n";
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const Row row = run_point(spec, spec.values[i], derive_seed(spec.seed, i));
    os << fmt(spec.values[i]) << ',' << fmt(row.value) << ',' << fmt(row.lo) << ',' << fmt(row.hi) << ',' << row.trials
       << ',';
    if (row.reference) os << fmt(*row.reference);
    os << '\n';
  }
  return os.str();
}

}  // namespace tpad
