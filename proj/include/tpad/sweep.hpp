#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tpad {

/// Parsed experiment file. Grammar, one entry per line:
///   # comment
///   key = value
/// Required: `experiment`, `sweep` (the variable) and `values`, given as a
/// comma list (`0.05, 0.1`), an integer range `3..8` or a stepped range
/// `1000..9000:1000`. `seed` defaults to 1; every other key is a fixed
/// parameter of the experiment.
struct ExperimentSpec {
  std::string experiment;
  std::string variable;
  std::vector<double> values;
  std::uint64_t seed = 1;
  std::map<std::string, std::string> params;
};

/// SyntaxError with the offending line for malformed lines, duplicate or
/// unknown keys, bad numbers, or an unknown experiment or variable.
ExperimentSpec parse_experiment(std::string_view text);

/// Experiments and their variables (defaults in parentheses):
///   parity       k|w (100), r (3), trials (30000)
///   destructive  N, a, t, mc_trials (0)
///   cp           theta, x
///   per_sb       p, x
///   fft          N (128), margin (2), trials (1000), calibration (1000),
///                attack = butterfly|permutation|preserving|none
///   chip         r (4), t (1), trials (200), cycles (8),
///                circuit = full_adder|alu2|adder<n>, attack = logic|pin|none
/// One CSV row per value:
///   # tpad-sweep v1
///   # experiment=<e> sweep=<var> seed=<s> <param>=<value>...
///   <var>,value,ci_lo,ci_hi,trials,reference
/// Monte Carlo rows carry a 3-sigma interval; analytic rows repeat the value
/// and report 0 trials. `reference` holds a closed form where one exists.
/// The output depends only on the spec, so equal specs give equal bytes.
std::string run_sweep(const ExperimentSpec& spec);

}  // namespace tpad
