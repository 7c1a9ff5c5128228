#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tpad/chip.hpp"
#include "tpad/parity_code.hpp"
#include "tpad/random.hpp"

namespace tpad {

enum class AttackKind : std::uint8_t {
  pin,
  logic,
  electrical,
  reliability,
  decoupling_stored_state,
  decoupling_parity_null,
  decoupling_fft_zero,
};

enum class Payload : std::uint8_t { flip, stuck0, stuck1, replay, zero, ram_trojan };

std::string_view to_string(AttackKind k);
std::string_view to_string(Payload p);

struct Trigger {
  enum class Kind : std::uint8_t { always, at_cycle, after_cycle, random };
  Kind kind = Kind::always;
  std::uint64_t cycle = 0;
  double probability = 1.0;

  /// Whether the attack acts on `cycle`. Draws from rng only for random.
  bool fires(std::uint64_t now, Rng& rng) const;
};

/// Pin channels: chip data inputs, check bits received with an input group,
/// chip data outputs, check bits sent with an output group.
enum class PinChannel : std::uint8_t { in, check, out, ocheck };

struct AttackTarget {
  enum class Kind : std::uint8_t { f_wire, check_wire, ram_wire, pin, ram, chip, fft };
  Kind kind = Kind::chip;
  std::string wire;
  PinChannel channel = PinChannel::in;
  std::size_t group = 0;
  std::size_t index = 0;
};

/// One attack. Text form, one per line:
///   <kind> <payload> <target> [trigger=always|at_cycle:c|after_cycle:c|random:p]
/// payload: flip | stuck0 | stuck1 | replay:j | zero | a RAM Trojan name
/// target:  gate=[f:|check:|ram:]<wire> | pin=in:i | pin=out:i |
///          pin=check[g]:i | pin=ocheck[g]:i | ram | chip | fft
struct AttackDescriptor {
  AttackKind kind = AttackKind::logic;
  Payload payload = Payload::flip;
  std::size_t replay_depth = 0;
  RamTrojan ram_trojan = RamTrojan::none;
  AttackTarget target;
  Trigger trigger;
};

AttackDescriptor parse_attack(std::string_view line);
/// Blank lines and `#` comments are skipped. Errors carry the line number.
std::vector<AttackDescriptor> parse_attack_file(std::string_view text);
std::string format_attack(const AttackDescriptor& a);

/// Errc::unknown_target when the target does not exist in the chip (or the
/// attack does not apply to a chip at all, like fft_zero).
void validate_attack(const AttackDescriptor& a, const ProtectedChip& chip);

/// A chip with attacks applied. Pin attacks act on the values crossing the
/// chip boundary, gate attacks on the running netlists, decoupling attacks on
/// what the checking logic sees versus what leaves the chip.
class InjectedChip {
 public:
  InjectedChip(const ProtectedChip& chip, const SessionKeys& keys, std::vector<AttackDescriptor> attacks,
               std::uint64_t seed);

  struct Step {
    /// As seen outside the chip, after output-side tampering.
    CycleResult result;
    bool attack_active = false;
  };

  /// `honest` is what the upstream sender put on the wires.
  Step step(const CycleInput& honest);

  const ChipRuntime& runtime() const noexcept { return rt_; }

 private:
  struct Resolved {
    AttackDescriptor desc;
    std::optional<WireId> wire;
  };

  const ProtectedChip* chip_;
  ChipRuntime rt_;
  std::vector<Resolved> attacks_;
  Rng rng_;
  std::deque<std::pair<BitVector, BitVector>> history_;  // (inputs, f outputs), newest first
  std::vector<BitVector> last_sent_checks_;
};

InjectedChip inject(const ProtectedChip& chip, const AttackDescriptor& attack, const SessionKeys& keys,
                    std::uint64_t seed);

/// Outcome of one closed-loop run: chip fed by trusted senders, watched by
/// its monitor and by the receivers of its output groups.
struct TrialResult {
  bool detected = false;
  std::optional<std::uint64_t> first_detect_cycle;
  bool by_monitor = false;
  bool by_receiver = false;
  /// Some cycle's outputs differed from what the untouched f computes on the
  /// inputs the sender put on the wires.
  bool attack_engaged = false;
};

TrialResult run_trial(const ProtectedChip& chip, const std::vector<AttackDescriptor>& attacks, std::size_t cycles,
                      std::uint64_t seed);

struct TrialRecord {
  std::uint64_t trial = 0;
  std::string kind;
  bool detected = false;
  std::optional<std::uint64_t> first_detect_cycle;
};

struct DetectionReport {
  std::uint64_t trials = 0;
  std::uint64_t detected = 0;
  std::uint64_t clean_trials = 0;
  std::uint64_t false_positives = 0;
  /// kind -> (trials, detected)
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> per_kind;
  std::vector<TrialRecord> records;

  double rate() const { return trials ? static_cast<double>(detected) / static_cast<double>(trials) : 0.0; }
  /// Wilson score interval at z standard deviations.
  std::pair<double, double> interval(double z = 3.0) const;
};

/// Draws the attacks of one trial.
using AttackGenerator = std::function<std::vector<AttackDescriptor>(const ProtectedChip&, std::size_t cycles, Rng&)>;

/// Flips a uniformly random number (1..m) of distinct function outputs at
/// one uniformly random cycle.
AttackGenerator logic_flip_generator();
/// Flips a uniformly random number (1..n) of distinct data input pins at one
/// uniformly random cycle.
AttackGenerator pin_flip_generator();
AttackGenerator attack_free_generator();
AttackGenerator fixed_generator(std::vector<AttackDescriptor> attacks);

struct CampaignOptions {
  std::uint64_t trials = 1000;
  std::size_t cycles_per_trial = 8;
  std::uint64_t seed = 1;
  /// Also run an attack-free trial per attacked trial and count reports.
  bool paired_clean = true;
};

DetectionReport run_campaign(const ProtectedChip& chip, const AttackGenerator& gen, const CampaignOptions& opts);

/// `trial,attack_kind,detected,first_detect_cycle` rows, then
/// `summary,all,<detected>/<trials>,false_positives=<n>`.
std::string campaign_csv(const DetectionReport& report);

/// Code-level Monte Carlo: per trial a fresh code, a random codeword, and a
/// uniformly random number (1..k+r) of distinct flipped positions.
DetectionEstimate uniform_weight_detection(std::size_t k, std::size_t r, std::uint64_t trials, std::uint64_t seed);

/// (1 - theta)^x
double cp_attack_probability(double theta, double x);
/// p^x
double per_sb_attack_probability(double p, double x);

struct SubcircuitMatchReport {
  std::uint64_t trials = 0;
  /// Trials where an isomorphic partner was found in the checking netlist.
  std::uint64_t matched = 0;
  /// Matched trials whose double flip changed the chip outputs undetected.
  std::uint64_t succeeded = 0;
  double success_rate() const { return trials ? static_cast<double>(succeeded) / static_cast<double>(trials) : 0.0; }
};

/// Per trial: a random connected fan-in subcircuit of f with at most
/// max_gates gates is matched structurally against the checking netlist as
/// the attacker sees it (switchboxes visible as buffers, configuration
/// unknown; primary-input leaves must land on the corresponding predictor
/// input). Both root outputs are flipped for a closed-loop run.
SubcircuitMatchReport subcircuit_match_attack(const ProtectedChip& chip, std::uint64_t trials, std::uint64_t seed,
                                              std::size_t max_gates = 6, std::size_t cycles = 16);

struct DecouplingDesign {
  AttackKind kind = AttackKind::decoupling_parity_null;
  std::optional<std::uint64_t> outputs;      // k, parity_null
  std::optional<std::uint64_t> check_bits;   // r, parity_null
  std::optional<std::uint64_t> flip_flops;   // n_ff, stored_state
  std::optional<std::uint64_t> fft_points;   // N, fft_zero
};

struct DecouplingCost {
  std::uint64_t transistors = 0;
  std::uint64_t flip_flops = 0;
};

/// Extra hardware a decoupling attack needs. Errc::invalid_argument when a
/// field the kind needs is missing.
DecouplingCost decoupling_cost(const DecouplingDesign& d);

/// Whether the added hardware exceeds what non-destructive inspection is
/// assumed to catch.
bool exceeds_inspection_threshold(const DecouplingCost& c, std::uint64_t transistor_threshold,
                                  std::uint64_t flip_flop_threshold);

/// 1 - C(N-a, t) / C(N, t): chance that destroying t of N chips, a of which
/// are attacked, hits at least one attacked chip.
double destructive_detection_probability(std::uint64_t n, std::uint64_t a, std::uint64_t t);

/// Sampling-without-replacement Monte Carlo of the same quantity.
double destructive_detection_monte_carlo(std::uint64_t n, std::uint64_t a, std::uint64_t t, std::uint64_t trials,
                                         std::uint64_t seed);

}  // namespace tpad
