#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tpad/attack.hpp"
#include "tpad/random.hpp"

namespace tpad {

/// IEEE binary16 value. Conversions round to nearest, ties to even.
class Half {
 public:
  constexpr Half() = default;
  static Half from_bits(std::uint16_t bits) {
    Half h;
    h.bits_ = bits;
    return h;
  }
  static Half from_double(double v);

  std::uint16_t bits() const noexcept { return bits_; }
  double to_double() const;
  bool is_finite() const noexcept { return (bits_ & 0x7C00) != 0x7C00; }
  bool is_zero() const noexcept { return (bits_ & 0x7FFF) == 0; }

  friend bool operator==(Half a, Half b) { return a.bits_ == b.bits_; }

 private:
  std::uint16_t bits_ = 0;
};

struct HalfComplex {
  Half re;
  Half im;

  static HalfComplex from(std::complex<double> z) { return {Half::from_double(z.real()), Half::from_double(z.imag())}; }
  std::complex<double> value() const { return {re.to_double(), im.to_double()}; }
  bool is_finite() const noexcept { return re.is_finite() && im.is_finite(); }

  friend bool operator==(const HalfComplex&, const HalfComplex&) = default;
};

using HalfVector = std::vector<HalfComplex>;

HalfVector to_half(std::span<const std::complex<double>> v);

/// Flips bit `bit` (0 = mantissa LSB, 15 = sign) of one butterfly output.
/// Butterfly b of stage s combines the pair whose top index is b's position
/// in that stage; `bottom` picks the difference output.
struct ButterflyFault {
  std::size_t stage = 0;
  std::size_t butterfly = 0;
  bool bottom = false;
  bool imag = false;
  unsigned bit = 0;
};

struct FftResult {
  HalfVector output;
  bool overflow = false;
};

/// Radix-2 decimation-in-time FFT in which every product and sum is rounded
/// to half precision (no fused operations). Errc::invalid_argument when N is
/// not a power of two; a non-finite value is reported in `overflow`.
FftResult fft_raw(const HalfVector& x, std::span<const ButterflyFault> faults = {});

/// As fft_raw but Errc::overflow when any value leaves the finite range.
HalfVector fft(const HalfVector& x);

/// Double-precision DFT, for references and tests.
std::vector<std::complex<double>> dft_reference(std::span<const std::complex<double>> x);

/// Programmed reference pair. y and Y should be a transform pair with no
/// zero entries.
struct PlancherelReference {
  HalfVector y;
  HalfVector Y;
  bool programmed_at_startup = true;

  std::size_t size() const noexcept { return y.size(); }
};

/// Seeded complex white noise y (expected squared norm 1, or exactly 1 when
/// `unit_norm`), Y its double-precision transform rounded to half. Draws are
/// repeated until no component of y or Y is zero.
PlancherelReference make_reference(std::size_t n, std::uint64_t seed, bool unit_norm = false);

/// Independent y and Y: deliberately not a transform pair.
PlancherelReference make_non_pair(std::size_t n, std::uint64_t seed);

struct CheckVerdict {
  double residual = 0.0;
  double threshold = 0.0;
  bool attack = false;
};

/// residual = |<x, y*> - (1/N) <X, Y*>| with both inner products
/// accumulated in single precision. A non-finite residual is an attack.
CheckVerdict plancherel_check(const HalfVector& x, const HalfVector& x_observed, const PlancherelReference& ref,
                              double threshold);

/// Unit-scale complex white noise (standard normal components) rounded to
/// half.
HalfVector white_noise(std::size_t n, Rng& rng);

using FftInputGenerator = std::function<HalfVector(std::size_t n, Rng&)>;

/// margin * max residual over `trials` attack-free runs with the given
/// reference. Errc::invalid_argument for trials < 100 or margin < 1,
/// Errc::overflow if any run overflows.
double calibrate_threshold(const PlancherelReference& ref, std::uint64_t trials, double margin, std::uint64_t seed,
                           const FftInputGenerator& inputs = {});

/// Same with a reference drawn from the seed (make_reference(n, seed)).
double calibrate_threshold(std::size_t n, std::uint64_t trials, double margin, std::uint64_t seed);

/// In-engine tampering for one transform.
struct FftTamper {
  std::vector<ButterflyFault> faults;
  /// Output k is replaced by output permutation[k]; empty means none.
  std::vector<std::size_t> permutation;
  /// Added to the outputs after the transform; empty means none.
  HalfVector output_delta;
};

struct FftRun {
  HalfVector output;
  CheckVerdict verdict;
  bool overflow = false;
};

/// FFT datapath plus its Plancherel predictor and checker.
class FftEngine {
 public:
  FftEngine(PlancherelReference ref, double threshold);

  void program_reference(PlancherelReference ref);
  const PlancherelReference& reference() const noexcept { return ref_; }
  double threshold() const noexcept { return threshold_; }

  /// Models the zeroing Trojan: the reference lines read as zero no matter
  /// what is programmed.
  void set_reference_zeroed(bool zeroed) { zeroed_ = zeroed; }
  bool reference_zeroed() const noexcept { return zeroed_; }

  FftRun run(const HalfVector& x, const FftTamper& tamper = {}) const;

 private:
  PlancherelReference ref_;
  double threshold_;
  bool zeroed_ = false;
};

enum class SelftestVerdict { checker_alive, checker_compromised };
std::string_view to_string(SelftestVerdict v);

/// Programs `non_pair` into a copy of the engine, runs one transform of a
/// fixed test input and reports whether the checker raised an alarm.
/// Errc::non_pair_required when `non_pair` is in fact a transform pair.
SelftestVerdict reference_selftest(const FftEngine& engine, const PlancherelReference& non_pair);

/// Draws the tampering of one trial.
using FftAttackGenerator = std::function<FftTamper(const FftEngine&, const HalfVector& x, Rng&)>;

/// One bit of one butterfly output, all uniform: stage, butterfly, top or
/// bottom, real or imaginary part, and bit position 0..15.
FftAttackGenerator butterfly_flip_generator();
/// Uniformly random non-identity output permutation.
FftAttackGenerator permutation_generator();
/// Output change orthogonal to Y: X_j += d, X_k -= d * conj(Y_j) / conj(Y_k),
/// which leaves the checked inner product unchanged.
FftAttackGenerator plancherel_preserving_generator();
FftAttackGenerator fft_attack_free_generator();

struct FftCampaignOptions {
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  /// Run every input once more without tampering and count alarms.
  bool paired_clean = true;
  /// Name recorded per trial in the report.
  std::string kind = "fft";
};

DetectionReport fft_attack_campaign(const FftEngine& engine, const FftAttackGenerator& gen,
                                    const FftCampaignOptions& opts);

/// `N` on the first line, then one line per index with the bit patterns of
/// y.re y.im Y.re Y.im as 4-digit hex.
std::string write_reference(const PlancherelReference& ref);
PlancherelReference parse_reference(std::string_view text);

}  // namespace tpad
