#include "tpad/fft.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "tpad/error.hpp"

namespace tpad {

Half Half::from_double(double v) {
  const std::uint16_t sign = std::signbit(v) ? 0x8000 : 0;
  if (std::isnan(v)) return from_bits(sign | 0x7E00);
  const double a = std::fabs(v);
  // 65520 is the midpoint between the largest finite half and 2^16; the tie
  // goes to the even neighbour, which is infinity.
  if (a >= 65520.0) return from_bits(sign | 0x7C00);
  if (a == 0.0) return from_bits(sign);
  int e = 0;
  std::frexp(a, &e);
  const int exp = e - 1;  // a in [2^exp, 2^(exp+1))
  const int quantum = exp < -14 ? -24 : exp - 10;
  // Scaling by a power of two is exact, so nearbyint does the only rounding
  // (ties to even in the default mode).
  const double steps = std::nearbyint(std::ldexp(a, -quantum));
  const double rounded = std::ldexp(steps, quantum);
  if (rounded < 0x1p-14) return from_bits(sign | static_cast<std::uint16_t>(steps));
  std::frexp(rounded, &e);
  const int biased = e - 1 + 15;
  const auto mant = static_cast<std::uint16_t>(std::ldexp(rounded, -(e - 1 - 10)) - 1024.0);
  return from_bits(static_cast<std::uint16_t>(sign | (biased << 10) | mant));
}

double Half::to_double() const {
  const double sign = (bits_ & 0x8000) ? -1.0 : 1.0;
  const int biased = (bits_ >> 10) & 0x1F;
  const int mant = bits_ & 0x3FF;
  if (biased == 0x1F) return mant ? std::nan("") : sign * HUGE_VAL;
  if (biased == 0) return sign * std::ldexp(mant, -24);
  return sign * std::ldexp(1024 + mant, biased - 25);
}

HalfVector to_half(std::span<const std::complex<double>> v) {
  HalfVector out;
  out.reserve(v.size());
  for (auto z : v) out.push_back(HalfComplex::from(z));
  return out;
}

namespace {

// Each helper rounds once; inputs are exact halves, so the double result
// before rounding is exact too.
Half hadd(Half a, Half b) { return Half::from_double(a.to_double() + b.to_double()); }
Half hsub(Half a, Half b) { return Half::from_double(a.to_double() - b.to_double()); }
Half hmul(Half a, Half b) { return Half::from_double(a.to_double() * b.to_double()); }

HalfComplex cadd(HalfComplex a, HalfComplex b) { return {hadd(a.re, b.re), hadd(a.im, b.im)}; }
HalfComplex csub(HalfComplex a, HalfComplex b) { return {hsub(a.re, b.re), hsub(a.im, b.im)}; }
HalfComplex cmul(HalfComplex a, HalfComplex b) {
  return {hsub(hmul(a.re, b.re), hmul(a.im, b.im)), hadd(hmul(a.re, b.im), hmul(a.im, b.re))};
}

void flip_bit(HalfComplex& z, bool imag, unsigned bit) {
  Half& h = imag ? z.im : z.re;
  h = Half::from_bits(static_cast<std::uint16_t>(h.bits() ^ (1U << bit)));
}

void require_power_of_two(std::size_t n) {
  if (n == 0 || !std::has_single_bit(n)) throw Error(Errc::invalid_argument, "FFT size must be a power of two");
}

bool all_finite(const HalfVector& v) {
  return std::all_of(v.begin(), v.end(), [](const HalfComplex& z) { return z.is_finite(); });
}

bool has_zero_component(const HalfVector& v) {
  return std::any_of(v.begin(), v.end(), [](const HalfComplex& z) { return z.re.is_zero() || z.im.is_zero(); });
}

std::vector<std::complex<double>> values(const HalfVector& v) {
  std::vector<std::complex<double>> out;
  out.reserve(v.size());
  for (const auto& z : v) out.push_back(z.value());
  return out;
}

}  // namespace

FftResult fft_raw(const HalfVector& x, std::span<const ButterflyFault> faults) {
  const std::size_t n = x.size();
  require_power_of_two(n);
  const unsigned stages = static_cast<unsigned>(std::countr_zero(n));
  for (const auto& f : faults) {
    if (f.stage >= stages || f.butterfly >= n / 2 || f.bit > 15)
      throw Error(Errc::index_out_of_range, "butterfly fault out of range");
  }

  HalfVector a(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (unsigned b = 0; b < stages; ++b) r |= ((i >> b) & 1U) << (stages - 1 - b);
    a[r] = x[i];
  }

  for (unsigned s = 0; s < stages; ++s) {
    const std::size_t m = std::size_t{2} << s;
    const std::size_t half = m / 2;
    for (std::size_t k = 0; k < n; k += m) {
      for (std::size_t j = 0; j < half; ++j) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
        const HalfComplex w = j == 0 ? HalfComplex{Half::from_double(1.0), Half::from_double(0.0)}
                                     : HalfComplex::from(std::polar(1.0, angle));
        const HalfComplex t = cmul(w, a[k + j + half]);
        HalfComplex top = cadd(a[k + j], t);
        HalfComplex bottom = csub(a[k + j], t);
        const std::size_t id = k / m * half + j;
        for (const auto& f : faults) {
          if (f.stage == s && f.butterfly == id) flip_bit(f.bottom ? bottom : top, f.imag, f.bit);
        }
        a[k + j] = top;
        a[k + j + half] = bottom;
      }
    }
  }
  const bool overflow = !all_finite(a);
  return {std::move(a), overflow};
}

HalfVector fft(const HalfVector& x) {
  FftResult r = fft_raw(x);
  if (r.overflow) throw Error(Errc::overflow, "FFT overflowed the half-precision range");
  return std::move(r.output);
}

std::vector<std::complex<double>> dft_reference(std::span<const std::complex<double>> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      // Reduce the index product first so the angle stays accurate.
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((i * k) % n) / static_cast<double>(n);
      acc += x[i] * std::polar(1.0, angle);
    }
    out[k] = acc;
  }
  return out;
}

HalfVector white_noise(std::size_t n, Rng& rng) {
  HalfVector v(n);
  for (auto& z : v) z = HalfComplex::from({rng.normal(), rng.normal()});
  return v;
}

PlancherelReference make_reference(std::size_t n, std::uint64_t seed, bool unit_norm) {
  require_power_of_two(n);
  Rng rng(seed);
  const double sigma = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  for (;;) {
    std::vector<std::complex<double>> y(n);
    double norm2 = 0.0;
    for (auto& z : y) {
      z = {sigma * rng.normal(), sigma * rng.normal()};
      norm2 += std::norm(z);
    }
    if (unit_norm)
      for (auto& z : y) z /= std::sqrt(norm2);
    PlancherelReference ref;
    ref.y = to_half(y);
    ref.Y = to_half(dft_reference(values(ref.y)));
    if (!has_zero_component(ref.y) && !has_zero_component(ref.Y)) return ref;
  }
}

PlancherelReference make_non_pair(std::size_t n, std::uint64_t seed) {
  require_power_of_two(n);
  Rng rng(seed);
  const double sigma = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  const double big = sigma * std::sqrt(static_cast<double>(n));
  for (;;) {
    PlancherelReference ref;
    for (std::size_t i = 0; i < n; ++i) {
      ref.y.push_back(HalfComplex::from({sigma * rng.normal(), sigma * rng.normal()}));
      ref.Y.push_back(HalfComplex::from({big * rng.normal(), big * rng.normal()}));
    }
    if (!has_zero_component(ref.y) && !has_zero_component(ref.Y)) return ref;
  }
}

CheckVerdict plancherel_check(const HalfVector& x, const HalfVector& x_observed, const PlancherelReference& ref,
                              double threshold) {
  const std::size_t n = x.size();
  if (x_observed.size() != n || ref.y.size() != n || ref.Y.size() != n)
    throw Error(Errc::width_mismatch, "Plancherel check needs equal lengths");
  if (!(threshold >= 0.0)) throw Error(Errc::invalid_argument, "threshold must be >= 0");
  // a * conj(b) accumulated in single precision; half products are exact in
  // float, every sum rounds.
  auto inner = [](const HalfVector& a, const HalfVector& b) {
    float re = 0.0f, im = 0.0f;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto ar = static_cast<float>(a[i].re.to_double()), ai = static_cast<float>(a[i].im.to_double());
      const auto br = static_cast<float>(b[i].re.to_double()), bi = static_cast<float>(b[i].im.to_double());
      const float pr = ar * br + ai * bi;
      const float pi = ai * br - ar * bi;
      re += pr;
      im += pi;
    }
    return std::pair{re, im};
  };
  const auto [lr, li] = inner(x, ref.y);
  auto [rr, ri] = inner(x_observed, ref.Y);
  const float scale = 1.0f / static_cast<float>(n);
  rr *= scale;
  ri *= scale;
  CheckVerdict v;
  v.residual = static_cast<double>(std::hypot(lr - rr, li - ri));
  v.threshold = threshold;
  v.attack = !(v.residual <= threshold);
  return v;
}

double calibrate_threshold(const PlancherelReference& ref, std::uint64_t trials, double margin, std::uint64_t seed,
                           const FftInputGenerator& inputs) {
  if (trials < 100) throw Error(Errc::invalid_argument, "calibration needs at least 100 trials");
  if (!(margin >= 1.0) || !std::isfinite(margin)) throw Error(Errc::invalid_argument, "margin must be >= 1");
  const std::size_t n = ref.size();
  require_power_of_two(n);
  double worst = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    HalfVector x = inputs ? inputs(n, rng) : white_noise(n, rng);
    FftResult r = fft_raw(x);
    if (r.overflow) throw Error(Errc::overflow, "calibration run overflowed");
    worst = std::max(worst, plancherel_check(x, r.output, ref, 0.0).residual);
  }
  return margin * worst;
}

double calibrate_threshold(std::size_t n, std::uint64_t trials, double margin, std::uint64_t seed) {
  return calibrate_threshold(make_reference(n, seed), trials, margin, seed);
}

FftEngine::FftEngine(PlancherelReference ref, double threshold) : threshold_(threshold) {
  if (!(threshold >= 0.0)) throw Error(Errc::invalid_argument, "threshold must be >= 0");
  program_reference(std::move(ref));
}

void FftEngine::program_reference(PlancherelReference ref) {
  require_power_of_two(ref.y.size());
  if (ref.Y.size() != ref.y.size()) throw Error(Errc::width_mismatch, "reference y and Y differ in length");
  ref_ = std::move(ref);
}

FftRun FftEngine::run(const HalfVector& x, const FftTamper& tamper) const {
  if (x.size() != ref_.size()) throw Error(Errc::width_mismatch, "input length differs from the engine size");
  FftResult r = fft_raw(x, tamper.faults);
  HalfVector out = std::move(r.output);
  if (!tamper.permutation.empty()) {
    if (tamper.permutation.size() != out.size()) throw Error(Errc::width_mismatch, "permutation length");
    HalfVector permuted(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) permuted[k] = out.at(tamper.permutation[k]);
    out = std::move(permuted);
  }
  if (!tamper.output_delta.empty()) {
    if (tamper.output_delta.size() != out.size()) throw Error(Errc::width_mismatch, "output delta length");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = cadd(out[k], tamper.output_delta[k]);
  }
  FftRun run;
  if (zeroed_) {
    PlancherelReference zero{HalfVector(ref_.size()), HalfVector(ref_.size()), ref_.programmed_at_startup};
    run.verdict = plancherel_check(x, out, zero, threshold_);
  } else {
    run.verdict = plancherel_check(x, out, ref_, threshold_);
  }
  run.overflow = r.overflow || !all_finite(out);
  run.output = std::move(out);
  return run;
}

std::string_view to_string(SelftestVerdict v) {
  return v == SelftestVerdict::checker_alive ? "checker alive" : "checker compromised";
}

SelftestVerdict reference_selftest(const FftEngine& engine, const PlancherelReference& non_pair) {
  const std::size_t n = engine.reference().size();
  if (non_pair.y.size() != n || non_pair.Y.size() != n)
    throw Error(Errc::width_mismatch, "self-test reference has the wrong length");
  const auto exact = dft_reference(values(non_pair.y));
  double scale = 1.0, dev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    scale = std::max(scale, std::abs(exact[k]));
    dev = std::max(dev, std::abs(non_pair.Y[k].value() - exact[k]));
  }
  if (dev <= 0x1p-6 * scale)
    throw Error(Errc::non_pair_required, "self-test needs a reference that is not a transform pair");
  FftEngine probe = engine;
  probe.program_reference(non_pair);
  Rng rng(0x5e1f7e57);
  FftRun run = probe.run(white_noise(n, rng));
  return run.verdict.attack ? SelftestVerdict::checker_alive : SelftestVerdict::checker_compromised;
}

FftAttackGenerator butterfly_flip_generator() {
  return [](const FftEngine& engine, const HalfVector&, Rng& rng) {
    const std::size_t n = engine.reference().size();
    ButterflyFault f;
    f.stage = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(std::countr_zero(n))));
    f.butterfly = static_cast<std::size_t>(rng.below(n / 2));
    f.bottom = rng.coin();
    f.imag = rng.coin();
    f.bit = static_cast<unsigned>(rng.below(16));
    FftTamper t;
    t.faults.push_back(f);
    return t;
  };
}

FftAttackGenerator permutation_generator() {
  return [](const FftEngine& engine, const HalfVector&, Rng& rng) {
    const std::size_t n = engine.reference().size();
    if (n < 2) throw Error(Errc::invalid_argument, "permutation needs N >= 2");
    FftTamper t;
    t.permutation.resize(n);
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) t.permutation[i] = i;
      rng.shuffle(t.permutation);
      for (std::size_t i = 0; i < n; ++i)
        if (t.permutation[i] != i) return t;
    }
  };
}

FftAttackGenerator plancherel_preserving_generator() {
  return [](const FftEngine& engine, const HalfVector&, Rng& rng) {
    const auto& Y = engine.reference().Y;
    const std::size_t n = Y.size();
    if (n < 2) throw Error(Errc::invalid_argument, "needs N >= 2");
    auto pick = rng.sample_without_replacement(n, 2);
    const std::size_t j = pick[0], k = pick[1];
    const std::complex<double> d{rng.normal(), rng.normal()};
    FftTamper t;
    t.output_delta.assign(n, HalfComplex::from({0.0, 0.0}));
    t.output_delta[j] = HalfComplex::from(d);
    t.output_delta[k] = HalfComplex::from(-t.output_delta[j].value() * std::conj(Y[j].value()) / std::conj(Y[k].value()));
    return t;
  };
}

FftAttackGenerator fft_attack_free_generator() {
  return [](const FftEngine&, const HalfVector&, Rng&) { return FftTamper{}; };
}

DetectionReport fft_attack_campaign(const FftEngine& engine, const FftAttackGenerator& gen,
                                    const FftCampaignOptions& opts) {
  DetectionReport rep;
  const std::size_t n = engine.reference().size();
  for (std::uint64_t t = 0; t < opts.trials; ++t) {
    Rng rng(derive_seed(opts.seed, t));
    HalfVector x = white_noise(n, rng);
    FftTamper tamper = gen(engine, x, rng);
    const bool detected = engine.run(x, tamper).verdict.attack;
    ++rep.trials;
    rep.detected += detected;
    auto& [k_trials, k_detected] = rep.per_kind[opts.kind];
    ++k_trials;
    k_detected += detected;
    rep.records.push_back({t, opts.kind, detected, detected ? std::optional<std::uint64_t>{0} : std::nullopt});
    if (opts.paired_clean) {
      ++rep.clean_trials;
      rep.false_positives += engine.run(x).verdict.attack;
    }
  }
  return rep;
}

std::string write_reference(const PlancherelReference& ref) {
  if (ref.Y.size() != ref.y.size()) throw Error(Errc::width_mismatch, "reference y and Y differ in length");
  std::string out = std::to_string(ref.size()) + "\n";
  char line[32];
  for (std::size_t i = 0; i < ref.size(); ++i) {
    std::snprintf(line, sizeof line, "%04x %04x %04x %04x\n", ref.y[i].re.bits(), ref.y[i].im.bits(),
                  ref.Y[i].re.bits(), ref.Y[i].im.bits());
    out += line;
  }
  return out;
}

PlancherelReference parse_reference(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  // Trailing blank lines are tolerated.
  while (!lines.empty() && lines.back().find_first_not_of(" \t\r") == std::string_view::npos) lines.pop_back();
  if (lines.empty()) throw SyntaxError(1, 1, "empty reference file");
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    return s;
  };
  std::size_t n = 0;
  std::string_view head = trim(lines[0]);
  auto [p, ec] = std::from_chars(head.data(), head.data() + head.size(), n);
  if (ec != std::errc{} || p != head.data() + head.size() || n == 0 || !std::has_single_bit(n))
    throw SyntaxError(1, 1, "first line must be a power-of-two size");
  if (lines.size() != n + 1)
    throw SyntaxError(static_cast<int>(lines.size()), 1,
                      "expected " + std::to_string(n) + " entries, found " + std::to_string(lines.size() - 1));
  PlancherelReference ref;
  for (std::size_t i = 1; i <= n; ++i) {
    std::string_view s = trim(lines[i]);
    std::uint16_t w[4];
    std::size_t at = 0;
    for (int f = 0; f < 4; ++f) {
      while (at < s.size() && s[at] == ' ') ++at;
      std::size_t start = at;
      while (at < s.size() && s[at] != ' ') ++at;
      auto [q, err] = std::from_chars(s.data() + start, s.data() + at, w[f], 16);
      if (at - start != 4 || err != std::errc{} || q != s.data() + at)
        throw SyntaxError(static_cast<int>(i + 1), static_cast<int>(start + 1), "expected a 4-digit hex half");
    }
    while (at < s.size() && s[at] == ' ') ++at;
    if (at != s.size()) throw SyntaxError(static_cast<int>(i + 1), static_cast<int>(at + 1), "trailing text");
    ref.y.push_back({Half::from_bits(w[0]), Half::from_bits(w[1])});
    ref.Y.push_back({Half::from_bits(w[2]), Half::from_bits(w[3])});
  }
  return ref;
}

}  // namespace tpad
