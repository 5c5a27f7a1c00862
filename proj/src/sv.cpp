#include "echochain/sv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "echochain/dsp.hpp"
#include "echochain/ts.hpp"

namespace echochain {

double psi_scaled(const SystemConfig& sys, double f) {
  if (!(f > 0.0)) throw ArgumentError("frequency must be positive");
  const double ratio = sys.f_nominal / f;
  return sys.psi_nominal * ratio * ratio;
}

std::vector<double> normalized_hann(std::size_t n) {
  if (n == 0) throw ArgumentError("window length must be positive");
  std::vector<double> w(n);
  const auto half = static_cast<double>(n / 2);
  long double sum_sq = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    const double i = static_cast<double>(k) - half;
    w[k] = 0.5 * (1.0 + std::cos(2.0 * kPi * i / static_cast<double>(n)));
    sum_sq += static_cast<long double>(w[k]) * w[k];
  }
  const auto scale = static_cast<double>(std::sqrt(static_cast<long double>(n) / sum_sq));
  for (auto& v : w) v *= scale;
  return w;
}

std::vector<double> sv_samples(const CompressedPing& cp, const MatchedFilter& mf,
                               const SystemConfig& sys, const Environment& env,
                               const PingDefinition& def) {
  const double fc = def.centre_frequency();
  const double lambda = wavelength(env, fc);
  const double g0 = sys.gain_table(fc);
  const double alpha = env.absorption_table(fc);
  const double budget =
      to_db(def.transmit_power * lambda * lambda * env.sound_speed *
            mf.effective_duration * psi_scaled(sys, fc) * g0 * g0 / (32.0 * kPi * kPi));
  const auto power = received_power(cp.mean, sys);
  std::vector<double> sv(power.size());
  for (std::size_t n = 0; n < power.size(); ++n) {
    const double r = cp.range[n];
    if (!(r > 0.0)) {
      sv[n] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    sv[n] = to_db(power[n]) + 20.0 * std::log10(r / env.reference_range) +
            2.0 * alpha * r - budget;
  }
  return sv;
}

std::size_t default_sv_window(const PingDefinition& def, double rate) {
  const auto minimum =
      static_cast<std::size_t>(std::ceil(2.0 * def.duration * rate - 1e-9));
  return next_power_of_two(std::max<std::size_t>(minimum, 2));
}

SvSpectrogram sv_spectrum(const CompressedPing& cp, const MatchedFilter& mf,
                          const SystemConfig& sys, const Environment& env,
                          const PingDefinition& def, std::size_t n_w,
                          std::size_t hop) {
  const double rate = cp.sample_rate();
  if (n_w == 0) n_w = default_sv_window(def, rate);
  if (!is_power_of_two(n_w)) throw ArgumentError("Sv window length must be a power of 2");
  if (static_cast<double>(n_w) < 2.0 * def.duration * rate - 1e-9) {
    throw ArgumentError("Sv window must cover at least twice the pulse duration");
  }
  if (hop == 0) hop = std::max<std::size_t>(n_w / 2, 1);

  SvSpectrogram out;
  out.window_length = n_w;
  out.hop = hop;
  out.window_duration = static_cast<double>(n_w) / rate;

  const auto window = normalized_hann(n_w);
  const auto auto_dft = dsp::dft_sampled(mf.autocorr.samples(), n_w, mf.zero_lag);
  double auto_max = 0.0;
  for (const auto& v : auto_dft) auto_max = std::max(auto_max, std::abs(v));

  const double fc = def.centre_frequency();
  struct Bin {
    std::size_t k;
    double f;
    double budget_db;  // everything except 10 log P and the absorption term
    double alpha;
  };
  std::vector<Bin> bins;
  for (std::size_t k = 0; k < n_w; ++k) {
    const double f = fc + dft_bin_frequency(k, n_w, rate);
    if (f < def.f_start || f > def.f_stop) continue;
    if (std::abs(auto_dft[k]) < 1e-6 * auto_max) continue;
    const double lambda = wavelength(env, f);
    const double g0 = sys.gain_table(f);
    const double budget =
        to_db(def.transmit_power * lambda * lambda * env.sound_speed *
              out.window_duration * psi_scaled(sys, f) * g0 * g0 / (32.0 * kPi * kPi));
    bins.push_back({k, f, budget, env.absorption_table(f)});
  }
  std::sort(bins.begin(), bins.end(), [](const Bin& a, const Bin& b) { return a.f < b.f; });
  for (const auto& b : bins) out.frequencies.push_back(b.f);

  const double k_power = static_cast<double>(sys.num_sectors) / 8.0 * sys.impedance_factor();
  const auto y = cp.mean.samples();
  const std::size_t half = n_w / 2;
  std::vector<cplx> buf(n_w);
  for (std::size_t center = half; center + half <= y.size(); center += hop) {
    const std::size_t start = center - half;
    for (std::size_t i = 0; i < n_w; ++i) {
      buf[i] = window[i] * y[start + i] * cp.range[start + i];
    }
    const auto spectrum = dsp::fft(buf, n_w);
    const double r = std::sqrt(cp.range[start] * cp.range[start + n_w - 1]);
    out.centers.push_back(center);
    out.ranges.push_back(r);
    for (const auto& b : bins) {
      const double p = k_power * std::norm(spectrum[b.k] / auto_dft[b.k]);
      out.sv.push_back(to_db(p) + 2.0 * b.alpha * r - b.budget_db);
    }
  }
  return out;
}

}  // namespace echochain
