#include "echochain/waveform.hpp"

#include <algorithm>
#include <cmath>

#include "echochain/dsp.hpp"
#include "echochain/frontend.hpp"

namespace echochain {

double lfm_phase(const PingDefinition& def, double t) {
  const double rate = def.bandwidth() / def.duration;  // Hz/s
  return 2.0 * kPi * ((def.f_start - def.centre_frequency()) * t + 0.5 * rate * t * t);
}

double taper_envelope(std::size_t n, std::size_t count, double taper_fraction) {
  const double ramp = taper_fraction * static_cast<double>(count);
  if (ramp <= 0.0) return 1.0;
  const double from_start = static_cast<double>(n);
  const double from_end = static_cast<double>(count - 1 - n);
  const double edge = std::min(from_start, from_end);
  if (edge >= ramp) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * edge / ramp));
}

ComplexSeries generate_lfm(const PingDefinition& def) {
  def.validate();
  const auto count = static_cast<std::size_t>(std::llround(def.duration * def.adc_rate));
  if (count < 2) throw ArgumentError("pulse must span at least two samples");
  std::vector<cplx> y(count);
  for (std::size_t n = 0; n < count; ++n) {
    const double t = static_cast<double>(n) / def.adc_rate;
    y[n] = std::polar(taper_envelope(n, count, def.taper_fraction), lfm_phase(def, t));
  }
  return ComplexSeries(std::move(y), def.adc_rate);
}

ComplexSeries normalize_transmit(const ComplexSeries& y_tx) {
  double peak = 0.0;
  for (const auto& v : y_tx.samples()) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw ArgumentError("transmit signal is empty or all zero");
  std::vector<cplx> out(y_tx.samples().begin(), y_tx.samples().end());
  for (auto& v : out) v /= peak;
  return ComplexSeries(std::move(out), y_tx.sample_rate(), y_tx.group_delay());
}

double effective_duration(const ComplexSeries& autocorr, std::size_t half_span) {
  const auto s = autocorr.samples();
  if (s.empty()) throw InternalError("empty autocorrelation");
  std::size_t peak = 0;
  double peak_power = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::norm(s[i]) > peak_power) {
      peak_power = std::norm(s[i]);
      peak = i;
    }
  }
  if (!(peak_power > 0.0)) throw InternalError("zero autocorrelation");
  const std::size_t lo = peak >= half_span ? peak - half_span : 0;
  const std::size_t hi = std::min(s.size() - 1, peak + half_span);
  double sum = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) sum += std::norm(s[i]);
  return sum / (peak_power * autocorr.sample_rate());
}

MatchedFilter build_matched_filter(const ComplexSeries& normalized_tx,
                                   std::span<const FilterStage> plan,
                                   double nominal_duration) {
  MatchedFilter mf;
  mf.nominal_duration = nominal_duration > 0.0
                            ? nominal_duration
                            : static_cast<double>(normalized_tx.size()) /
                                  normalized_tx.sample_rate();
  mf.replica = apply_stages(normalized_tx, plan);
  mf.l2_norm_sq = dsp::energy(mf.replica.samples());
  if (!(mf.l2_norm_sq > 0.0)) throw InternalError("matched filter has zero energy");

  const auto mirrored = dsp::conj_reverse(mf.replica.samples());
  auto auto_full = dsp::convolve(mf.replica.samples(), mirrored);
  for (auto& v : auto_full) v /= mf.l2_norm_sq;
  mf.zero_lag = mf.replica.size() - 1;
  // Lag zero is exactly ||y||^2 / ||y||^2.
  auto_full[mf.zero_lag] = cplx(1.0, 0.0);
  mf.autocorr = ComplexSeries(std::move(auto_full), mf.replica.sample_rate());

  const auto half_span = static_cast<std::size_t>(
      std::llround(mf.nominal_duration * mf.replica.sample_rate()));
  mf.effective_duration = effective_duration(mf.autocorr, half_span);
  return mf;
}

MatchedFilter matched_filter_for(const PingDefinition& def) {
  return build_matched_filter(normalize_transmit(generate_lfm(def)), def.filter_plan,
                              def.duration);
}

}  // namespace echochain
