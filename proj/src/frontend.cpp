#include "echochain/frontend.hpp"

#include <cmath>
#include <numeric>

#include "echochain/dsp.hpp"

namespace echochain {

std::int64_t DecimationPlan::total_decimation() const {
  std::int64_t product = 1;
  for (const auto& s : stages) product *= s.decimation;
  return product;
}

DecimationPlan DecimationPlan::from_stages(std::vector<FilterStage> stages,
                                           double input_rate) {
  for (const auto& s : stages) s.validate();
  DecimationPlan plan;
  plan.stages = std::move(stages);
  plan.input_rate = input_rate;
  plan.output_rate = input_rate / static_cast<double>(plan.total_decimation());
  return plan;
}

std::vector<cplx> design_lowpass(double pass_edge, double stop_edge, double rate,
                                 double stopband_db) {
  if (!(pass_edge > 0.0) || !(stop_edge > pass_edge) || !(stop_edge < rate / 2.0)) {
    throw ConfigError("lowpass edges must satisfy 0 < pass < stop < rate/2");
  }
  const double a = stopband_db;
  double beta = 0.0;
  if (a > 50.0) {
    beta = 0.1102 * (a - 8.7);
  } else if (a >= 21.0) {
    beta = 0.5842 * std::pow(a - 21.0, 0.4) + 0.07886 * (a - 21.0);
  }
  const double dw = 2.0 * kPi * (stop_edge - pass_edge) / rate;
  auto taps = static_cast<std::size_t>(std::ceil((a - 7.95) / (2.285 * dw))) + 1;
  if (taps % 2 == 0) ++taps;
  taps = std::max<std::size_t>(taps, 3);

  const double cutoff = 0.5 * (pass_edge + stop_edge) / rate;  // cycles/sample
  const double mid = 0.5 * static_cast<double>(taps - 1);
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  std::vector<cplx> h(taps);
  double sum = 0.0;
  for (std::size_t i = 0; i < taps; ++i) {
    const double x = static_cast<double>(i) - mid;
    const double sinc = x == 0.0 ? 2.0 * cutoff
                                 : std::sin(2.0 * kPi * cutoff * x) / (kPi * x);
    const double r = x / mid;
    const double w = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) /
                     i0_beta;
    h[i] = sinc * w;
    sum += sinc * w;
  }
  for (auto& v : h) v /= sum;
  return h;
}

DecimationPlan design_plan(const PingDefinition& def, double target_rate_factor) {
  if (!(target_rate_factor >= 1.1)) {
    throw ArgumentError("target rate factor must be >= 1.1");
  }
  const double fs = def.adc_rate;
  // A constant-frequency pulse still occupies roughly 2/tau around f_c.
  const double bw = std::max(def.bandwidth(), 2.0 / def.duration);
  const double target = target_rate_factor * bw;
  const double ratio = fs / target;
  if (!(ratio >= 1.0)) {
    throw ConfigError("ADC rate is below the requested output rate");
  }
  const auto total = static_cast<std::int64_t>(std::floor(ratio * (1.0 + 1e-12)));

  // Most balanced two-factor split, larger factor first.
  std::int64_t d2 = 1;
  for (std::int64_t k = 2; k * k <= total; ++k) {
    if (total % k == 0) d2 = k;
  }
  const std::int64_t d1 = total / d2;

  const double out_rate = fs / static_cast<double>(total);
  const double pass = 0.5 * bw;
  double transition = std::min(0.1 * bw, out_rate - bw);
  transition = std::min(transition, 0.999 * (out_rate / 2.0) - pass);
  if (!(transition > 0.0)) {
    throw ConfigError("no room for a transition band at the chosen output rate");
  }
  const double final_stop = pass + transition;

  std::vector<FilterStage> stages;
  if (d2 > 1) {
    const double mid_rate = fs / static_cast<double>(d1);
    // Anything folding into [-final_stop, final_stop] must be in the stopband.
    const double stop1 = std::min(mid_rate - final_stop, 0.999 * fs / 2.0);
    stages.push_back({design_lowpass(pass, stop1, fs), static_cast<int>(d1)});
    stages.push_back({design_lowpass(pass, final_stop, mid_rate), static_cast<int>(d2)});
  } else {
    stages.push_back({design_lowpass(pass, final_stop, fs), static_cast<int>(d1)});
  }
  return DecimationPlan::from_stages(std::move(stages), fs);
}

ComplexSeries apply_stages(const ComplexSeries& y,
                           std::span<const FilterStage> stages) {
  std::vector<cplx> current(y.samples().begin(), y.samples().end());
  double rate = y.sample_rate();
  double delay = y.group_delay();
  for (const auto& stage : stages) {
    stage.validate();
    auto full = dsp::convolve(current, stage.coefficients);
    const auto d = static_cast<std::size_t>(stage.decimation);
    std::vector<cplx> kept;
    kept.reserve(full.size() / d + 1);
    for (std::size_t i = 0; i < full.size(); i += d) kept.push_back(full[i]);
    current = std::move(kept);
    delay = (delay + 0.5 * static_cast<double>(stage.coefficients.size() - 1)) /
            static_cast<double>(stage.decimation);
    rate /= static_cast<double>(stage.decimation);
  }
  return ComplexSeries(std::move(current), rate, delay);
}

ComplexSeries filter_decimate(const ComplexSeries& y, const DecimationPlan& plan) {
  if (std::abs(y.sample_rate() - plan.input_rate) > 1e-9 * plan.input_rate) {
    throw ArgumentError("input sample rate does not match the decimation plan");
  }
  auto out = apply_stages(y, plan.stages);
  // Report the exact plan rate rather than the accumulated quotient.
  return ComplexSeries(out.vec(), plan.output_rate, out.group_delay());
}

ComplexSeries demodulate(std::span<const double> real_samples, double rate,
                         double f_c) {
  std::vector<cplx> out(real_samples.size());
  for (std::size_t n = 0; n < real_samples.size(); ++n) {
    const double ph = -2.0 * kPi * f_c * static_cast<double>(n) / rate;
    out[n] = real_samples[n] * cplx(std::cos(ph), std::sin(ph));
  }
  return ComplexSeries(std::move(out), rate);
}

cplx frequency_response(std::span<const cplx> coefficients, double f, double rate) {
  cplx acc{};
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    const double ph = -2.0 * kPi * f * static_cast<double>(i) / rate;
    acc += coefficients[i] * cplx(std::cos(ph), std::sin(ph));
  }
  return acc;
}

}  // namespace echochain
