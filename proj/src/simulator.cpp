#include "echochain/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "echochain/beamproc.hpp"
#include "echochain/dsp.hpp"
#include "echochain/sv.hpp"
#include "echochain/ts.hpp"

namespace echochain {

void Scene::validate() const {
  if (!(max_range > 0.0)) throw ConfigError("scene max_range must be positive");
  if (noise_power < 0.0) throw ConfigError("noise power must be non-negative");
  for (const auto& t : point_targets) {
    if (!(t.range > 0.0)) throw ConfigError("target range must be positive");
    if (t.sigma_table) {
      if (t.sigma_table->empty()) throw ConfigError("empty sigma_bs table");
      for (const auto& [f, s] : t.sigma_table->points) {
        if (!(s > 0.0)) throw ConfigError("sigma_bs must be positive");
      }
    } else if (!(t.sigma_bs > 0.0)) {
      throw ConfigError("sigma_bs must be positive");
    }
  }
  if (volume_field) {
    const auto& v = *volume_field;
    if (v.density < 0.0) throw ConfigError("density must be non-negative");
    if (!(v.sigma_bs > 0.0)) throw ConfigError("sigma_bs must be positive");
    if (!(v.range_min > 0.0) || !(v.range_max > v.range_min)) {
      throw ConfigError("volume field needs 0 < range_min < range_max");
    }
  }
}

std::size_t record_length(const Scene& scene, double rate, double sound_speed) {
  return static_cast<std::size_t>(std::floor(2.0 * scene.max_range / sound_speed * rate)) + 1;
}

namespace {

// Replica placed at offset `pre` in an m-point buffer, shaped by amp(f_abs)
// and delayed by `frac` samples (band-limited, circular within the buffer).
std::vector<cplx> shaped_replica(const ComplexSeries& replica, std::size_t m,
                                 std::size_t pre, double frac, double fc,
                                 const std::function<double(double)>& amp) {
  std::vector<cplx> buf(m, cplx{});
  std::copy(replica.samples().begin(), replica.samples().end(),
            buf.begin() + static_cast<std::ptrdiff_t>(pre));
  auto spectrum = dsp::fft(buf, m);
  const double rate = replica.sample_rate();
  for (std::size_t k = 0; k < m; ++k) {
    const double fb = dft_bin_frequency(k, m, rate);
    const double ph = -2.0 * kPi * fb * frac / rate;
    spectrum[k] *= amp(fc + fb) * cplx(std::cos(ph), std::sin(ph));
  }
  return dsp::ifft(spectrum);
}

std::array<cplx, 4> quadrant_weights(const SystemConfig& sys, double theta, double phi) {
  const double dt = sys.angle_sensitivity_minor * std::sin(theta);
  const double dp = sys.angle_sensitivity_major * std::sin(phi);
  if (std::abs(dt) >= kPi || std::abs(dp) >= kPi) {
    throw ConfigError("target bearing outside the unambiguous split-aperture range");
  }
  // The full-aperture mean of the quadrants then carries unit gain.
  const double norm = 1.0 / (std::cos(dt / 2.0) * std::cos(dp / 2.0));
  // Quadrants 1 aft-star, 2 aft-port, 3 fore-port, 4 fore-star.
  return {std::polar(norm, -dt / 2.0 + dp / 2.0), std::polar(norm, -dt / 2.0 - dp / 2.0),
          std::polar(norm, dt / 2.0 - dp / 2.0), std::polar(norm, dt / 2.0 + dp / 2.0)};
}

void add_at(std::vector<cplx>& dst, std::span<const cplx> src, std::int64_t offset,
            cplx weight) {
  const auto n = static_cast<std::int64_t>(dst.size());
  for (std::size_t j = 0; j < src.size(); ++j) {
    const std::int64_t i = offset + static_cast<std::int64_t>(j);
    if (i >= 0 && i < n) dst[static_cast<std::size_t>(i)] += weight * src[j];
  }
}

}  // namespace

std::vector<ComplexSeries> synthesize_ping(const Scene& scene, const PingDefinition& def,
                                           const SystemConfig& sys,
                                           const Environment& env,
                                           const ComplexSeries& replica,
                                           std::uint64_t ping_index) {
  scene.validate();
  sys.validate();
  env.validate();
  if (replica.empty()) throw ArgumentError("replica is empty");
  const double rate = replica.sample_rate();
  const double c = env.sound_speed;
  const double fc = def.centre_frequency();
  const std::size_t n = record_length(scene, rate, c);
  const std::size_t m = next_power_of_two(4 * replica.size());
  const std::size_t pre = m / 4;
  const auto clamp_band = [&](double f) { return std::clamp(f, def.f_start, def.f_stop); };

  std::vector<std::vector<cplx>> quadrants(4, std::vector<cplx>(n, cplx{}));

  for (const auto& t : scene.point_targets) {
    const double delay = 2.0 * t.range / c * rate;
    const auto whole = static_cast<std::int64_t>(std::floor(delay));
    if (whole >= static_cast<std::int64_t>(n)) {
      throw ConfigError("target delay is beyond the record length");
    }
    const double r4 = std::pow(t.range, 4.0);
    auto amp = [&](double f_abs) {
      const double f = clamp_band(f_abs);
      const double lambda = wavelength(env, f);
      const double g = sys.gain_table(f) * beam_factor(sys, t.theta, t.phi, f);
      const double sigma = t.sigma_table ? (*t.sigma_table)(f) : t.sigma_bs;
      const double power = def.transmit_power * lambda * lambda * g * g * sigma /
                           (16.0 * kPi * kPi * r4) *
                           from_db(-2.0 * env.absorption_table(f) * t.range);
      return amplitude_for_power(power, sys);
    };
    const auto echo = shaped_replica(replica, m, pre, delay - static_cast<double>(whole), fc, amp);
    // Carrier phase of the round trip, seen after demodulation about f_c.
    const cplx carrier = std::polar(1.0, -2.0 * kPi * fc * 2.0 * t.range / c);
    const auto weights = quadrant_weights(sys, t.theta, t.phi);
    for (std::size_t q = 0; q < 4; ++q) {
      add_at(quadrants[q], echo, whole - static_cast<std::int64_t>(pre), carrier * weights[q]);
    }
  }

  std::seed_seq seq{static_cast<std::uint32_t>(scene.seed),
                    static_cast<std::uint32_t>(scene.seed >> 32),
                    static_cast<std::uint32_t>(ping_index),
                    static_cast<std::uint32_t>(ping_index >> 32)};
  std::mt19937_64 rng(seq);

  if (scene.volume_field && scene.volume_field->density > 0.0) {
    const auto& v = *scene.volume_field;
    const double psi_c = psi_scaled(sys, fc);
    const double r1 = v.range_min;
    const double r2 = v.range_max;
    const double volume = psi_c / 3.0 * (r2 * r2 * r2 - r1 * r1 * r1);
    std::poisson_distribution<long long> count_dist(v.density * volume);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const long long count = count_dist(rng);

    // Reflectivity on the sample grid: amplitude sqrt(sigma)/r^2, absorbed at
    // f_c, random phase.
    std::vector<cplx> reflectivity(n, cplx{});
    const double alpha_c = env.absorption_table(fc);
    for (long long i = 0; i < count; ++i) {
      const double u = unit(rng);
      const double r = std::cbrt(r1 * r1 * r1 + u * (r2 * r2 * r2 - r1 * r1 * r1));
      const double phase = 2.0 * kPi * unit(rng);
      const auto idx = static_cast<std::size_t>(std::llround(2.0 * r / c * rate));
      if (idx >= n) continue;
      const double a = std::sqrt(v.sigma_bs) / (r * r) * std::sqrt(from_db(-2.0 * alpha_c * r));
      reflectivity[idx] += std::polar(a, phase);
    }
    // Frequency shaping common to all scatterers; the absorption excess over
    // f_c is applied at the mid range of the field.
    const double r_mid = 0.5 * (r1 + r2);
    auto amp = [&](double f_abs) {
      const double f = clamp_band(f_abs);
      const double lambda = wavelength(env, f);
      const double g0 = sys.gain_table(f);
      const double power = def.transmit_power * lambda * lambda * g0 * g0 *
                           psi_scaled(sys, f) / psi_c / (16.0 * kPi * kPi) *
                           from_db(-2.0 * (env.absorption_table(f) - alpha_c) * r_mid);
      return amplitude_for_power(power, sys);
    };
    const auto kernel = shaped_replica(replica, m, pre, 0.0, fc, amp);
    const auto echo = dsp::convolve(reflectivity, kernel);
    for (std::size_t q = 0; q < 4; ++q) {
      add_at(quadrants[q], echo, -static_cast<std::int64_t>(pre), cplx(1.0, 0.0));
    }
  }

  std::vector<std::vector<cplx>> channels(4);
  for (std::size_t q = 0; q < 4; ++q) {
    channels[static_cast<std::size_t>(sys.sector_map[q])] = std::move(quadrants[q]);
  }
  if (scene.noise_power > 0.0) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(scene.noise_power / 2.0));
    for (auto& ch : channels) {
      for (auto& s : ch) s += cplx(gauss(rng), gauss(rng));
    }
  }
  std::vector<ComplexSeries> out;
  out.reserve(4);
  for (auto& ch : channels) out.emplace_back(std::move(ch), rate);
  return out;
}

}  // namespace echochain
