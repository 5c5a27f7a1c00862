#include "echochain/ts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "echochain/dsp.hpp"

namespace echochain {

double beam_factor(const SystemConfig& sys, double theta, double phi, double f) {
  if (!(f > 0.0)) throw ArgumentError("frequency must be positive");
  const double scale = sys.f_nominal / f;
  const double x = 2.0 * theta / (sys.beamwidth_minor * scale);
  const double y = 2.0 * phi / (sys.beamwidth_major * scale);
  const double x2 = x * x;
  const double y2 = y * y;
  return from_db(-10.0 * std::log10(2.0) * (x2 + y2 - 0.18 * x2 * y2));
}

std::vector<double> point_scattering_strength(const CompressedPing& cp,
                                              const SystemConfig& sys,
                                              const Environment& env,
                                              const PingDefinition& def) {
  const double fc = def.centre_frequency();
  const double lambda = wavelength(env, fc);
  const double g0 = sys.gain_table(fc);
  const double alpha = env.absorption_table(fc);
  const double budget =
      to_db(def.transmit_power * lambda * lambda * g0 * g0 / (16.0 * kPi * kPi));
  const auto power = received_power(cp.mean, sys);
  std::vector<double> sp(power.size());
  for (std::size_t n = 0; n < power.size(); ++n) {
    const double r = cp.range[n];
    if (!(r > 0.0)) {
      sp[n] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    sp[n] = to_db(power[n]) + 40.0 * std::log10(r / env.reference_range) +
            2.0 * alpha * r - budget;
  }
  return sp;
}

namespace {

// Contiguous extent around `peak` where level_db stays within `drop` of the
// peak, limited to `cap` samples each side and at least one sample.
std::pair<std::size_t, std::size_t> extent(std::span<const double> level_db,
                                           std::size_t peak, double drop,
                                           std::size_t cap) {
  const double floor_db = level_db[peak] - drop;
  std::size_t before = 0;
  while (before < cap && peak > before &&
         level_db[peak - before - 1] >= floor_db) {
    ++before;
  }
  std::size_t after = 0;
  while (after < cap && peak + after + 1 < level_db.size() &&
         level_db[peak + after + 1] >= floor_db) {
    ++after;
  }
  before = std::min(std::max<std::size_t>(before, 1), peak);
  after = std::min(std::max<std::size_t>(after, 1), level_db.size() - 1 - peak);
  return {before, after};
}

double spread(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size()));
}

}  // namespace

std::vector<SingleTargetDetection> detect_single_targets(
    const CompressedPing& cp, const AngleSeries& angles, std::span<const double> sp,
    const DetectionParams& params) {
  const std::size_t n = cp.size();
  if (sp.size() != n || angles.minor.size() != n) {
    throw ArgumentError("Sp and angle series must match the compressed ping");
  }
  std::vector<SingleTargetDetection> out;
  if (n < 3) return out;
  const std::size_t support = cp.replica_length > 1 ? cp.replica_length - 1 : 1;
  const std::size_t min_sep = params.min_separation > 0 ? params.min_separation : support;
  const std::size_t cap = params.window_cap > 0 ? params.window_cap : support;

  std::vector<double> level_db(n);
  for (std::size_t i = 0; i < n; ++i) level_db[i] = to_db(std::norm(cp.mean[i]));

  std::vector<std::size_t> candidates;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!std::isfinite(sp[i]) || sp[i] < params.min_sp_db) continue;
    const bool left_ok = !std::isfinite(sp[i - 1]) || sp[i] >= sp[i - 1];
    if (left_ok && sp[i] > sp[i + 1]) {
      candidates.push_back(i);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return sp[a] > sp[b]; });

  std::vector<std::size_t> taken;
  for (std::size_t peak : candidates) {
    const bool crowded = std::any_of(taken.begin(), taken.end(), [&](std::size_t t) {
      return (t > peak ? t - peak : peak - t) < min_sep;
    });
    if (crowded) continue;
    // Whatever else happens, a strong peak claims its neighbourhood so its
    // own sidelobes cannot be reported.
    taken.push_back(peak);

    const auto [b6, a6] = extent(level_db, peak, 6.0, cap);
    std::vector<double> th, ph;
    bool angles_ok = true;
    for (std::size_t i = peak - b6; i <= peak + a6; ++i) {
      if (!angles.valid_minor[i] || !angles.valid_major[i]) {
        angles_ok = false;
        break;
      }
      th.push_back(angles.minor[i]);
      ph.push_back(angles.major[i]);
    }
    if (!angles_ok) continue;
    if (spread(th) > params.max_angle_jitter || spread(ph) > params.max_angle_jitter) {
      continue;
    }

    const auto [before, after] = extent(level_db, peak, params.window_drop_db, cap);
    SingleTargetDetection det;
    det.peak_sample = peak;
    det.range = cp.range[peak];
    det.theta = angles.minor[peak];
    det.phi = angles.major[peak];
    det.sp_db = sp[peak];
    det.samples_before = before;
    det.samples_after = after;
    const auto s = cp.mean.samples();
    det.window = ComplexSeries(
        std::vector<cplx>(s.begin() + static_cast<std::ptrdiff_t>(peak - before),
                          s.begin() + static_cast<std::ptrdiff_t>(peak + after + 1)),
        cp.sample_rate());
    if (det.range > 0.0) out.push_back(std::move(det));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.peak_sample < b.peak_sample;
  });
  return out;
}

TsSpectrum ts_spectrum(const SingleTargetDetection& det, const MatchedFilter& mf,
                       const SystemConfig& sys, const Environment& env,
                       const PingDefinition& def, std::size_t n_dft) {
  const std::size_t win_len = det.window.size();
  if (win_len == 0 || det.samples_before + det.samples_after + 1 != win_len) {
    throw ArgumentError("detection window is inconsistent");
  }
  if (n_dft == 0) n_dft = next_power_of_two(std::max(win_len, mf.replica.size()));
  if (!is_power_of_two(n_dft)) throw ArgumentError("DFT length must be a power of 2");
  if (n_dft < win_len) throw ArgumentError("DFT length shorter than the target window");
  if (!(det.range > 0.0)) throw ArgumentError("target range must be positive");

  // Reduced autocorrelation: the same extent around lag zero, but never
  // more than the autocorrelation holds. Lag zero lines up with the target
  // peak in both transforms.
  const auto acf = mf.autocorr.samples();
  const std::size_t before = std::min(det.samples_before, mf.zero_lag);
  const std::size_t after = std::min(det.samples_after, acf.size() - 1 - mf.zero_lag);
  std::vector<cplx> reduced(acf.begin() + static_cast<std::ptrdiff_t>(mf.zero_lag - before),
                            acf.begin() + static_cast<std::ptrdiff_t>(mf.zero_lag + after + 1));

  const auto target_dft = dsp::dft_sampled(det.window.samples(), n_dft, det.samples_before);
  const auto auto_dft = dsp::dft_sampled(reduced, n_dft, before);
  double auto_max = 0.0;
  for (const auto& v : auto_dft) auto_max = std::max(auto_max, std::abs(v));
  const double floor = 1e-6 * auto_max;

  const double rate = mf.replica.sample_rate();
  const double fc = def.centre_frequency();
  const double k_power = static_cast<double>(sys.num_sectors) / 8.0 * sys.impedance_factor();
  const double r = det.range;

  struct Bin {
    double f, ts, p;
  };
  std::vector<Bin> bins;
  for (std::size_t k = 0; k < n_dft; ++k) {
    const double f = fc + dft_bin_frequency(k, n_dft, rate);
    if (f < def.f_start || f > def.f_stop) continue;
    if (std::abs(auto_dft[k]) < floor) continue;
    const cplx normalized = target_dft[k] / auto_dft[k];
    const double p = k_power * std::norm(normalized);
    const double lambda = wavelength(env, f);
    const double g = sys.gain_table(f) * beam_factor(sys, det.theta, det.phi, f);
    const double ts = to_db(p) + 40.0 * std::log10(r / env.reference_range) +
                      2.0 * env.absorption_table(f) * r -
                      to_db(def.transmit_power * lambda * lambda * g * g /
                            (16.0 * kPi * kPi));
    bins.push_back({f, ts, p});
  }
  std::sort(bins.begin(), bins.end(), [](const Bin& a, const Bin& b) { return a.f < b.f; });
  TsSpectrum out;
  for (const auto& b : bins) {
    out.frequencies.push_back(b.f);
    out.ts.push_back(b.ts);
    out.power.push_back(b.p);
  }
  return out;
}

}  // namespace echochain
