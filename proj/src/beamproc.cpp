#include "echochain/beamproc.hpp"

#include <cmath>

#include "echochain/dsp.hpp"

namespace echochain {

CompressedPing pulse_compress(std::span<const ComplexSeries> y_rx,
                              const MatchedFilter& mf, double sound_speed,
                              std::span<const int> sector_map) {
  if (y_rx.size() != 4) throw UnsupportedError("pulse compression needs four sectors");
  if (sector_map.size() != 4) throw ConfigError("sector map needs four entries");
  if (!(sound_speed > 0.0)) throw ConfigError("sound speed must be positive");
  const double rate = mf.replica.sample_rate();
  const std::size_t n = y_rx[0].size();
  for (const auto& s : y_rx) {
    if (s.size() != n) throw ArgumentError("sectors differ in length");
    if (std::abs(s.sample_rate() - rate) > 1e-9 * rate) {
      throw ArgumentError("sector rate does not match the matched filter");
    }
  }

  const auto kernel = dsp::conj_reverse(mf.replica.samples());
  const std::size_t shift = mf.replica.size() - 1;

  CompressedPing cp;
  cp.replica_length = mf.replica.size();
  std::vector<std::vector<cplx>> sectors;
  sectors.reserve(4);
  for (const auto& s : y_rx) {
    auto full = dsp::convolve(s.samples(), kernel);
    std::vector<cplx> aligned(n, cplx{});
    for (std::size_t i = 0; i < n && i + shift < full.size(); ++i) {
      aligned[i] = full[i + shift] / mf.l2_norm_sq;
    }
    sectors.push_back(std::move(aligned));
  }

  std::vector<cplx> mean(n), fore(n), aft(n), star(n), port(n);
  const auto& q1 = sectors.at(static_cast<std::size_t>(sector_map[0]));
  const auto& q2 = sectors.at(static_cast<std::size_t>(sector_map[1]));
  const auto& q3 = sectors.at(static_cast<std::size_t>(sector_map[2]));
  const auto& q4 = sectors.at(static_cast<std::size_t>(sector_map[3]));
  for (std::size_t i = 0; i < n; ++i) {
    mean[i] = (sectors[0][i] + sectors[1][i] + sectors[2][i] + sectors[3][i]) / 4.0;
    fore[i] = 0.5 * (q3[i] + q4[i]);
    aft[i] = 0.5 * (q1[i] + q2[i]);
    star[i] = 0.5 * (q1[i] + q4[i]);
    port[i] = 0.5 * (q2[i] + q3[i]);
  }
  for (auto& s : sectors) cp.per_sector.emplace_back(std::move(s), rate);
  cp.mean = ComplexSeries(std::move(mean), rate);
  cp.fore = ComplexSeries(std::move(fore), rate);
  cp.aft = ComplexSeries(std::move(aft), rate);
  cp.star = ComplexSeries(std::move(star), rate);
  cp.port = ComplexSeries(std::move(port), rate);
  cp.range.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cp.range[i] = sound_speed * static_cast<double>(i) / (2.0 * rate);
  }
  return cp;
}

namespace {

void split_aperture(std::span<const cplx> a, std::span<const cplx> b, double gamma,
                    std::vector<cplx>& electrical, std::vector<double>& angle,
                    std::vector<bool>& valid) {
  const std::size_t n = a.size();
  electrical.resize(n);
  angle.resize(n);
  valid.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    electrical[i] = a[i] * std::conj(b[i]);
    const double x = std::atan2(electrical[i].imag(), electrical[i].real()) / gamma;
    valid[i] = std::abs(x) <= 1.0;
    angle[i] = valid[i] ? std::asin(x) : std::nan("");
  }
}

}  // namespace

AngleSeries estimate_angles(const CompressedPing& cp, const SystemConfig& sys) {
  if (sys.angle_sensitivity_minor == 0.0 || sys.angle_sensitivity_major == 0.0) {
    throw ConfigError("angle sensitivities must be non-zero");
  }
  AngleSeries out;
  split_aperture(cp.fore.samples(), cp.aft.samples(), sys.angle_sensitivity_minor,
                 out.electrical_minor, out.minor, out.valid_minor);
  split_aperture(cp.star.samples(), cp.port.samples(), sys.angle_sensitivity_major,
                 out.electrical_major, out.major, out.valid_major);
  return out;
}

std::vector<double> received_power(std::span<const cplx> y, const SystemConfig& sys) {
  const double scale =
      static_cast<double>(sys.num_sectors) / 8.0 * sys.impedance_factor();
  std::vector<double> p(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) p[i] = scale * std::norm(y[i]);
  return p;
}

std::vector<double> received_power(const ComplexSeries& y, const SystemConfig& sys) {
  return received_power(y.samples(), sys);
}

double amplitude_for_power(double power, const SystemConfig& sys) {
  const double scale =
      static_cast<double>(sys.num_sectors) / 8.0 * sys.impedance_factor();
  return std::sqrt(power / scale);
}

}  // namespace echochain
