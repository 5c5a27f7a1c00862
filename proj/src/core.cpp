#include "echochain/core.hpp"

#include <algorithm>
#include <cmath>

namespace echochain {

ComplexSeries::ComplexSeries(std::vector<cplx> samples, double sample_rate,
                             double group_delay)
    : samples_(std::move(samples)),
      sample_rate_(sample_rate),
      group_delay_(group_delay) {
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
    throw ArgumentError("sample rate must be positive");
  }
  for (const auto& s : samples_) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw ArgumentError("non-finite sample");
    }
  }
}

void FilterStage::validate() const {
  if (decimation < 1) throw ConfigError("decimation factor must be >= 1");
  if (coefficients.empty()) throw ConfigError("filter stage has no coefficients");
}

double PingDefinition::decimated_rate() const {
  std::int64_t product = 1;
  for (const auto& stage : filter_plan) product *= stage.decimation;
  return adc_rate / static_cast<double>(product);
}

void PingDefinition::validate() const {
  if (!(f_start > 0.0) || f_start > f_stop || !(f_stop < adc_rate / 2.0)) {
    throw ConfigError("require 0 < f_start <= f_stop < adc_rate/2");
  }
  if (!(duration > 0.0)) throw ConfigError("pulse duration must be positive");
  if (!(transmit_power > 0.0)) throw ConfigError("transmit power must be positive");
  if (taper_fraction < 0.0 || taper_fraction > 0.5) {
    throw ConfigError("taper fraction must lie in [0, 0.5]");
  }
  for (const auto& s : filter_plan) s.validate();
}

FrequencyTable::FrequencyTable(std::vector<std::pair<double, double>> pts)
    : points(std::move(pts)) {
  std::sort(points.begin(), points.end());
}

FrequencyTable FrequencyTable::constant(double value) {
  return FrequencyTable({{0.0, value}});
}

double FrequencyTable::operator()(double f) const { return interp_table(*this, f); }

double interp_table(const FrequencyTable& table, double f) {
  const auto& p = table.points;
  if (p.empty()) throw ConfigError("empty frequency table");
  if (f <= p.front().first) return p.front().second;
  if (f >= p.back().first) return p.back().second;
  auto hi = std::upper_bound(p.begin(), p.end(), f,
                             [](double x, const auto& pt) { return x < pt.first; });
  auto lo = hi - 1;
  const double span = hi->first - lo->first;
  if (span <= 0.0) return lo->second;
  const double w = (f - lo->first) / span;
  return lo->second + w * (hi->second - lo->second);
}

void SystemConfig::validate() const {
  if (num_sectors != 4) {
    throw UnsupportedError("only four-sector transducers are supported");
  }
  if (std::abs(z_receiver) <= 0.0 || std::abs(z_transducer) <= 0.0) {
    throw ConfigError("impedances must be non-zero");
  }
  if (gain_table.empty()) throw ConfigError("gain table is empty");
  for (const auto& [f, g] : gain_table.points) {
    if (!(g > 0.0)) throw ConfigError("gain table must be strictly positive");
  }
  if (!(psi_nominal > 0.0)) throw ConfigError("psi_nominal must be positive");
  if (!(f_nominal > 0.0)) throw ConfigError("f_nominal must be positive");
  if (!(beamwidth_minor > 0.0) || !(beamwidth_major > 0.0)) {
    throw ConfigError("beam widths must be positive");
  }
  if (sector_map.size() != 4) throw ConfigError("sector map needs four entries");
  std::vector<int> sorted = sector_map;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 4; ++i) {
    if (sorted[i] != i) throw ConfigError("sector map must be a permutation of 0..3");
  }
}

double SystemConfig::impedance_factor() const {
  const double zr = std::abs(z_receiver);
  const double zt = std::abs(z_transducer);
  if (zr <= 0.0 || zt <= 0.0) throw ConfigError("impedances must be non-zero");
  const double ratio = std::abs(z_receiver + z_transducer) / zr;
  return ratio * ratio / zt;
}

void Environment::validate() const {
  if (!(sound_speed > 0.0)) throw ConfigError("sound speed must be positive");
  if (absorption_table.empty()) throw ConfigError("absorption table is empty");
  for (const auto& [f, a] : absorption_table.points) {
    if (a < 0.0) throw ConfigError("absorption must be non-negative");
  }
  if (!(reference_range > 0.0)) throw ConfigError("reference range must be positive");
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> dft_frequency_grid(std::size_t n_dft, double f_dec,
                                       double f_c) {
  if (!is_power_of_two(n_dft)) throw ArgumentError("DFT length must be a power of 2");
  if (!(f_dec > 0.0)) throw ArgumentError("sample rate must be positive");
  std::vector<double> grid(n_dft);
  const auto half = static_cast<std::int64_t>(n_dft / 2);
  for (std::size_t i = 0; i < n_dft; ++i) {
    const auto k = static_cast<std::int64_t>(i) - half;
    grid[i] = f_c + static_cast<double>(k) * f_dec / static_cast<double>(n_dft);
  }
  return grid;
}

double dft_bin_frequency(std::size_t k, std::size_t n_dft, double rate) {
  const auto n = static_cast<std::int64_t>(n_dft);
  auto kk = static_cast<std::int64_t>(k);
  // The Nyquist bin of an even-length DFT is reported as -rate/2, matching
  // dft_frequency_grid.
  if (kk >= n / 2 + (n % 2)) kk -= n;
  return static_cast<double>(kk) * rate / static_cast<double>(n);
}

}  // namespace echochain
