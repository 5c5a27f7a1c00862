#pragma once

// Per-sector pulse compression, sector combination, split-aperture angles and
// received electric power.

#include <array>
#include <span>
#include <vector>

#include "echochain/core.hpp"
#include "echochain/waveform.hpp"

namespace echochain {

struct CompressedPing {
  std::vector<ComplexSeries> per_sector;  // recorded channel order
  ComplexSeries mean;
  ComplexSeries fore, aft, star, port;
  std::vector<double> range;              // m, r(n) = c n / (2 f_s,dec)
  std::size_t replica_length = 0;         // matched-filter length, samples

  [[nodiscard]] std::size_t size() const { return mean.size(); }
  [[nodiscard]] double sample_rate() const { return mean.sample_rate(); }
};

struct AngleSeries {
  std::vector<double> minor;   // theta(n), rad; NaN where invalid
  std::vector<double> major;   // phi(n), rad; NaN where invalid
  std::vector<cplx> electrical_minor;
  std::vector<cplx> electrical_major;
  std::vector<bool> valid_minor;
  std::vector<bool> valid_major;
};

inline constexpr std::array<int, 4> kIdentitySectorMap{0, 1, 2, 3};

/// Correlate every sector with the replica, normalized by its energy, and
/// form the mean and half-aperture signals. Output sample n corresponds to a
/// round-trip delay of n samples, so an echo delayed by k samples peaks at
/// index k. `sector_map[q]` is the channel in quadrant q+1.
CompressedPing pulse_compress(std::span<const ComplexSeries> y_rx,
                              const MatchedFilter& mf, double sound_speed,
                              std::span<const int> sector_map = kIdentitySectorMap);

AngleSeries estimate_angles(const CompressedPing& cp, const SystemConfig& sys);

/// Received electric power into a matched load for each sample, W.
std::vector<double> received_power(std::span<const cplx> y, const SystemConfig& sys);
std::vector<double> received_power(const ComplexSeries& y, const SystemConfig& sys);

/// Electric-domain power to complex amplitude: inverse of received_power for
/// a single sample.
double amplitude_for_power(double power, const SystemConfig& sys);

}  // namespace echochain
