#pragma once

// Volume backscattering strength: band-compressed Sv(n) and the sliding-window
// spectral estimate Sv(m).

#include <vector>

#include "echochain/beamproc.hpp"
#include "echochain/core.hpp"
#include "echochain/waveform.hpp"

namespace echochain {

/// Two-way equivalent beam angle at f: psi(f_n) (f_n / f)^2.
double psi_scaled(const SystemConfig& sys, double f);

/// Hann window of length n over i = -n/2 .. n/2-1, scaled so that
/// sum w^2 = n.
std::vector<double> normalized_hann(std::size_t n);

/// Sv(n) in dB re 1 m^-1 using the effective pulse duration of `mf`. NaN at
/// zero range, -inf for zero power.
std::vector<double> sv_samples(const CompressedPing& cp, const MatchedFilter& mf,
                               const SystemConfig& sys, const Environment& env,
                               const PingDefinition& def);

struct SvSpectrogram {
  std::vector<std::size_t> centers;  // sample index of each window centre
  std::vector<double> ranges;        // m, geometric mean of window-edge ranges
  std::vector<double> frequencies;   // Hz, in-band bins, ascending
  std::vector<double> sv;            // dB, row-major [center][frequency]
  double window_duration = 0.0;      // s, n_w / f_s,dec
  std::size_t window_length = 0;     // n_w
  std::size_t hop = 0;

  [[nodiscard]] double at(std::size_t center, std::size_t bin) const {
    return sv[center * frequencies.size() + bin];
  }
};

/// Smallest power of two covering twice the pulse duration.
std::size_t default_sv_window(const PingDefinition& def, double rate);

/// Sliding-window Sv(m). `n_w` = 0 and `hop` = 0 select the defaults
/// (default_sv_window, n_w / 2). Windows that would run off either end of the
/// ping are skipped.
SvSpectrogram sv_spectrum(const CompressedPing& cp, const MatchedFilter& mf,
                          const SystemConfig& sys, const Environment& env,
                          const PingDefinition& def, std::size_t n_w = 0,
                          std::size_t hop = 0);

}  // namespace echochain
