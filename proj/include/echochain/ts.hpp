#pragma once

// Target strength: point scattering strength Sp(n), single-target detection
// and the calibrated frequency-dependent TS(m) of a detected echo.

#include <span>
#include <vector>

#include "echochain/beamproc.hpp"
#include "echochain/core.hpp"
#include "echochain/waveform.hpp"

namespace echochain {

/// One-way beam power factor b(theta, phi, f) <= 1 of the two-axis quadratic
/// model, with beam widths scaling as f_nominal / f:
///   10 log10 b = -3.0103 (x^2 + y^2 - 0.18 x^2 y^2),  x = 2 theta / bw(f).
/// The two-way loss in TS is b^2, i.e. 6.02 dB at the one-way -3 dB edge.
double beam_factor(const SystemConfig& sys, double theta, double phi, double f);

/// Acoustic wavelength c / f.
inline double wavelength(const Environment& env, double f) {
  return env.sound_speed / f;
}

/// Sp(n) in dB re 1 m^2, evaluated with on-axis gain at the centre frequency.
/// Samples at zero range are NaN; zero power gives -inf.
std::vector<double> point_scattering_strength(const CompressedPing& cp,
                                              const SystemConfig& sys,
                                              const Environment& env,
                                              const PingDefinition& def);

struct DetectionParams {
  double min_sp_db = -60.0;        // Sp threshold
  std::size_t min_separation = 0;  // samples; 0 = replica length - 1
  double max_angle_jitter = 0.05;  // rad, std of theta/phi over the -6 dB extent
  double window_drop_db = 18.0;    // target window runs out to these points
  std::size_t window_cap = 0;      // samples each side; 0 = replica length - 1
};

struct SingleTargetDetection {
  std::size_t peak_sample = 0;
  double range = 0.0;       // m
  double theta = 0.0;       // rad, minor axis
  double phi = 0.0;         // rad, major axis
  double sp_db = 0.0;
  ComplexSeries window;     // y_pc around the peak
  std::size_t samples_before = 0;
  std::size_t samples_after = 0;
};

/// Local maxima of Sp above threshold, strongest first with a minimum
/// separation, accepted when the split-aperture angles are steady over the
/// -6 dB extent. Returned in increasing range.
std::vector<SingleTargetDetection> detect_single_targets(
    const CompressedPing& cp, const AngleSeries& angles, std::span<const double> sp,
    const DetectionParams& params = {});

struct TsSpectrum {
  std::vector<double> frequencies;  // Hz, ascending, inside [f_start, f_stop]
  std::vector<double> ts;           // dB re 1 m^2
  std::vector<double> power;        // W, P_rx,e,t(m)
};

/// TS(m) of one detection. `n_dft` = 0 picks the next power of two covering
/// both the target window and the replica length.
TsSpectrum ts_spectrum(const SingleTargetDetection& det, const MatchedFilter& mf,
                       const SystemConfig& sys, const Environment& env,
                       const PingDefinition& def, std::size_t n_dft = 0);

}  // namespace echochain
