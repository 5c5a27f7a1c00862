#pragma once

// Shared test configuration: a 160-260 kHz, 2.048 ms chirp sampled at
// 1.5 MHz and decimated by 10 to 150 kHz.

#include <cmath>
#include <vector>

#include "echochain/beamproc.hpp"
#include "echochain/core.hpp"
#include "echochain/frontend.hpp"
#include "echochain/simulator.hpp"
#include "echochain/ts.hpp"
#include "echochain/waveform.hpp"

namespace fixture {

using namespace echochain;

inline PingDefinition chirp(double taper = 0.01) {
  PingDefinition def;
  def.f_start = 160e3;
  def.f_stop = 260e3;
  def.duration = 2.048e-3;
  def.taper_fraction = taper;
  def.transmit_power = 1000.0;
  def.adc_rate = 1.5e6;
  def.filter_plan = design_plan(def, 1.5).stages;
  return def;
}

// On-axis gain proportional to frequency keeps lambda * g0 constant across
// the band, so the band-centre Sp and the per-bin TS agree for a flat target.
inline SystemConfig system(double g0_db_at_centre = 27.0) {
  SystemConfig sys;
  const double g = from_db(g0_db_at_centre);
  sys.gain_table = FrequencyTable({{100e3, g * 100.0 / 210.0}, {300e3, g * 300.0 / 210.0}});
  sys.angle_sensitivity_minor = 20.0;
  sys.angle_sensitivity_major = 20.0;
  sys.psi_nominal = 0.01;
  sys.f_nominal = 200e3;
  sys.beamwidth_minor = 0.12;
  sys.beamwidth_major = 0.12;
  return sys;
}

inline Environment environment(double alpha_db_per_m = 0.0) {
  Environment env;
  env.absorption_table = FrequencyTable::constant(alpha_db_per_m);
  return env;
}

inline PointTarget target(double range, double ts_db, double theta = 0.0, double phi = 0.0) {
  PointTarget t;
  t.range = range;
  t.sigma_bs = from_db(ts_db);
  t.theta = theta;
  t.phi = phi;
  return t;
}

// Index of the largest |mean| sample.
inline std::size_t peak_index(const CompressedPing& cp) {
  std::size_t best = 0;
  for (std::size_t n = 1; n < cp.size(); ++n) {
    if (std::norm(cp.mean[n]) > std::norm(cp.mean[best])) best = n;
  }
  return best;
}

}  // namespace fixture
