#pragma once

// Synthetic per-sector pings built by running the power budget backwards.
//
// A point target contributes the replica, delayed by 2r/c and shaped in
// frequency so that its amplitude at every frequency is what the TS equation
// inverts: p_tx lambda^2 g0^2 b^2 sigma_bs / (16 pi^2 r^4) absorbed by
// 2 alpha r dB. A volume field is realized as Poisson scatterers inside an
// ideal beam of solid angle psi(f_c), each with uniform random phase.

#include <cstdint>
#include <optional>
#include <vector>

#include "echochain/core.hpp"

namespace echochain {

struct PointTarget {
  double range = 0.0;       // m
  double sigma_bs = 0.0;    // m^2, frequency independent unless sigma_table is set
  std::optional<FrequencyTable> sigma_table;  // sigma_bs(f), m^2
  double theta = 0.0;       // rad, minor axis (positive forward)
  double phi = 0.0;         // rad, major axis (positive starboard)
};

struct VolumeField {
  double density = 0.0;     // scatterers per m^3
  double sigma_bs = 0.0;    // m^2 each
  double range_min = 0.0;   // m
  double range_max = 0.0;   // m
};

struct Scene {
  std::vector<PointTarget> point_targets;
  std::optional<VolumeField> volume_field;
  double noise_power = 0.0;  // E|n|^2 of each sector's complex sample
  std::uint64_t seed = 0;
  double max_range = 0.0;    // m, sets the record length

  void validate() const;
};

/// Record length in samples for `scene` at `rate`.
std::size_t record_length(const Scene& scene, double rate, double sound_speed);

/// Four sectors in recorded channel order (sys.sector_map applied). The
/// replica sets the output rate: pass the matched-filter replica for data at
/// f_s,dec, or the normalized transmit pulse for raw data at f_s.
/// `ping_index` is mixed into the seed so consecutive pings differ.
std::vector<ComplexSeries> synthesize_ping(const Scene& scene, const PingDefinition& def,
                                           const SystemConfig& sys,
                                           const Environment& env,
                                           const ComplexSeries& replica,
                                           std::uint64_t ping_index = 0);

}  // namespace echochain
