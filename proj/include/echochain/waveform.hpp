#pragma once

// Transmit chirp, matched-filter replica, its autocorrelation and the
// effective pulse duration derived from it.

#include <span>

#include "echochain/core.hpp"

namespace echochain {

struct MatchedFilter {
  ComplexSeries replica;       // normalized transmit pulse after the receive chain
  double l2_norm_sq = 0.0;     // ||replica||^2
  ComplexSeries autocorr;      // (replica * conj(replica(-n))) / ||replica||^2
  std::size_t zero_lag = 0;    // index of lag 0 in autocorr
  double effective_duration = 0.0;  // s
  double nominal_duration = 0.0;    // s, transmit pulse length
};

/// Complex baseband LFM pulse at def.adc_rate, sweeping f_start -> f_stop
/// over def.duration, with raised-cosine ramps of taper_fraction * duration at
/// each end. N = round(duration * adc_rate) samples.
ComplexSeries generate_lfm(const PingDefinition& def);

/// Analytic baseband phase of the pulse at time t (s), referred to f_c.
double lfm_phase(const PingDefinition& def, double t);

/// Amplitude envelope used by generate_lfm, sample n of N.
double taper_envelope(std::size_t n, std::size_t count, double taper_fraction);

/// Divide by max |y_tx|. Throws ArgumentError for an empty or all-zero input.
ComplexSeries normalize_transmit(const ComplexSeries& y_tx);

/// Pass the normalized pulse through `plan` (at its own sample rate) and
/// derive the autocorrelation and effective pulse duration. The
/// effective-duration sum spans 2 * nominal_duration centred on the
/// autocorrelation peak. `nominal_duration` <= 0 means: use the pulse length
/// of `normalized_tx`.
MatchedFilter build_matched_filter(const ComplexSeries& normalized_tx,
                                   std::span<const FilterStage> plan,
                                   double nominal_duration = 0.0);

/// Convenience: generate, normalize and filter for `def` with its own plan.
MatchedFilter matched_filter_for(const PingDefinition& def);

/// sum |a(n)|^2 / (max |a|^2 * rate), over +-half_span samples of the peak.
double effective_duration(const ComplexSeries& autocorr, std::size_t half_span);

}  // namespace echochain
