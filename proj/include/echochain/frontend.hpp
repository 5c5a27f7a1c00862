#pragma once

// Receive-side multirate chain: complex FIR filtering and decimation of the
// per-sector raw samples, and design of the stages.

#include <span>
#include <vector>

#include "echochain/core.hpp"

namespace echochain {

struct DecimationPlan {
  std::vector<FilterStage> stages;
  double input_rate = 0.0;
  double output_rate = 0.0;

  /// Product of all decimation factors.
  [[nodiscard]] std::int64_t total_decimation() const;
  /// Builds a plan from stages, computing output_rate = input_rate / prod D.
  static DecimationPlan from_stages(std::vector<FilterStage> stages,
                                    double input_rate);
};

/// Kaiser-windowed sinc lowpass, unit DC gain, odd length, linear phase.
/// Pass/stop edges are baseband frequencies in Hz.
std::vector<cplx> design_lowpass(double pass_edge, double stop_edge,
                                 double rate, double stopband_db = 70.0);

/// Design a one- or two-stage plan for `def`. The total decimation is the
/// largest integer keeping output_rate >= target_rate_factor * bandwidth.
DecimationPlan design_plan(const PingDefinition& def, double target_rate_factor);

/// Run `y` through every stage: full convolution (zero padded edges), then
/// keep samples 0, D, 2D, ... of each stage output.
ComplexSeries filter_decimate(const ComplexSeries& y, const DecimationPlan& plan);

/// Same cascade, with the plan given as bare stages applied at y's rate.
ComplexSeries apply_stages(const ComplexSeries& y,
                           std::span<const FilterStage> stages);

/// Mix real ADC samples down by exp(-j 2 pi f_c n / rate). No lowpass and no
/// amplitude correction: a real cosine maps to half amplitude at baseband
/// plus an image at -2 f_c that the first filter stage removes.
ComplexSeries demodulate(std::span<const double> real_samples, double rate,
                         double f_c);

/// Frequency response of an FIR at baseband frequency f (Hz).
cplx frequency_response(std::span<const cplx> coefficients, double f, double rate);

}  // namespace echochain
