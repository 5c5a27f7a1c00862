#pragma once

// Shared domain types for the broadband echosounder processing chain.
//
// All signals travel as complex baseband samples demodulated about the chirp
// centre frequency with exp(-j 2 pi f_c t), so a positive baseband frequency
// is above f_c.

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace echochain {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Error kinds. Everything derives from the standard hierarchy so callers can
// catch broadly.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniformly sampled complex sequence.
///
/// `group_delay` is alignment bookkeeping in output samples: the delay that
/// the filters applied so far have added relative to the original input.
/// Linear-phase stages make it a multiple of one half input sample, so it is
/// carried as a double rather than rounded.
class ComplexSeries {
 public:
  ComplexSeries() = default;
  ComplexSeries(std::vector<cplx> samples, double sample_rate,
                double group_delay = 0.0);

  [[nodiscard]] std::span<const cplx> samples() const { return samples_; }
  [[nodiscard]] const std::vector<cplx>& vec() const { return samples_; }
  [[nodiscard]] double sample_rate() const { return sample_rate_; }
  [[nodiscard]] double group_delay() const { return group_delay_; }
  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] bool empty() const { return samples_.empty(); }
  const cplx& operator[](std::size_t i) const { return samples_[i]; }

 private:
  std::vector<cplx> samples_;
  double sample_rate_ = 1.0;
  double group_delay_ = 0.0;
};

/// One FIR stage of the receive chain: convolve, then keep every
/// `decimation`-th sample starting at index 0.
struct FilterStage {
  std::vector<cplx> coefficients;
  int decimation = 1;

  void validate() const;
};

/// Transmit pulse and acquisition parameters.
struct PingDefinition {
  double f_start = 0.0;         // Hz
  double f_stop = 0.0;          // Hz
  double duration = 0.0;        // s
  double taper_fraction = 0.01; // raised-cosine ramp length / duration, per edge
  double transmit_power = 0.0;  // W, electric
  double adc_rate = 0.0;        // Hz
  std::vector<FilterStage> filter_plan;

  [[nodiscard]] double centre_frequency() const {
    return 0.5 * (f_start + f_stop);
  }
  [[nodiscard]] double bandwidth() const { return f_stop - f_start; }
  /// Output rate of the filter plan (input rate divided by the product of
  /// decimation factors).
  [[nodiscard]] double decimated_rate() const;

  void validate() const;
};

/// A function of frequency sampled at increasing frequencies, evaluated by
/// linear interpolation with clamping at both ends.
struct FrequencyTable {
  std::vector<std::pair<double, double>> points;  // (Hz, value)

  FrequencyTable() = default;
  explicit FrequencyTable(std::vector<std::pair<double, double>> pts);
  static FrequencyTable constant(double value);

  [[nodiscard]] double operator()(double f) const;
  [[nodiscard]] bool empty() const { return points.empty(); }
};

/// Evaluate a sampled table at `f`. Throws ConfigError on an empty table.
double interp_table(const FrequencyTable& table, double f);

struct SystemConfig {
  int num_sectors = 4;
  cplx z_receiver{1000.0, 0.0};     // ohm
  cplx z_transducer{75.0, 0.0};     // ohm
  double angle_sensitivity_minor = 1.0;  // electrical rad per sin(angle)
  double angle_sensitivity_major = 1.0;
  FrequencyTable gain_table;        // on-axis transducer gain g0(f), linear
  double psi_nominal = 0.01;        // sr, two-way equivalent beam angle at f_nominal
  double f_nominal = 0.0;           // Hz
  double beamwidth_minor = 0.12;    // rad, one-way -3 dB width at f_nominal
  double beamwidth_major = 0.12;
  // sector_map[q] = index of the recorded channel that sits in quadrant q+1
  // of the four-quadrant layout (1 aft-star, 2 aft-port, 3 fore-port,
  // 4 fore-star).
  std::vector<int> sector_map{0, 1, 2, 3};

  void validate() const;
  /// (|z_rx + z_td| / |z_rx|)^2 / |z_td|, the matched-load conversion factor.
  [[nodiscard]] double impedance_factor() const;
};

struct Environment {
  double sound_speed = 1500.0;     // m/s
  FrequencyTable absorption_table = FrequencyTable::constant(0.0);  // dB/m
  double reference_range = 1.0;    // m

  void validate() const;
};

// dB helpers. to_db(0) is -inf.
double to_db(double linear);
double from_db(double db);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

/// Absolute frequency of each bin of an `n_dft`-point DFT of baseband data at
/// `f_dec`, in ascending order: f_c + k f_dec / n_dft for
/// k = -n_dft/2 .. n_dft/2 - 1.
std::vector<double> dft_frequency_grid(std::size_t n_dft, double f_dec,
                                       double f_c);

/// Baseband frequency of natural-order DFT bin `k`.
double dft_bin_frequency(std::size_t k, std::size_t n_dft, double rate);

}  // namespace echochain
