#include <doctest.h>

#include <cmath>

#include "echochain/dsp.hpp"
#include "echochain/waveform.hpp"
#include "fixture.hpp"

using namespace echochain;

TEST_CASE("a chirp with no sweep is a constant tone at baseband zero") {
  PingDefinition def = fixture::chirp(0.0);
  def.f_start = def.f_stop = 210e3;
  def.filter_plan.clear();
  const auto y = generate_lfm(def);
  for (const auto& v : y.samples()) {
    CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(std::arg(v)) < 1e-15);
  }
}

TEST_CASE("sample count is round(duration * rate)") {
  PingDefinition def = fixture::chirp();
  def.duration = 1e-3;
  def.adc_rate = 1e6;
  def.filter_plan.clear();
  CHECK(generate_lfm(def).size() == 1000);
  CHECK(generate_lfm(fixture::chirp()).size() == 3072);
  def.duration = 1e-6;
  CHECK_THROWS_AS(generate_lfm(def), ArgumentError);
}

TEST_CASE("chirp phase follows the integral of the linear frequency ramp") {
  const auto def = fixture::chirp(0.0);
  const auto y = generate_lfm(def);
  const double fs = def.adc_rate;
  const double sweep = def.bandwidth() / def.duration;
  const double offset = def.f_start - def.centre_frequency();

  // Unwrap the sample phase after removing the constant (f_start - f_c)
  // offset, leaving the sweep term.
  double unwrapped = 0.0;
  for (std::size_t n = 1; n < y.size(); ++n) {
    const double dt = 1.0 / fs;
    const cplx step = y[n] * std::conj(y[n - 1]) * std::polar(1.0, -2.0 * kPi * offset * dt);
    unwrapped += std::arg(step);
  }
  // Oracle: trapezoidal integral of 2 pi sweep t from the first to the last
  // sample instant (exact for a linear integrand).
  const double t_last = static_cast<double>(y.size() - 1) / fs;
  const std::size_t steps = 100000;
  double integral = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t0 = t_last * static_cast<double>(k) / steps;
    const double t1 = t_last * static_cast<double>(k + 1) / steps;
    integral += 0.5 * (t1 - t0) * 2.0 * kPi * sweep * (t0 + t1);
  }
  CHECK(std::abs(unwrapped - integral) < 1e-6);

  // Over the full pulse length the sweep term accumulates pi * B * tau.
  const double full = lfm_phase(def, def.duration) - lfm_phase(def, 0.0) -
                      2.0 * kPi * offset * def.duration;
  CHECK(std::abs(full - kPi * def.bandwidth() * def.duration) < 1e-6);
}

TEST_CASE("taper envelope is a raised-cosine ramp at each end") {
  const std::size_t n = 1000;
  CHECK(taper_envelope(0, n, 0.1) == 0.0);
  CHECK(taper_envelope(n - 1, n, 0.1) == 0.0);
  CHECK(taper_envelope(50, n, 0.1) == doctest::Approx(0.5));
  CHECK(taper_envelope(500, n, 0.1) == 1.0);
  CHECK(taper_envelope(0, n, 0.0) == 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(taper_envelope(i, n, 0.1) == doctest::Approx(taper_envelope(n - 1 - i, n, 0.1)));
  }
}

TEST_CASE("normalize_transmit divides by the peak magnitude") {
  const ComplexSeries c(std::vector<cplx>(10, cplx(2.0)), 1e3);
  const auto unit = normalize_transmit(c);
  for (const auto& v : unit.samples()) CHECK(v == cplx(1.0));

  const auto tx = normalize_transmit(generate_lfm(fixture::chirp()));
  const auto again = normalize_transmit(tx);
  CHECK(again.vec() == tx.vec());

  std::vector<cplx> scaled(tx.samples().begin(), tx.samples().end());
  for (auto& v : scaled) v *= 37.5;
  const auto back = normalize_transmit(ComplexSeries(scaled, tx.sample_rate()));
  for (std::size_t i = 0; i < tx.size(); ++i) CHECK(std::abs(back[i] - tx[i]) < 1e-15);

  CHECK_THROWS_AS(normalize_transmit(ComplexSeries(std::vector<cplx>(5), 1e3)), ArgumentError);
  CHECK_THROWS_AS(normalize_transmit(ComplexSeries(std::vector<cplx>{}, 1e3)), ArgumentError);
}

TEST_CASE("identity plan leaves the replica equal to the normalized pulse") {
  const auto tx = normalize_transmit(generate_lfm(fixture::chirp()));
  const std::vector<FilterStage> identity{{{cplx(1.0)}, 1}};
  CHECK(build_matched_filter(tx, identity).replica.vec() == tx.vec());
  CHECK(build_matched_filter(tx, {}).replica.vec() == tx.vec());
}

TEST_CASE("autocorrelation properties") {
  const auto def = fixture::chirp();
  const auto mf = matched_filter_for(def);
  CHECK(mf.replica.sample_rate() == def.decimated_rate());
  CHECK(mf.l2_norm_sq > 0.0);
  REQUIRE(mf.autocorr.size() == 2 * mf.replica.size() - 1);
  CHECK(mf.autocorr[mf.zero_lag] == cplx(1.0, 0.0));
  for (std::size_t k = 0; k <= mf.zero_lag; ++k) {
    CHECK(std::abs(mf.autocorr[mf.zero_lag + k] - std::conj(mf.autocorr[mf.zero_lag - k])) <
          1e-12);
  }
  for (const auto& v : mf.autocorr.samples()) CHECK(std::abs(v) <= 1.0 + 1e-12);
}

namespace {

// Parseval: sum |a|^2 = (1/M) sum |Y|^4 / ||y||^4 for a = y (*) y~ / ||y||^2,
// the energy of the whole autocorrelation.
double spectral_autocorr_energy(const MatchedFilter& mf) {
  const std::size_t m = next_power_of_two(2 * mf.replica.size());
  const auto spec = dsp::fft(mf.replica.samples(), m);
  double sum = 0.0;
  for (const auto& v : spec) sum += std::pow(std::norm(v), 2.0);
  return sum / (static_cast<double>(m) * mf.l2_norm_sq * mf.l2_norm_sq);
}

}  // namespace

TEST_CASE("effective duration matches a spectral evaluation of the autocorrelation energy") {
  for (double taper : {0.0, 0.01, 0.2, 0.5}) {
    // Without filtering the 2 tau span covers the whole autocorrelation.
    auto def = fixture::chirp(taper);
    def.filter_plan.clear();
    const auto mf = matched_filter_for(def);
    REQUIRE(static_cast<std::size_t>(std::llround(def.duration * def.adc_rate)) >= mf.zero_lag);
    CHECK(mf.effective_duration ==
          doctest::Approx(spectral_autocorr_energy(mf) / def.adc_rate).epsilon(1e-9));
    CHECK(mf.effective_duration > 0.0);
    CHECK(mf.effective_duration <= def.duration * (1.0 + 1e-6));

    // Through the frontend the filter tails fall outside 2 tau but carry
    // almost no autocorrelation energy.
    const auto filtered = matched_filter_for(fixture::chirp(taper));
    const double rate = filtered.replica.sample_rate();
    CHECK(filtered.effective_duration ==
          doctest::Approx(spectral_autocorr_energy(filtered) / rate).epsilon(1e-4));
    CHECK(filtered.effective_duration <= def.duration * (1.0 + 1e-6));
  }
}

TEST_CASE("a fully tapered chirp has an effective duration below the pulse length") {
  const auto def = fixture::chirp(0.5);
  CHECK(matched_filter_for(def).effective_duration < def.duration);
}

TEST_CASE("effective duration ignores replica amplitude") {
  const auto def = fixture::chirp();
  const auto tx = normalize_transmit(generate_lfm(def));
  std::vector<cplx> scaled(tx.samples().begin(), tx.samples().end());
  for (auto& v : scaled) v *= 0.003;
  const auto a = build_matched_filter(tx, def.filter_plan, def.duration);
  const auto b = build_matched_filter(ComplexSeries(scaled, tx.sample_rate()), def.filter_plan,
                                      def.duration);
  CHECK(b.effective_duration == doctest::Approx(a.effective_duration).epsilon(1e-12));
}

TEST_CASE("effective_duration sums over the requested span only") {
  std::vector<cplx> a(11, cplx(0.5));
  a[5] = 1.0;
  const ComplexSeries s(a, 10.0);
  CHECK(effective_duration(s, 0) == doctest::Approx(0.1));
  CHECK(effective_duration(s, 2) == doctest::Approx((1.0 + 4 * 0.25) / 10.0));
  CHECK(effective_duration(s, 100) == doctest::Approx((1.0 + 10 * 0.25) / 10.0));
}
