// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "echochain/io.hpp"
#include "echochain/sv.hpp"
#include "fixture.hpp"

using namespace echochain;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (elapsed > limit_s) {
    o.pass = false;
    o.detail += " (over time limit)";
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s [%.2f s / %.0f s]\n", o.pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), elapsed, limit_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<ComplexSeries> raw_ping(const Scene& scene, const PingDefinition& def,
                                    const SystemConfig& sys, const Environment& env,
                                    std::uint64_t ping = 0) {
  const auto tx = normalize_transmit(generate_lfm(def));
  auto raw = synthesize_ping(scene, def, sys, env, tx, ping);
  const auto plan = DecimationPlan::from_stages(def.filter_plan, def.adc_rate);
  for (auto& s : raw) s = filter_decimate(s, plan);
  return raw;
}

Outcome decimation_rate() {
  std::vector<FilterStage> stages{{{cplx(0.5), cplx(0.5)}, 8}, {{cplx(1.0)}, 2}};
  const auto plan = DecimationPlan::from_stages(stages, 1.5e6);
  const ComplexSeries x(std::vector<cplx>(48000, cplx(1.0)), 1.5e6);
  const auto y = filter_decimate(x, plan);
  bool ok = plan.output_rate == 93750.0 && y.sample_rate() == 93750.0;
  // Designed plans: every rate is the integer quotient of the ADC rate.
  for (double fs : {1.5e6, 1.0e6, 2.0e6, 1.2e6}) {
    auto def = fixture::chirp();
    def.adc_rate = fs;
    for (double factor : {1.1, 1.5, 2.0, 3.0}) {
      const auto p = design_plan(def, factor);
      const auto d = p.total_decimation();
      const ComplexSeries z(std::vector<cplx>(static_cast<std::size_t>(4 * d), cplx(1.0)), fs);
      if (p.output_rate != fs / static_cast<double>(d) ||
          filter_decimate(z, p).sample_rate() != p.output_rate) {
        ok = false;
      }
    }
  }
  return {ok, fmt("(8,2) at 1.5 MHz -> %.3f Hz", y.sample_rate())};
}

Outcome matched_filter_identity() {
  const auto mf = matched_filter_for(fixture::chirp());
  const std::vector<ComplexSeries> sectors(4, mf.replica);
  const auto cp = pulse_compress(sectors, mf, 1500.0);
  const double err = std::abs(cp.mean[0] - cplx(1.0, 0.0));
  const bool peak_at_zero = fixture::peak_index(cp) == 0;
  return {err < 1e-9 && peak_at_zero, fmt("|y(0) - 1| = %.3g", err)};
}

Outcome effective_duration_equals_tau() {
  const auto def = fixture::chirp(0.0);
  const auto mf = matched_filter_for(def);
  const double rel = mf.effective_duration / def.duration - 1.0;
  return {std::abs(rel) <= 0.02 && def.decimated_rate() >= 150e3,
          fmt("tau_eff = %.4g ms vs 2.048 ms (%+.1f%%) at f_dec = %.0f Hz",
              mf.effective_duration * 1e3, rel * 100.0, def.decimated_rate())};
}

Outcome ts_round_trip() {
  const auto def = fixture::chirp();
  const auto sys = fixture::system();
  const auto env = fixture::environment();
  const auto mf = matched_filter_for(def);
  Scene scene;
  scene.max_range = 60.0;
  scene.point_targets.push_back(fixture::target(50.0, -45.0));
  const auto cp = pulse_compress(raw_ping(scene, def, sys, env), mf, env.sound_speed);
  const auto angles = estimate_angles(cp, sys);
  const auto sp = point_scattering_strength(cp, sys, env, def);
  const auto dets = detect_single_targets(cp, angles, sp);
  if (dets.size() != 1) return {false, fmt("%.0f detections", static_cast<double>(dets.size()))};
  const auto ts = ts_spectrum(dets[0], mf, sys, env, def);
  const double lo = def.f_start + 0.1 * def.bandwidth();
  const double hi = def.f_stop - 0.1 * def.bandwidth();
  double worst = 0.0;
  for (std::size_t m = 0; m < ts.frequencies.size(); ++m) {
    if (ts.frequencies[m] < lo || ts.frequencies[m] > hi) continue;
    worst = std::max(worst, std::abs(ts.ts[m] + 45.0));
  }
  const double sp_err = std::abs(dets[0].sp_db + 45.0);
  return {worst <= 0.1 && sp_err <= 0.05 && std::abs(dets[0].range - 50.0) < 0.01,
          fmt("max |TS(f) + 45| = %.4f dB, |Sp + 45| = %.4f dB, r = %.3f m", worst, sp_err,
              dets[0].range)};
}

Outcome angle_round_trip() {
  const auto def = fixture::chirp();
  const auto sys = fixture::system();
  const auto env = fixture::environment();
  const auto mf = matched_filter_for(def);
  Scene scene;
  scene.max_range = 60.0;
  scene.point_targets.push_back(fixture::target(50.0, -45.0, 0.01, -0.02));
  const auto cp = pulse_compress(raw_ping(scene, def, sys, env), mf, env.sound_speed);
  const auto angles = estimate_angles(cp, sys);
  const auto n = fixture::peak_index(cp);
  const double dt = std::abs(angles.minor[n] - 0.01);
  const double dp = std::abs(angles.major[n] + 0.02);
  return {dt <= 5e-4 && dp <= 5e-4, fmt("|d theta| = %.2e rad, |d phi| = %.2e rad", dt, dp)};
}

Outcome sv_round_trip() {
  const auto def = fixture::chirp();
  const auto sys = fixture::system();
  const auto env = fixture::environment();
  const auto mf = matched_filter_for(def);
  Scene scene;
  scene.max_range = 45.0;
  scene.volume_field = VolumeField{100.0, 1e-8, 20.0, 40.0};
  double sum_m = 0.0, sum_n = 0.0;
  std::size_t count_m = 0, count_n = 0;
  const int seeds = 50;
  for (int seed = 0; seed < seeds; ++seed) {
    scene.seed = static_cast<std::uint64_t>(seed) + 1;
    const auto ping = synthesize_ping(scene, def, sys, env, mf.replica);
    const auto cp = pulse_compress(ping, mf, env.sound_speed);
    const auto svn = sv_samples(cp, mf, sys, env, def);
    for (std::size_t n = 0; n < cp.size(); ++n) {
      if (cp.range[n] >= 22.0 && cp.range[n] <= 38.0) {
        sum_n += from_db(svn[n]);
        ++count_n;
      }
    }
    const auto svm = sv_spectrum(cp, mf, sys, env, def);
    const double half = 0.5 * svm.window_duration * env.sound_speed / 2.0;
    for (std::size_t c = 0; c < svm.centers.size(); ++c) {
      if (svm.ranges[c] - half < 21.0 || svm.ranges[c] + half > 39.0) continue;
      for (std::size_t m = 0; m < svm.frequencies.size(); ++m) {
        sum_m += from_db(svm.at(c, m));
        ++count_m;
      }
    }
  }
  const double mean_m = to_db(sum_m / static_cast<double>(count_m));
  const double mean_n = to_db(sum_n / static_cast<double>(count_n));
  return {std::abs(mean_m + 60.0) <= 1.0 && std::abs(mean_n + 60.0) <= 0.5,
          fmt("Sv(m) = %.3f dB, Sv(n) = %.3f dB over %.0f seeds", mean_m, mean_n, seeds)};
}

Outcome hann_normalization() {
  double worst = 0.0;
  for (std::size_t n = 8; n <= 4096; n *= 2) {
    long double s = 0.0L;
    for (double w : normalized_hann(n)) s += static_cast<long double>(w) * w;
    worst = std::max(worst, static_cast<double>(std::fabs(s - static_cast<long double>(n))));
  }
  return {worst <= 1e-12, fmt("max |sum w^2 - N| = %.3g", worst)};
}

Outcome range_compensation() {
  const auto def = fixture::chirp();
  const auto sys = fixture::system();
  const double alpha = 0.01;
  const auto env = fixture::environment(alpha);
  const auto mf = matched_filter_for(def);
  const double r = 50.0;
  double peak_db[2], sp_db[2];
  for (int i = 0; i < 2; ++i) {
    Scene scene;
    scene.max_range = 2.0 * r + 10.0;
    scene.point_targets.push_back(fixture::target(r * (i + 1), -45.0));
    const auto cp = pulse_compress(raw_ping(scene, def, sys, env), mf, env.sound_speed);
    const auto n = fixture::peak_index(cp);
    peak_db[i] = to_db(received_power(cp.mean, sys)[n]);
    sp_db[i] = point_scattering_strength(cp, sys, env, def)[n];
  }
  const double expected = -(40.0 * std::log10(2.0) + 2.0 * alpha * r);
  const double change = peak_db[1] - peak_db[0];
  const double sp_change = sp_db[1] - sp_db[0];
  return {std::abs(change - expected) <= 1e-3 && std::abs(sp_change) <= 0.1,
          fmt("peak change %.4f dB (expected %.4f), Sp change %.4f dB", change, expected,
              sp_change)};
}

Outcome processing_gain() {
  const auto def = fixture::chirp();
  const auto sys = fixture::system();
  const auto env = fixture::environment();
  const auto mf = matched_filter_for(def);
  const double r = 20.0;
  Scene clean;
  clean.max_range = 40.0;
  clean.point_targets.push_back(fixture::target(r, -20.0));
  const auto sig = raw_ping(clean, def, sys, env);
  const auto cp_sig = pulse_compress(sig, mf, env.sound_speed);
  const auto peak = fixture::peak_index(cp_sig);
  const double rate = def.decimated_rate();
  const auto echo_start = static_cast<std::size_t>(std::llround(2.0 * r / env.sound_speed * rate));
  const auto echo_len = static_cast<std::size_t>(std::llround(def.duration * rate));

  // Per-sample signal power over the middle of the echo, at the pulse
  // compressor input.
  double s_in = 0.0;
  const std::size_t a = echo_start + echo_len / 10, b = echo_start + 9 * echo_len / 10;
  for (std::size_t n = a; n < b; ++n) s_in += std::norm(sig[0][n]);
  s_in /= static_cast<double>(b - a);
  const double s_out = std::norm(cp_sig.mean[peak]);

  // Noise scaled so the decimated per-sample SNR is about -10 dB.
  Scene noise;
  noise.max_range = clean.max_range;
  const double noise_bw = def.bandwidth() + 0.1 * def.bandwidth();
  noise.noise_power = from_db(10.0) * s_in * def.adc_rate / noise_bw;
  double n_in = 0.0, n_out = 0.0;
  std::size_t count = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    noise.seed = static_cast<std::uint64_t>(t) + 7;
    const auto nz = raw_ping(noise, def, sys, env);
    const auto cp_n = pulse_compress(nz, mf, env.sound_speed);
    // Skip the filter and replica transients at both ends.
    const std::size_t lo = mf.replica.size(), hi = nz[0].size() - mf.replica.size();
    for (std::size_t n = lo; n < hi; ++n) {
      n_in += std::norm(nz[0][n]);
      n_out += std::norm(cp_n.mean[n]);
    }
    count += hi - lo;
  }
  n_in /= static_cast<double>(count);
  n_out /= static_cast<double>(count);
  // The mean of four independent sectors carries a quarter of the noise
  // power of one; refer the input to the same combination.
  const double snr_in = to_db(s_in / (n_in / 4.0));
  const double snr_out = to_db(s_out / n_out);
  const double gain = snr_out - snr_in;
  const double expected = to_db(def.bandwidth() * def.duration);
  return {std::abs(gain - expected) <= 1.0,
          fmt("per-sector input SNR %.2f dB, gain %.2f dB vs 10log10(B tau) = %.2f dB",
              snr_in - to_db(4.0), gain, expected)};
}

Outcome file_round_trip() {
  const auto def = fixture::chirp();
  PingFileHeader header{def, fixture::system(), fixture::environment(), def.decimated_rate()};
  std::mt19937_64 rng(42);
  std::normal_distribution<float> g(0.0f, 1.0f);
  std::vector<Ping> pings(100);
  for (auto& p : pings) {
    for (int s = 0; s < 4; ++s) {
      std::vector<cplx> v(500);
      for (auto& x : v) x = cplx(g(rng), g(rng));
      p.emplace_back(std::move(v), header.sample_rate);
    }
  }
  const auto dir = std::filesystem::temp_directory_path() / "echochain_acceptance";
  std::filesystem::create_directories(dir);
  const auto path = dir / "pings.bbec";
  write_ping_file(path, header, pings);
  const auto back = read_ping_file(path);
  bool exact = back.pings.size() == pings.size();
  for (std::size_t i = 0; exact && i < pings.size(); ++i) {
    for (std::size_t s = 0; exact && s < 4; ++s) {
      exact = back.pings[i][s].vec() == pings[i][s].vec();
    }
  }
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.put('X');
  }
  bool rejected = false;
  try {
    (void)read_ping_file(path);
  } catch (const FormatError&) {
    rejected = true;
  }
  std::filesystem::remove_all(dir);
  return {exact && rejected, std::string("bit-exact ") + (exact ? "yes" : "no") +
                                 ", corrupted magic rejected " + (rejected ? "yes" : "no")};
}

}  // namespace

int main() {
  run(1, "decimation rate", 1, decimation_rate);
  run(2, "matched-filter identity", 1, matched_filter_identity);
  run(3, "effective pulse duration", 1, effective_duration_equals_tau);
  run(4, "TS round trip", 5, ts_round_trip);
  run(5, "angle round trip", 5, angle_round_trip);
  run(6, "Sv round trip", 120, sv_round_trip);
  run(7, "Hann normalization", 1, hann_normalization);
  run(8, "range compensation", 5, range_compensation);
  run(9, "processing gain", 60, processing_gain);
  run(10, "file round trip", 5, file_round_trip);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
