#include "echochain/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "echochain/frontend.hpp"
#include "echochain/simulator.hpp"
#include "echochain/sv.hpp"
#include "echochain/waveform.hpp"

namespace echochain {

using nlohmann::json;

SceneFile scene_file_from_json(const json& j) {
  SceneFile sf;
  try {
    json ping = j.at("ping");
    const double factor = ping.value("rate_factor", 1.5);
    ping.erase("rate_factor");
    sf.definition = ping_definition_from_json(ping);
    if (sf.definition.filter_plan.empty()) {
      sf.definition.filter_plan = design_plan(sf.definition, factor).stages;
    }
    sf.system = system_from_json(j.at("system"));
    sf.environment = environment_from_json(j.contains("environment") ? j.at("environment") : json::object());
    const auto& sc = j.at("scene");
    sf.scene = scene_from_json(sc);
    sf.num_pings = sc.value("num_pings", std::size_t{1});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scene file: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("scene file: ") + e.what());
  }
  if (sf.num_pings == 0) throw ConfigError("num_pings must be at least 1");
  return sf;
}

Ping to_decimated(const Ping& ping, const PingFileHeader& header) {
  const auto& def = header.definition;
  const double rate = header.sample_rate;
  const auto same = [](double a, double b) { return std::abs(a - b) <= 1e-9 * b; };
  if (same(rate, def.decimated_rate())) return ping;
  if (!same(rate, def.adc_rate)) {
    throw FormatError("stored sample rate matches neither the ADC nor the decimated rate");
  }
  Ping out;
  out.reserve(ping.size());
  for (const auto& s : ping) out.push_back(apply_stages(s, def.filter_plan));
  return out;
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ECHOCHAIN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

namespace {

// Runs task(i) for i in [0, jobs) on a bounded pool; results stay indexed so
// output order does not depend on scheduling.
std::vector<std::string> run_ordered(std::size_t jobs,
                                     const std::function<std::string(std::size_t)>& task) {
  std::vector<std::string> results(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      try {
        results[i] = task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = worker_count(jobs);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& blocks) {
  write_file_atomically(path, [&](std::ostream& os) {
    os << header << '\n';
    for (const auto& b : blocks) os << b;
  });
}

std::string join(std::initializer_list<std::string> fields) {
  std::string line;
  for (const auto& f : fields) {
    if (!line.empty()) line += ',';
    line += f;
  }
  line += '\n';
  return line;
}

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

struct Loaded {
  PingFile file;
  MatchedFilter mf;
};

Loaded load(const std::string& path) {
  Loaded l{read_ping_file(path), {}};
  l.mf = matched_filter_for(l.file.header.definition);
  return l;
}

CompressedPing compress(const Loaded& l, std::size_t i) {
  const auto& h = l.file.header;
  const auto ping = to_decimated(l.file.pings[i], h);
  return pulse_compress(ping, l.mf, h.environment.sound_speed, h.system.sector_map);
}

void cmd_simulate(const std::string& scene_path, const std::string& out_path, bool decimated) {
  std::ifstream is(scene_path);
  if (!is) throw std::runtime_error("cannot open " + scene_path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scene file is not valid JSON: ") + e.what());
  }
  const auto sf = scene_file_from_json(j);
  ComplexSeries replica = decimated ? matched_filter_for(sf.definition).replica
                                    : normalize_transmit(generate_lfm(sf.definition));
  PingFileHeader header{sf.definition, sf.system, sf.environment, replica.sample_rate()};
  std::vector<Ping> pings(sf.num_pings);
  for (std::size_t i = 0; i < sf.num_pings; ++i) {
    pings[i] = synthesize_ping(sf.scene, sf.definition, sf.system, sf.environment, replica, i);
  }
  write_ping_file(out_path, header, pings);
}

void cmd_pc(const std::string& in, const std::string& out) {
  const auto l = load(in);
  const auto& h = l.file.header;
  auto blocks = run_ordered(l.file.pings.size(), [&](std::size_t p) {
    const auto cp = compress(l, p);
    const auto sp = point_scattering_strength(cp, h.system, h.environment, h.definition);
    const auto sv = sv_samples(cp, l.mf, h.system, h.environment, h.definition);
    std::string s;
    for (std::size_t n = 0; n < cp.size(); ++n) {
      s += join({num(p), num(n), num(cp.range[n]), num(std::norm(cp.mean[n])), num(sp[n]),
                 num(sv[n])});
    }
    return s;
  });
  write_csv(out, "ping,sample,range_m,pc_power,sp_db,sv_db", blocks);
}

void cmd_angles(const std::string& in, const std::string& out) {
  const auto l = load(in);
  const auto& h = l.file.header;
  auto blocks = run_ordered(l.file.pings.size(), [&](std::size_t p) {
    const auto cp = compress(l, p);
    const auto ang = estimate_angles(cp, h.system);
    std::string s;
    for (std::size_t n = 0; n < cp.size(); ++n) {
      s += join({num(p), num(n), num(cp.range[n]), num(ang.minor[n]), num(ang.major[n])});
    }
    return s;
  });
  write_csv(out, "ping,sample,range_m,theta,phi", blocks);
}

void cmd_ts(const std::string& in, const std::string& out, const DetectionParams& params,
            std::size_t n_dft) {
  const auto l = load(in);
  const auto& h = l.file.header;
  auto blocks = run_ordered(l.file.pings.size(), [&](std::size_t p) {
    const auto cp = compress(l, p);
    const auto ang = estimate_angles(cp, h.system);
    const auto sp = point_scattering_strength(cp, h.system, h.environment, h.definition);
    const auto dets = detect_single_targets(cp, ang, sp, params);
    std::string s;
    for (std::size_t d = 0; d < dets.size(); ++d) {
      const auto ts = ts_spectrum(dets[d], l.mf, h.system, h.environment, h.definition, n_dft);
      for (std::size_t m = 0; m < ts.frequencies.size(); ++m) {
        s += join({num(p), num(d), num(dets[d].range), num(dets[d].theta), num(dets[d].phi),
                   num(ts.frequencies[m]), num(ts.ts[m])});
      }
    }
    return s;
  });
  write_csv(out, "ping,detection,range_m,theta,phi,frequency_hz,ts_db", blocks);
}

void cmd_sv(const std::string& in, const std::string& out, std::size_t window, std::size_t hop) {
  const auto l = load(in);
  const auto& h = l.file.header;
  const double rate = h.definition.decimated_rate();
  if (window != 0 && static_cast<double>(window) < 2.0 * h.definition.duration * rate - 1e-9) {
    throw CLI::ValidationError("--window", "must cover at least twice the pulse duration (" +
                                               num(std::ceil(2.0 * h.definition.duration * rate)) +
                                               " samples)");
  }
  auto blocks = run_ordered(l.file.pings.size(), [&](std::size_t p) {
    const auto cp = compress(l, p);
    const auto sv = sv_spectrum(cp, l.mf, h.system, h.environment, h.definition, window, hop);
    std::string s;
    for (std::size_t c = 0; c < sv.centers.size(); ++c) {
      for (std::size_t m = 0; m < sv.frequencies.size(); ++m) {
        s += join({num(p), num(sv.centers[c]), num(sv.ranges[c]), num(sv.frequencies[m]),
                   num(sv.at(c, m))});
      }
    }
    return s;
  });
  write_csv(out, "ping,center,range_m,frequency_hz,sv_db", blocks);
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Broadband split-beam echosounder processing", "echochain"};
  app.require_subcommand(1);

  std::string scene_path, in_path, out_path;
  bool decimated = false;
  auto* sim = app.add_subcommand("simulate", "Synthesize pings from a scene file");
  sim->add_option("--scene", scene_path, "Scene JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out_path, "Output ping file")->required();
  sim->add_flag("--decimated", decimated, "Store samples at the decimated rate");

  auto* pc = app.add_subcommand("pc", "Pulse-compressed power, Sp(n) and Sv(n) per sample");
  auto* angles = app.add_subcommand("angles", "Split-aperture angles per sample");
  auto* ts = app.add_subcommand("ts", "Single-target detection and TS(f)");
  auto* sv = app.add_subcommand("sv", "Sliding-window Sv(f)");
  for (auto* sub : {pc, angles, ts, sv}) {
    sub->add_option("--in", in_path, "Input ping file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "Output CSV")->required();
  }

  DetectionParams params;
  std::size_t n_dft = 0;
  ts->add_option("--min-sp", params.min_sp_db, "Sp detection threshold, dB");
  ts->add_option("--min-separation", params.min_separation,
                 "Minimum peak separation, samples (0: replica length - 1)");
  ts->add_option("--max-angle-jitter", params.max_angle_jitter,
                 "Angle standard deviation limit over the -6 dB extent, rad");
  ts->add_option("--window-drop", params.window_drop_db,
                 "Target window extends to where Sp has dropped this far, dB");
  ts->add_option("--window-cap", params.window_cap,
                 "Maximum target window half-width, samples (0: replica length - 1)");
  ts->add_option("--nfft", n_dft, "DFT length (0: automatic)");

  std::size_t window = 0, hop = 0;
  const auto power_of_two = CLI::Validator(
      [](std::string& s) -> std::string {
        std::size_t v = 0;
        std::istringstream is(s);
        if (!(is >> v) || !is.eof() || !is_power_of_two(v)) {
          return "window length must be a power of 2, got " + s;
        }
        return {};
      },
      "POW2");
  sv->add_option("--window", window, "Window length N, a power of 2 (default: automatic)")
      ->check(power_of_two);
  sv->add_option("--hop", hop, "Hop between windows, samples (default: N/2)")
      ->check(CLI::PositiveNumber);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
    if (*sim) {
      cmd_simulate(scene_path, out_path, decimated);
    } else if (*pc) {
      cmd_pc(in_path, out_path);
    } else if (*angles) {
      cmd_angles(in_path, out_path);
    } else if (*ts) {
      cmd_ts(in_path, out_path, params, n_dft);
    } else if (*sv) {
      cmd_sv(in_path, out_path, window, hop);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const std::exception& e) {
    err << "echochain: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace echochain
