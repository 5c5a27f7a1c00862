#include "echochain/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace echochain {

using nlohmann::json;

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  [[nodiscard]] bool at_end() const { return pos_ == data_.size(); }

  std::string_view bytes(std::size_t n) {
    if (data_.size() - pos_ < n) throw FormatError("ping file is truncated");
    std::string_view v(data_.data() + pos_, n);
    pos_ += n;
    return v;
  }
  std::uint32_t u32() {
    const auto b = bytes(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
    return v;
  }
  std::uint16_t u16() {
    const auto b = bytes(2);
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[0]) |
                                      (static_cast<unsigned char>(b[1]) << 8));
  }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

json complex_json(cplx v) { return json::array({v.real(), v.imag()}); }

cplx complex_from(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw ConfigError("complex value must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json table_json(const FrequencyTable& t) {
  json arr = json::array();
  for (const auto& [f, v] : t.points) arr.push_back(json::array({f, v}));
  return arr;
}

FrequencyTable table_from(const json& j) {
  if (j.is_number()) return FrequencyTable::constant(j.get<double>());
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) throw ConfigError("table entries must be [f, value]");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return FrequencyTable(std::move(pts));
}

template <typename T>
T value_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

json to_json(const PingDefinition& def) {
  json stages = json::array();
  for (const auto& s : def.filter_plan) {
    json coeffs = json::array();
    for (const auto& c : s.coefficients) coeffs.push_back(complex_json(c));
    stages.push_back({{"decimation", s.decimation}, {"coefficients", coeffs}});
  }
  return {{"f_start", def.f_start},
          {"f_stop", def.f_stop},
          {"duration", def.duration},
          {"taper_fraction", def.taper_fraction},
          {"transmit_power", def.transmit_power},
          {"adc_rate", def.adc_rate},
          {"filter_plan", stages}};
}

json to_json(const SystemConfig& sys) {
  return {{"num_sectors", sys.num_sectors},
          {"z_receiver", complex_json(sys.z_receiver)},
          {"z_transducer", complex_json(sys.z_transducer)},
          {"angle_sensitivity_minor", sys.angle_sensitivity_minor},
          {"angle_sensitivity_major", sys.angle_sensitivity_major},
          {"gain_table", table_json(sys.gain_table)},
          {"psi_nominal", sys.psi_nominal},
          {"f_nominal", sys.f_nominal},
          {"beamwidth_minor", sys.beamwidth_minor},
          {"beamwidth_major", sys.beamwidth_major},
          {"sector_map", sys.sector_map}};
}

json to_json(const Environment& env) {
  return {{"sound_speed", env.sound_speed},
          {"absorption_table", table_json(env.absorption_table)},
          {"reference_range", env.reference_range}};
}

json to_json(const Scene& scene) {
  json targets = json::array();
  for (const auto& t : scene.point_targets) {
    json jt = {{"range", t.range}, {"sigma_bs", t.sigma_bs}, {"theta", t.theta}, {"phi", t.phi}};
    if (t.sigma_table) jt["sigma_table"] = table_json(*t.sigma_table);
    targets.push_back(jt);
  }
  json j = {{"point_targets", targets},
            {"noise_power", scene.noise_power},
            {"seed", scene.seed},
            {"max_range", scene.max_range}};
  if (scene.volume_field) {
    const auto& v = *scene.volume_field;
    j["volume_field"] = {{"density", v.density},
                         {"sigma_bs", v.sigma_bs},
                         {"range_min", v.range_min},
                         {"range_max", v.range_max}};
  }
  return j;
}

PingDefinition ping_definition_from_json(const json& j) {
  PingDefinition def;
  def.f_start = j.at("f_start").get<double>();
  def.f_stop = j.at("f_stop").get<double>();
  def.duration = j.at("duration").get<double>();
  def.taper_fraction = value_or(j, "taper_fraction", def.taper_fraction);
  def.transmit_power = j.at("transmit_power").get<double>();
  def.adc_rate = j.at("adc_rate").get<double>();
  if (j.contains("filter_plan")) {
    for (const auto& s : j.at("filter_plan")) {
      FilterStage stage;
      stage.decimation = s.at("decimation").get<int>();
      for (const auto& c : s.at("coefficients")) stage.coefficients.push_back(complex_from(c));
      def.filter_plan.push_back(std::move(stage));
    }
  }
  def.validate();
  return def;
}

SystemConfig system_from_json(const json& j) {
  SystemConfig sys;
  sys.num_sectors = value_or(j, "num_sectors", sys.num_sectors);
  if (j.contains("z_receiver")) sys.z_receiver = complex_from(j.at("z_receiver"));
  if (j.contains("z_transducer")) sys.z_transducer = complex_from(j.at("z_transducer"));
  sys.angle_sensitivity_minor = j.at("angle_sensitivity_minor").get<double>();
  sys.angle_sensitivity_major = j.at("angle_sensitivity_major").get<double>();
  sys.gain_table = table_from(j.at("gain_table"));
  sys.psi_nominal = j.at("psi_nominal").get<double>();
  sys.f_nominal = j.at("f_nominal").get<double>();
  sys.beamwidth_minor = j.at("beamwidth_minor").get<double>();
  sys.beamwidth_major = j.at("beamwidth_major").get<double>();
  if (j.contains("sector_map")) sys.sector_map = j.at("sector_map").get<std::vector<int>>();
  sys.validate();
  return sys;
}

Environment environment_from_json(const json& j) {
  Environment env;
  env.sound_speed = value_or(j, "sound_speed", env.sound_speed);
  if (j.contains("absorption_table")) env.absorption_table = table_from(j.at("absorption_table"));
  env.reference_range = value_or(j, "reference_range", env.reference_range);
  env.validate();
  return env;
}

Scene scene_from_json(const json& j) {
  Scene scene;
  scene.noise_power = value_or(j, "noise_power", 0.0);
  scene.seed = value_or<std::uint64_t>(j, "seed", 0);
  scene.max_range = j.at("max_range").get<double>();
  if (j.contains("point_targets")) {
    for (const auto& jt : j.at("point_targets")) {
      PointTarget t;
      t.range = jt.at("range").get<double>();
      t.sigma_bs = value_or(jt, "sigma_bs", 0.0);
      if (jt.contains("sigma_table")) t.sigma_table = table_from(jt.at("sigma_table"));
      t.theta = value_or(jt, "theta", 0.0);
      t.phi = value_or(jt, "phi", 0.0);
      scene.point_targets.push_back(std::move(t));
    }
  }
  if (j.contains("volume_field")) {
    const auto& jv = j.at("volume_field");
    scene.volume_field = VolumeField{jv.at("density").get<double>(), jv.at("sigma_bs").get<double>(),
                                     jv.at("range_min").get<double>(),
                                     jv.at("range_max").get<double>()};
  }
  scene.validate();
  return scene;
}

void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer, bool binary) {
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream os(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    try {
      writer(os);
    } catch (...) {
      os.close();
      std::filesystem::remove(tmp);
      throw;
    }
    os.flush();
    if (!os) {
      os.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_ping_file(const std::filesystem::path& path, const PingFileHeader& header,
                     const std::vector<Ping>& pings) {
  for (const auto& ping : pings) {
    if (ping.size() != static_cast<std::size_t>(header.system.num_sectors)) {
      throw ArgumentError("ping sector count differs from the system configuration");
    }
    for (const auto& s : ping) {
      if (s.size() != ping.front().size()) throw ArgumentError("sectors differ in length");
      if (s.size() > 0xffffffffu) throw ArgumentError("ping too long for the format");
    }
  }
  const json meta = {{"format_version", kPingFormatVersion},
                     {"sample_rate", header.sample_rate},
                     {"ping_definition", to_json(header.definition)},
                     {"system", to_json(header.system)},
                     {"environment", to_json(header.environment)}};
  const std::string text = meta.dump();

  std::string bytes(kPingMagic, 4);
  put_u16(bytes, kPingFormatVersion);
  put_u16(bytes, 0);
  put_u32(bytes, static_cast<std::uint32_t>(text.size()));
  bytes += text;
  for (const auto& ping : pings) {
    put_u32(bytes, static_cast<std::uint32_t>(ping.size()));
    put_u32(bytes, static_cast<std::uint32_t>(ping.empty() ? 0 : ping.front().size()));
    for (const auto& sector : ping) {
      for (const auto& v : sector.samples()) {
        put_u32(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(v.real())));
        put_u32(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(v.imag())));
      }
    }
  }
  write_file_atomically(path, [&](std::ostream& os) { os.write(bytes.data(), static_cast<std::streamsize>(bytes.size())); },
                        true);
}

PingFile read_ping_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  Reader in(std::string(std::istreambuf_iterator<char>(is), {}));

  if (in.bytes(4) != std::string_view(kPingMagic, 4)) {
    throw FormatError("not a ping file (bad magic)");
  }
  const auto version = in.u16();
  if (version != kPingFormatVersion) {
    throw FormatError("unsupported ping file version " + std::to_string(version));
  }
  in.u16();
  const auto header_len = in.u32();
  json meta;
  try {
    meta = json::parse(in.bytes(header_len));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed ping file header: ") + e.what());
  }

  PingFile file;
  try {
    file.header.sample_rate = meta.at("sample_rate").get<double>();
    file.header.definition = ping_definition_from_json(meta.at("ping_definition"));
    file.header.system = system_from_json(meta.at("system"));
    file.header.environment = environment_from_json(meta.at("environment"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("incomplete ping file header: ") + e.what());
  }
  if (!(file.header.sample_rate > 0.0)) throw FormatError("bad sample rate in header");

  while (!in.at_end()) {
    const auto sectors = in.u32();
    const auto samples = in.u32();
    if (sectors != static_cast<std::uint32_t>(file.header.system.num_sectors)) {
      throw FormatError("ping block sector count does not match the header");
    }
    Ping ping;
    for (std::uint32_t s = 0; s < sectors; ++s) {
      std::vector<cplx> data(samples);
      for (std::uint32_t i = 0; i < samples; ++i) {
        const float re = std::bit_cast<float>(in.u32());
        const float im = std::bit_cast<float>(in.u32());
        data[i] = cplx(re, im);
      }
      ping.emplace_back(std::move(data), file.header.sample_rate);
    }
    file.pings.push_back(std::move(ping));
  }
  return file;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace echochain
