#pragma once

// On-disk ping container, JSON configuration and CSV helpers.
//
// Ping file layout (all integers little-endian):
//
//   offset 0   "BBEC"                 magic
//          4   u16 version            (1)
//          6   u16 reserved           (0)
//          8   u32 header_length
//         12   header_length bytes    UTF-8 JSON: ping definition, system,
//                                     environment, sample rate
//   then, repeated to end of file, one block per ping:
//              u32 sectors, u32 samples,
//              sectors * samples * (I, Q) IEEE-754 float32, sector-major

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "echochain/core.hpp"
#include "echochain/simulator.hpp"

namespace echochain {

inline constexpr char kPingMagic[4] = {'B', 'B', 'E', 'C'};
inline constexpr std::uint16_t kPingFormatVersion = 1;

using Ping = std::vector<ComplexSeries>;  // one series per sector

struct PingFileHeader {
  PingDefinition definition;
  SystemConfig system;
  Environment environment;
  double sample_rate = 0.0;  // rate of the stored samples
};

struct PingFile {
  PingFileHeader header;
  std::vector<Ping> pings;
};

void write_ping_file(const std::filesystem::path& path, const PingFileHeader& header,
                     const std::vector<Ping>& pings);
PingFile read_ping_file(const std::filesystem::path& path);

// JSON mapping of the configuration types. Complex values are [re, im],
// tables are [[f, value], ...].
nlohmann::json to_json(const PingDefinition& def);
nlohmann::json to_json(const SystemConfig& sys);
nlohmann::json to_json(const Environment& env);
nlohmann::json to_json(const Scene& scene);
PingDefinition ping_definition_from_json(const nlohmann::json& j);
SystemConfig system_from_json(const nlohmann::json& j);
Environment environment_from_json(const nlohmann::json& j);
Scene scene_from_json(const nlohmann::json& j);

/// Shortest round-trip decimal text, '.' separator whatever the locale.
/// NaN prints as "nan", infinities as "inf" / "-inf".
std::string format_number(double v);

/// Write through a temporary sibling file and rename into place, so a failure
/// never leaves a partial output behind.
void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer,
                           bool binary = false);

}  // namespace echochain
