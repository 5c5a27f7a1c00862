#pragma once

// Command-line front end: simulate | pc | angles | ts | sv.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "echochain/beamproc.hpp"
#include "echochain/io.hpp"
#include "echochain/ts.hpp"

namespace echochain {

/// A scene file: {"ping": {...}, "system": {...}, "environment": {...},
/// "scene": {...}}. The ping may carry an explicit "filter_plan" or a
/// "rate_factor" (default 1.5) from which a plan is designed.
struct SceneFile {
  PingDefinition definition;
  SystemConfig system;
  Environment environment;
  Scene scene;
  std::size_t num_pings = 1;
};

SceneFile scene_file_from_json(const nlohmann::json& j);

/// Bring one stored ping to f_s,dec: run the frontend when the file holds
/// raw samples, pass through when it already holds decimated ones.
Ping to_decimated(const Ping& ping, const PingFileHeader& header);

/// Worker count for per-ping processing: ECHOCHAIN_THREADS if set and
/// positive, else the hardware concurrency, never more than `jobs`.
std::size_t worker_count(std::size_t jobs);

/// `args` excludes the program name. Returns the process exit code.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace echochain
