#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace siegel {

inline constexpr const char* kToolName = "sieglab";
inline constexpr const char* kToolVersion = "0.1.0";

// Content stamp for a file that participated in a run.  The hash is FNV-1a
// over the raw bytes, enough to detect any drift between two runs.
struct FileStamp {
  std::string path;
  std::uint64_t bytes = 0;
  std::string fnv1a64;
};

FileStamp stamp_file(const std::string& path);

// Provenance record written next to every produced artifact.  `resolved`
// holds the fully resolved parameters (defaults and environment applied), so
// a run can be repeated without the original command line.
struct RunManifest {
  std::string tool = kToolName;
  std::string version = kToolVersion;
  std::string subcommand;
  nlohmann::json resolved;
  // effective working precision of the run (53 for pure-double commands);
  // informational, like duration_seconds — reproduction uses `resolved`
  long precision_bits = 0;
  std::vector<FileStamp> inputs;
  std::vector<FileStamp> outputs;
  double duration_seconds = 0.0;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);

  void write(const std::string& path) const;
  static RunManifest load(const std::string& path);
};

std::string manifest_path_for(const std::string& output_path);

}  // namespace siegel
