#include "siegel/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "siegel/errors.hpp"

namespace siegel {

namespace {

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json stamp_to_json(const FileStamp& s) {
  return {{"path", s.path}, {"bytes", s.bytes}, {"fnv1a64", s.fnv1a64}};
}

FileStamp stamp_from_json(const nlohmann::json& j) {
  FileStamp s;
  s.path = j.at("path").get<std::string>();
  s.bytes = j.at("bytes").get<std::uint64_t>();
  s.fnv1a64 = j.at("fnv1a64").get<std::string>();
  return s;
}

}  // namespace

FileStamp stamp_file(const std::string& path) {
  std::string data = read_all(path);
  FileStamp s;
  s.path = path;
  s.bytes = data.size();
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  s.fnv1a64 = buf;
  return s;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["tool"] = tool;
  j["version"] = version;
  j["subcommand"] = subcommand;
  j["resolved"] = resolved;
  j["precision_bits"] = precision_bits;
  j["inputs"] = nlohmann::json::array();
  for (const FileStamp& s : inputs) j["inputs"].push_back(stamp_to_json(s));
  j["outputs"] = nlohmann::json::array();
  for (const FileStamp& s : outputs) j["outputs"].push_back(stamp_to_json(s));
  j["duration_seconds"] = duration_seconds;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.tool = j.at("tool").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    m.resolved = j.at("resolved");
    m.precision_bits = j.at("precision_bits").get<long>();
    for (const nlohmann::json& s : j.at("inputs")) {
      m.inputs.push_back(stamp_from_json(s));
    }
    for (const nlohmann::json& s : j.at("outputs")) {
      m.outputs.push_back(stamp_from_json(s));
    }
    m.duration_seconds = j.at("duration_seconds").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed manifest: ") + e.what());
  }
  if (m.tool != kToolName) {
    throw UsageError("manifest was written by '" + m.tool + "', not " +
                     kToolName);
  }
  return m;
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << to_json().dump(1) << "\n";
  if (!out) throw UsageError("write to '" + path + "' failed");
}

RunManifest RunManifest::load(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_all(path));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("manifest '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

std::string manifest_path_for(const std::string& output_path) {
  return output_path + ".manifest.json";
}

}  // namespace siegel
