#include "dmn/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dmn/error.hpp"

namespace dmn {

std::string RunManifest::config_hash() const {
  const std::string text = config.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config;
  j["config_hash"] = config_hash();
  j["seeds"] = seeds;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["threads"] = threads;
  j["tool_version"] = kToolVersion;
  j["wall_seconds"] = wall_seconds;
  j["results"] = results;
  return j;
}

std::string manifest_path_for(const std::string& output) { return output + ".manifest.json"; }

void write_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write manifest " + path);
  f << m.to_json().dump(2) << '\n';
  if (!f) throw IoError("write failed: " + path);
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read manifest " + path);
  RunManifest m;
  try {
    const nlohmann::json j = nlohmann::json::parse(f);
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.inputs = j.at("inputs").get<std::vector<std::string>>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.threads = j.at("threads").get<int>();
    m.wall_seconds = j.at("wall_seconds").get<double>();
    m.results = j.value("results", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest " + path + ": " + e.what());
  }
  return m;
}

}  // namespace dmn
