#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace dmn {

inline constexpr const char* kToolVersion = "0.1.0";

/// Record of one CLI invocation, written as JSON next to its primary output.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();  // effective configuration
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  int threads = 1;
  double wall_seconds = 0.0;
  nlohmann::json results = nlohmann::json::object();

  std::string config_hash() const;  // FNV-1a 64 of the canonical config dump, hex
  nlohmann::json to_json() const;
};

/// Conventional manifest location for an output file.
std::string manifest_path_for(const std::string& output);

void write_manifest(const RunManifest& m, const std::string& path);
RunManifest read_manifest(const std::string& path);

class WallClock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace dmn
