#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace ifrl::cli {

inline constexpr std::string_view kRunManifestSchema = "run_manifest_v1";

// Provenance record written next to every command's output. Everything except
// wall-clock fields is a function of the command line and inputs.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();  // effective parameters, digested
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  nlohmann::json counts = nlohmann::json::object();
  std::chrono::system_clock::time_point started = std::chrono::system_clock::now();

  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace ifrl::cli
