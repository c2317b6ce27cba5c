#include "run_manifest.hpp"

#include <ctime>

#include "ifrl/digest.hpp"
#include "ifrl/jsonl.hpp"

#ifndef IFRL_VERSION
#define IFRL_VERSION "0.0.0"
#endif

namespace ifrl::cli {
namespace {

std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

nlohmann::json RunManifest::to_json() const {
  const auto finished = std::chrono::system_clock::now();
  const auto wall = std::chrono::duration<double, std::milli>(finished - started).count();
  return {{"schema", kRunManifestSchema},
          {"command", command},
          {"version", IFRL_VERSION},
          {"config", config},
          {"config_digest", config_digest(config)},
          {"inputs", inputs},
          {"outputs", outputs},
          {"counts", counts},
          {"started_at", utc_timestamp(started)},
          {"wall_time_ms", wall}};
}

void RunManifest::write(const std::filesystem::path& path) const {
  jsonl::write_file_atomic(path, to_json().dump(2) + "\n");
}

}  // namespace ifrl::cli
