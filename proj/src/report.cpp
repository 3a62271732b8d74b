#include "wbst/report.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "wbst/errors.hpp"

namespace wbst {

std::string to_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["parameters"] = m.parameters;
  j["seed"] = m.seed;
  j["output_directory"] = m.output_directory;
  j["tool_version"] = m.tool_version;
  j["git_describe"] = m.git_describe;
  j["started_at"] = m.started_at;
  j["wall_seconds"] = m.wall_seconds;
  j["status"] = m.status;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + path);
    out << content;
    if (!out) throw InvalidInput("write failed: " + path);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace wbst
