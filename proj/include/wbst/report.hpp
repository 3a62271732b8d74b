#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace wbst {

struct RunManifest {
  std::string command;
  std::map<std::string, std::string> parameters;  // spec path or inline flags
  std::uint64_t seed = 0;
  std::string output_directory;
  std::string tool_version;
  std::string git_describe;
  std::string started_at;  // UTC, ISO 8601
  double wall_seconds = 0.0;
  std::string status = "running";  // running, passed, failed, error
  std::vector<std::string> outputs;
};

std::string to_json(const RunManifest& manifest);
std::string utc_timestamp();

// Writes atomically enough for our purposes: temp file, then rename.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace wbst
