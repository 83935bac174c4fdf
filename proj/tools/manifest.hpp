#pragma once

// Output files of one CLI invocation plus the JSON run manifest that
// records them (argument echo, seed, content hashes).

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gascap::tools {

/// Hex SHA-1 of "blob <len>\0" + content, the id git gives the same file.
std::string git_blob_hash(std::string_view content);

class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> args, std::uint64_t seed)
      : command_(std::move(command)), args_(std::move(args)), seed_(seed) {}

  void set_instance(std::string source, std::string hash) {
    instance_source_ = std::move(source);
    instance_hash_ = std::move(hash);
  }

  /// Writes `content` to dir/name and records its hash.
  void write(const std::filesystem::path& dir, const std::string& name,
             const std::string& content);

  /// manifest.json in `dir`, keys sorted, no timestamps.
  void finish(const std::filesystem::path& dir) const;

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::uint64_t seed_ = 0;
  std::string instance_source_;
  std::string instance_hash_;
  std::vector<std::pair<std::string, std::string>> outputs_;
};

}  // namespace gascap::tools
