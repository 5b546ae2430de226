#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fbl {

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct ManifestEntry {
  /// Relative to the run directory, '/'-separated.
  std::string path;
  std::uint64_t bytes = 0;
  std::string sha256;
};

struct RunManifest {
  nlohmann::json config;
  std::string version;
  std::string started;
  std::string finished;
  std::vector<ManifestEntry> files;
  int exit_status = 0;
  std::string message;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

inline constexpr const char* kManifestName = "manifest.json";

/// Current UTC time, ISO 8601 with second resolution.
std::string utc_timestamp();

/// Checksums every listed file relative to `run_dir`.
ManifestEntry describe_file(const std::filesystem::path& run_dir, const std::string& relative);

void write_manifest(const std::filesystem::path& run_dir, const RunManifest& manifest);

/// Throws Error when the manifest is missing or malformed.
RunManifest read_manifest(const std::filesystem::path& run_dir);

/// Paths whose size or checksum no longer matches the manifest.
std::vector<std::string> verify_manifest(const std::filesystem::path& run_dir, const RunManifest& manifest);

}  // namespace fbl
