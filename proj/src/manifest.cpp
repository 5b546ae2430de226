#include "fbl/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <memory>

#include "fbl/error.hpp"

namespace fbl {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 unavailable");
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &length);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json files_json = nlohmann::json::array();
  for (const auto& f : files) files_json.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  return {{"config", config},   {"version", version},         {"started", started},
          {"finished", finished}, {"exit_status", exit_status}, {"message", message},
          {"files", files_json}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.config = j.at("config");
    m.version = j.at("version").get<std::string>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.exit_status = j.at("exit_status").get<int>();
    m.message = j.value("message", "");
    for (const auto& f : j.at("files"))
      m.files.push_back({f.at("path").get<std::string>(), f.at("bytes").get<std::uint64_t>(),
                         f.at("sha256").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char text[32];
  std::strftime(text, sizeof text, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return text;
}

ManifestEntry describe_file(const std::filesystem::path& run_dir, const std::string& relative) {
  const auto full = run_dir / relative;
  return {relative, static_cast<std::uint64_t>(std::filesystem::file_size(full)), sha256_file(full)};
}

void write_manifest(const std::filesystem::path& run_dir, const RunManifest& manifest) {
  std::ofstream out(run_dir / kManifestName, std::ios::trunc);
  if (!out) throw Error("cannot write manifest in " + run_dir.string());
  out << manifest.to_json().dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& run_dir) {
  const auto path = run_dir / kManifestName;
  std::ifstream in(path);
  if (!in) throw Error("missing manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("corrupt manifest: ") + e.what());
  }
  return RunManifest::from_json(j);
}

std::vector<std::string> verify_manifest(const std::filesystem::path& run_dir, const RunManifest& manifest) {
  std::vector<std::string> bad;
  for (const auto& f : manifest.files) {
    const auto full = run_dir / f.path;
    std::error_code ec;
    if (!std::filesystem::exists(full, ec) || std::filesystem::file_size(full, ec) != f.bytes ||
        sha256_file(full) != f.sha256)
      bad.push_back(f.path);
  }
  return bad;
}

}  // namespace fbl
