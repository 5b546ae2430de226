#include "fbl/snapshot_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "fbl/error.hpp"

namespace fbl {
namespace {

static_assert(std::endian::native == std::endian::little, "snapshot files are written in host order");

constexpr char kMagic[4] = {'F', 'B', 'R', 'G'};

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T take(std::ifstream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value))
    throw Error("truncated snapshot file " + path.string());
  return value;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot, const EvolutionParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  const DomainSpec& domain = snapshot.u.domain();
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint64_t>(out, domain.points());
  put<double>(out, domain.length());
  put<double>(out, snapshot.t);
  put<double>(out, params.alpha);
  put<double>(out, params.nu);
  const auto samples = snapshot.u.samples();
  out.write(reinterpret_cast<const char*>(samples.data()), static_cast<std::streamsize>(samples.size_bytes()));
  if (!out) throw Error("failed writing " + path.string());
}

SnapshotFile read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw Error("not a snapshot file: " + path.string());
  const auto version = take<std::uint32_t>(in, path);
  if (version != kSnapshotVersion) throw Error("unsupported snapshot version " + std::to_string(version));
  const auto points = take<std::uint64_t>(in, path);
  const auto length = take<double>(in, path);
  const auto t = take<double>(in, path);
  EvolutionParams params;
  params.alpha = take<double>(in, path);
  params.nu = take<double>(in, path);
  if (points > (std::uint64_t{1} << 32)) throw Error("implausible grid size in " + path.string());
  std::vector<double> samples(points);
  if (!in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(points * sizeof(double))))
    throw Error("truncated snapshot file " + path.string());
  DomainSpec domain(length, points);
  return {Snapshot{t, GridFunction(domain, std::move(samples))}, params};
}

}  // namespace fbl
