#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fbl/error.hpp"
#include "fbl/experiment.hpp"
#include "fbl/manifest.hpp"
#include "fbl/snapshot_io.hpp"

using namespace fbl;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("fbl_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct Invocation {
  int code = -1;
  std::string err;
};

Invocation fbl_cli(const std::string& args, const fs::path& scratch) {
  const fs::path err = scratch / "stderr.txt";
  const std::string cmd = std::string("\"") + FBL_CLI_PATH + "\" " + args + " >/dev/null 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Invocation out;
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  out.err = slurp(err);
  return out;
}

json small_solve() {
  return json{{"experiment", "solve"},
              {"domain", {{"points", 32}}},
              {"params", {{"alpha", 1.0}, {"nu", 0.5}}},
              {"solver", {{"t_end", 0.05}, {"snapshot_stride", 5}}},
              {"initial", {{"profile", "sine"}, {"amplitude", 1.0}}}};
}

fs::path write_config(const fs::path& dir, const json& j, const std::string& name = "config.json") {
  const fs::path p = dir / name;
  spit(p, j.dump(2));
  return p;
}

}  // namespace

TEST(SnapshotIO, RoundTripIsBitExact) {
  TempDir tmp;
  const DomainSpec d(3.5, 64);
  const GridFunction u = GridFunction::sample(d, [](double x) { return std::exp(std::sin(x)) / 3.0; });
  write_snapshot(tmp.path() / "s.bin", Snapshot{0.125, u}, EvolutionParams{0.7, 0.3});
  const SnapshotFile back = read_snapshot(tmp.path() / "s.bin");
  EXPECT_EQ(back.snapshot.t, 0.125);
  EXPECT_EQ(back.params.alpha, 0.7);
  EXPECT_EQ(back.params.nu, 0.3);
  EXPECT_EQ(back.snapshot.u.domain().length(), 3.5);
  ASSERT_EQ(back.snapshot.u.size(), 64u);
  for (std::size_t j = 0; j < 64; ++j) EXPECT_EQ(back.snapshot.u[j], u[j]);
  // magic + version + N + four doubles + samples
  EXPECT_EQ(fs::file_size(tmp.path() / "s.bin"), 4u + 4u + 8u + 32u + 64u * 8u);
}

TEST(SnapshotIO, CorruptFilesRaise) {
  TempDir tmp;
  const DomainSpec d(2.0, 16);
  write_snapshot(tmp.path() / "s.bin", Snapshot{0.0, GridFunction::zeros(d)}, EvolutionParams{});
  std::string bytes = slurp(tmp.path() / "s.bin");
  spit(tmp.path() / "short.bin", bytes.substr(0, bytes.size() - 8));
  EXPECT_THROW(read_snapshot(tmp.path() / "short.bin"), Error);
  bytes[0] = 'X';
  spit(tmp.path() / "magic.bin", bytes);
  EXPECT_THROW(read_snapshot(tmp.path() / "magic.bin"), Error);
  EXPECT_THROW(read_snapshot(tmp.path() / "missing.bin"), Error);
}

TEST(Manifest, ChecksumsAndVerification) {
  TempDir tmp;
  spit(tmp.path() / "abc.txt", "abc");
  EXPECT_EQ(sha256_file(tmp.path() / "abc.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  RunManifest m;
  m.config = json{{"k", 1}};
  m.version = "test";
  m.files.push_back(describe_file(tmp.path(), "abc.txt"));
  EXPECT_EQ(m.files[0].bytes, 3u);
  write_manifest(tmp.path(), m);
  const RunManifest back = read_manifest(tmp.path());
  EXPECT_EQ(back.to_json(), m.to_json());
  EXPECT_TRUE(verify_manifest(tmp.path(), back).empty());
  spit(tmp.path() / "abc.txt", "abd");
  EXPECT_EQ(verify_manifest(tmp.path(), back), std::vector<std::string>{"abc.txt"});
  spit(tmp.path() / kManifestName, "{ not json");
  EXPECT_THROW(read_manifest(tmp.path()), Error);
}

TEST(Config, DefaultsAndRoundTrip) {
  const ExperimentConfig c = parse_config(json::object());
  EXPECT_EQ(c.kind, ExperimentKind::solve);
  EXPECT_EQ(c.solver.domain.points(), 256u);
  EXPECT_EQ(c.solver.params.alpha, 1.0);
  const ExperimentConfig again = parse_config(to_json(parse_config(small_solve())));
  EXPECT_EQ(to_json(again), to_json(parse_config(small_solve())));
}

TEST(Config, ErrorsNameTheField) {
  json j = small_solve();
  j["params"]["alpha"] = 3.0;
  try {
    parse_config(j);
    FAIL() << "alpha = 3 accepted";
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("params.alpha"), std::string::npos);
  }
  j = small_solve();
  j["domain"]["spacing"] = 1;
  EXPECT_THROW(parse_config(j), ParameterError);
  j = small_solve();
  j["domain"]["points"] = 48;
  EXPECT_THROW(parse_config(j), ParameterError);
  j = small_solve();
  j["experiment"] = "nonsense";
  EXPECT_THROW(parse_config(j), ParameterError);
}

TEST(Cli, InvalidParameterExitsWithThree) {
  TempDir tmp;
  json j = small_solve();
  j["params"]["alpha"] = 3.0;
  const Invocation r = fbl_cli("run \"" + write_config(tmp.path(), j).string() + "\" --out \"" +
                                   (tmp.path() / "run").string() + "\"",
                               tmp.path());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("params.alpha"), std::string::npos);
}

TEST(Cli, UnreadableConfigExitsWithTwo) {
  TempDir tmp;
  EXPECT_EQ(fbl_cli("run \"" + (tmp.path() / "absent.json").string() + "\"", tmp.path()).code, 2);
  spit(tmp.path() / "broken.json", "{ \"experiment\": ");
  EXPECT_EQ(fbl_cli("run \"" + (tmp.path() / "broken.json").string() + "\"", tmp.path()).code, 2);
}

TEST(Cli, RunThenReport) {
  TempDir tmp;
  const fs::path run = tmp.path() / "run";
  const fs::path cfg = write_config(tmp.path(), small_solve());
  ASSERT_EQ(fbl_cli("run \"" + cfg.string() + "\" --out \"" + run.string() + "\"", tmp.path()).code, 0);
  EXPECT_TRUE(fs::exists(run / "manifest.json"));
  EXPECT_TRUE(fs::exists(run / "diagnostics.csv"));
  EXPECT_TRUE(fs::exists(run / "report.json"));
  EXPECT_TRUE(fs::exists(run / "snapshots"));

  const RunManifest m = read_manifest(run);
  EXPECT_EQ(m.exit_status, 0);
  EXPECT_TRUE(verify_manifest(run, m).empty());

  ASSERT_EQ(fbl_cli("report \"" + run.string() + "\"", tmp.path()).code, 0);
  const std::string first = slurp(run / "summary.json");
  const json summary = json::parse(first);
  for (const char* key : {"experiment", "exit_status", "t_end", "sup_norm_final", "blowup_integral", "series"})
    EXPECT_TRUE(summary.contains(key)) << key;
  EXPECT_EQ(summary["experiment"], "solve");
  EXPECT_TRUE(fs::exists(run / "series" / "sup_norm.csv"));

  ASSERT_EQ(fbl_cli("report \"" + run.string() + "\"", tmp.path()).code, 0);
  EXPECT_EQ(slurp(run / "summary.json"), first);
}

TEST(Cli, TamperedRunIsRejected) {
  TempDir tmp;
  const fs::path run = tmp.path() / "run";
  ASSERT_EQ(fbl_cli("run \"" + write_config(tmp.path(), small_solve()).string() + "\" --out \"" + run.string() + "\"",
                    tmp.path()).code,
            0);
  spit(run / "diagnostics.csv", "t\n0\n");
  EXPECT_EQ(fbl_cli("report \"" + run.string() + "\"", tmp.path()).code, 2);
  spit(run / "manifest.json", "garbage");
  EXPECT_EQ(fbl_cli("report \"" + run.string() + "\"", tmp.path()).code, 2);
  EXPECT_EQ(fbl_cli("report \"" + (tmp.path() / "nowhere").string() + "\"", tmp.path()).code, 2);
}

TEST(Cli, RunawayRunExitsWithFour) {
  TempDir tmp;
  json j = small_solve();
  j["params"] = {{"alpha", 0.0}, {"nu", 0.0}};
  j["solver"] = {{"t_end", 1e4}, {"cfl", 100.0}};
  const fs::path run = tmp.path() / "run";
  EXPECT_EQ(fbl_cli("run \"" + write_config(tmp.path(), j).string() + "\" --out \"" + run.string() + "\"",
                    tmp.path()).code,
            4);
  EXPECT_EQ(read_manifest(run).exit_status, 4);
}

TEST(Cli, SeededRunsAreReproducible) {
  TempDir tmp;
  json j = small_solve();
  j["initial"] = {{"profile", "random-smooth"}, {"amplitude", 0.5}};
  const fs::path cfg = write_config(tmp.path(), j);
  for (const char* name : {"a", "b"})
    ASSERT_EQ(fbl_cli("run \"" + cfg.string() + "\" --seed 42 --out \"" + (tmp.path() / name).string() + "\"",
                      tmp.path()).code,
              0);
  ASSERT_EQ(fbl_cli("run \"" + cfg.string() + "\" --seed 43 --out \"" + (tmp.path() / "c").string() + "\"",
                    tmp.path()).code,
            0);
  const std::string a = slurp(tmp.path() / "a" / "diagnostics.csv");
  EXPECT_EQ(a, slurp(tmp.path() / "b" / "diagnostics.csv"));
  EXPECT_NE(a, slurp(tmp.path() / "c" / "diagnostics.csv"));
}

TEST(Cli, EnsembleWritesOneDirectoryPerMember) {
  TempDir tmp;
  json j = small_solve();
  j["initial"] = {{"profile", "two-mode"}};
  const fs::path run = tmp.path() / "ens";
  ASSERT_EQ(fbl_cli("run \"" + write_config(tmp.path(), j).string() + "\" --ensemble 3 --out \"" + run.string() + "\"",
                    tmp.path()).code,
            0);
  for (const char* m : {"member_000", "member_001", "member_002"}) EXPECT_TRUE(fs::exists(run / m / "manifest.json"));
  EXPECT_TRUE(fs::exists(run / "ensemble.json"));
}

TEST(Cli, NegativityScanReportsSign) {
  TempDir tmp;
  const json j = {{"experiment", "negativity-scan"},
                  {"domain", {{"points", 16}}},
                  {"solver", {{"t_end", 0.01}}},
                  {"analysis", {{"xi_grid", {{"min", 1e-2}, {"max", 1e4}, {"count", 4}}}}}};
  const fs::path run = tmp.path() / "neg";
  ASSERT_EQ(fbl_cli("run \"" + write_config(tmp.path(), j).string() + "\" --out \"" + run.string() + "\"",
                    tmp.path()).code,
            0);
  ASSERT_EQ(fbl_cli("report \"" + run.string() + "\"", tmp.path()).code, 0);
  const json summary = json::parse(slurp(run / "summary.json"));
  EXPECT_EQ(summary["negativity_all_negative"], true);
  EXPECT_LT(summary["negativity_max_sum"].get<double>(), 0.0);
}
