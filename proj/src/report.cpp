#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fbl/experiment.hpp"
#include "fbl/manifest.hpp"

namespace fbl {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_csv(const std::filesystem::path& path) {
  Table table;
  std::ifstream in(path);
  std::string line;
  if (std::getline(in, line)) table.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) table.rows.push_back(split(line));
  return table;
}

json lookup(const json& j, std::initializer_list<const char*> path) {
  const json* node = &j;
  for (const char* key : path) {
    if (!node->is_object() || !node->contains(key)) return nullptr;
    node = &(*node)[key];
  }
  return *node;
}

/// First a-priori ratio, when the run computed any.
json first_apriori_ratio(const json& report) {
  const json entries = lookup(report, {"apriori"});
  if (entries.is_array() && !entries.empty()) return entries.front().value("ratio", json(nullptr));
  return nullptr;
}

}  // namespace

RunOutcome emit_report(const std::filesystem::path& run_dir) {
  RunManifest manifest;
  try {
    manifest = read_manifest(run_dir);
  } catch (const std::exception& e) {
    return {exit_unreadable, e.what()};
  }
  const std::vector<std::string> stale = verify_manifest(run_dir, manifest);
  if (!stale.empty()) return {exit_unreadable, "checksum mismatch for " + stale.front()};

  json report = json::object();
  if (std::ifstream in(run_dir / "report.json"); in) {
    try {
      in >> report;
    } catch (const json::exception& e) {
      return {exit_unreadable, std::string("corrupt report.json: ") + e.what()};
    }
  }

  const std::filesystem::path series_dir = run_dir / "series";
  std::filesystem::create_directories(series_dir);

  json summary = {
      {"experiment", manifest.config.value("experiment", "")},
      {"exit_status", manifest.exit_status},
      {"t_end", lookup(report, {"t_end"})},
      {"sup_norm_final", lookup(report, {"sup_norm_final"})},
      {"blowup_integral", lookup(report, {"blowup_integral"})},
      {"modulus_margin", lookup(report, {"modulus", "margin"})},
      {"picard_ratios", lookup(report, {"picard", "ratios"})},
      {"apriori_ratio", first_apriori_ratio(report)},
  };

  // One two-column series per diagnostic.
  if (std::filesystem::exists(run_dir / "diagnostics.csv")) {
    const Table table = read_csv(run_dir / "diagnostics.csv");
    json written = json::array();
    for (std::size_t col = 1; col < table.header.size(); ++col) {
      const std::string name = table.header[col];
      std::ofstream out(series_dir / (name + ".csv"), std::ios::trunc);
      out << "t," << name << '\n';
      for (const auto& row : table.rows)
        if (row.size() > col) out << row[0] << ',' << row[col] << '\n';
      written.push_back("series/" + name + ".csv");
    }
    summary["series"] = written;
  }

  // Experiment tables are copied through unchanged.
  for (const char* name : {"negativity.csv", "picard.csv", "blocks.csv", "modulus.csv", "commutator.csv"}) {
    if (!std::filesystem::exists(run_dir / name)) continue;
    std::filesystem::copy_file(run_dir / name, series_dir / name, std::filesystem::copy_options::overwrite_existing);
    summary["series"].push_back(std::string("series/") + name);
  }
  if (const json negativity = lookup(report, {"negativity"}); !negativity.is_null()) {
    summary["negativity_all_negative"] = negativity.value("all_negative", false);
    summary["negativity_max_sum"] = negativity.value("max_sum", json(nullptr));
  }

  std::ofstream out(run_dir / "summary.json", std::ios::trunc);
  if (!out) return {exit_failure, "cannot write summary.json"};
  out << summary.dump(2) << '\n';
  return {};
}

}  // namespace fbl
