#include "fbl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "csv_format.hpp"
#include "fbl/analysis.hpp"
#include "fbl/error.hpp"
#include "fbl/manifest.hpp"
#include "fbl/modulus.hpp"
#include "fbl/snapshot_io.hpp"

#ifndef FBL_VERSION
#define FBL_VERSION "unknown"
#endif

namespace fbl {

using nlohmann::json;

namespace {

const std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::solve, "solve"},
    {ExperimentKind::picard, "picard"},
    {ExperimentKind::lp_analyze, "lp-analyze"},
    {ExperimentKind::modulus_check, "modulus-check"},
    {ExperimentKind::commutator_test, "commutator-test"},
    {ExperimentKind::apriori_scan, "apriori-scan"},
    {ExperimentKind::negativity_scan, "negativity-scan"},
};

// ---------------------------------------------------------------- parsing

/// One JSON object section with dotted-path error messages.
class Section {
 public:
  Section(const json& node, std::string path, std::set<std::string> allowed)
      : node_(node), path_(std::move(path)), allowed_(std::move(allowed)) {
    if (!node_.is_null() && !node_.is_object()) fail("", "expected an object");
    if (node_.is_object()) {
      for (const auto& item : node_.items())
        if (!allowed_.count(item.key())) fail(item.key(), "unknown field");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    std::string field = path_;
    if (!key.empty()) field += (field.empty() ? "" : ".") + key;
    throw ParameterError(field + ": " + what);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) const {
    if (!node_.is_object()) return nullptr;
    auto it = node_.find(key);
    if (it == node_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const json& raw(const std::string& key) const {
    static const json null_node;
    const json* found = find(key);
    return found ? *found : null_node;
  }

  double number(const std::string& key, double fallback) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (v->is_number()) return v->get<double>();
    if (v->is_string()) {
      const std::string text = v->get<std::string>();
      if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
    }
    fail(key, "expected a number");
  }

  long long integer(const std::string& key, long long fallback) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(key, "expected an integer");
    return v->get<long long>();
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(key, "expected a string");
    return v->get<std::string>();
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> allowed_;
};

json number_json(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

ProfileSpec parse_profile(const Section& s, ProfileSpec spec) {
  spec.name = s.text("profile", spec.name);
  spec.amplitude = s.number("amplitude", spec.amplitude);
  const long long seed = s.integer("seed", static_cast<long long>(spec.seed));
  if (seed < 0) s.fail("seed", "must be non-negative");
  spec.seed = static_cast<std::uint64_t>(seed);
  spec.width = s.number("width", spec.width);
  spec.steepness = s.number("steepness", spec.steepness);
  spec.modes = static_cast<int>(s.integer("modes", spec.modes));
  const auto& names = profile_names();
  if (std::find(names.begin(), names.end(), spec.name) == names.end()) s.fail("profile", "unknown profile '" + spec.name + "'");
  if (!std::isfinite(spec.amplitude)) s.fail("amplitude", "must be finite");
  if (!(spec.width > 0.0)) s.fail("width", "must be positive");
  if (!(spec.steepness > 0.0)) s.fail("steepness", "must be positive");
  if (spec.modes < 1) s.fail("modes", "must be at least 1");
  return spec;
}

json profile_json(const ProfileSpec& p) {
  return {{"profile", p.name}, {"amplitude", p.amplitude}, {"seed", p.seed},
          {"width", p.width},  {"steepness", p.steepness}, {"modes", p.modes}};
}

const std::set<std::string> kProfileFields = {"profile", "amplitude", "seed", "width", "steepness", "modes"};

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  throw ParameterError("experiment: unknown experiment '" + name + "'");
}

std::vector<double> XiGrid::points() const {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) return {min};
  const double a = std::log(min);
  const double b = std::log(max);
  for (int i = 0; i < count; ++i) out.push_back(std::exp(a + (b - a) * i / (count - 1)));
  return out;
}

ExperimentConfig parse_config(const json& j) {
  const Section top(j, "",
                    {"experiment", "domain", "params", "solver", "initial", "analysis", "output"});
  ExperimentConfig config;
  config.kind = experiment_from_string(top.text("experiment", "solve"));
  config.output = top.text("output", "");

  const Section domain(top.raw("domain"), "domain", {"length", "points"});
  const double length = domain.number("length", 2.0 * std::numbers::pi);
  const long long points = domain.integer("points", 256);
  if (!(length > 0.0) || !std::isfinite(length)) domain.fail("length", "must be positive and finite");
  if (points < 8 || (points & (points - 1)) != 0) domain.fail("points", "must be a power of two >= 8");
  config.solver.domain = DomainSpec(length, static_cast<std::size_t>(points));

  const Section params(top.raw("params"), "params", {"alpha", "nu"});
  config.solver.params.alpha = params.number("alpha", 1.0);
  config.solver.params.nu = params.number("nu", 1.0);
  if (!(config.solver.params.alpha >= 0.0 && config.solver.params.alpha <= 2.0))
    params.fail("alpha", "must lie in [0, 2]");
  if (!(config.solver.params.nu >= 0.0) || !std::isfinite(config.solver.params.nu))
    params.fail("nu", "must be non-negative and finite");

  const Section solver(top.raw("solver"), "solver", {"t_end", "dt", "cfl", "snapshot_stride", "integrator"});
  SolverConfig& sc = config.solver;
  sc.t_end = solver.number("t_end", sc.t_end);
  if (solver.find("dt")) sc.dt = solver.number("dt", 0.0);
  sc.cfl = solver.number("cfl", sc.cfl);
  sc.snapshot_stride = static_cast<int>(solver.integer("snapshot_stride", sc.snapshot_stride));
  try {
    sc.integrator = integrator_from_string(solver.text("integrator", to_string(sc.integrator)));
  } catch (const ParameterError& e) {
    solver.fail("integrator", e.what());
  }
  if (!(sc.t_end > 0.0) || !std::isfinite(sc.t_end)) solver.fail("t_end", "must be positive and finite");
  if (sc.dt && !(*sc.dt > 0.0)) solver.fail("dt", "must be positive or null");
  if (!(sc.cfl > 0.0)) solver.fail("cfl", "must be positive");
  if (sc.snapshot_stride < 1) solver.fail("snapshot_stride", "must be a positive integer");

  const Section initial(top.raw("initial"), "initial", kProfileFields);
  config.initial = parse_profile(initial, config.initial);

  const Section analysis(top.raw("analysis"), "analysis",
                         {"besov", "xi0", "betas", "tol", "xi_grid", "picard_iterations", "commutator_q", "rho",
                          "rho1", "p1", "t1_fraction", "velocity"});
  AnalysisSettings& a = config.analysis;
  if (const json* list = analysis.find("besov")) {
    if (!list->is_array()) analysis.fail("besov", "expected an array");
    a.besov.clear();
    for (std::size_t i = 0; i < list->size(); ++i) {
      const Section entry((*list)[i], analysis.field("besov") + "[" + std::to_string(i) + "]", {"s", "p", "r"});
      BesovSpec spec{entry.number("s", 0.5), entry.number("p", 2.0), entry.number("r", 1.0)};
      if (!std::isfinite(spec.s)) entry.fail("s", "must be finite");
      if (!(spec.p >= 1.0)) entry.fail("p", "must lie in [1, inf]");
      if (!(spec.r >= 1.0)) entry.fail("r", "must lie in [1, inf]");
      a.besov.push_back(spec);
    }
  }
  a.xi0 = analysis.number("xi0", a.xi0);
  if (!(a.xi0 > 1.0) || !std::isfinite(a.xi0)) analysis.fail("xi0", "must be finite and > 1");
  if (const json* list = analysis.find("betas")) {
    if (!list->is_array()) analysis.fail("betas", "expected an array");
    a.betas.clear();
    for (const auto& b : *list) {
      if (!b.is_number() || !(b.get<double>() > 0.0)) analysis.fail("betas", "entries must be positive numbers");
      a.betas.push_back(b.get<double>());
    }
  }
  a.tol = analysis.number("tol", a.tol);
  if (!(a.tol >= 1e-12 && a.tol < 1.0)) analysis.fail("tol", "must lie in [1e-12, 1)");
  const Section grid(analysis.raw("xi_grid"), analysis.field("xi_grid"), {"min", "max", "count"});
  a.xi_grid.min = grid.number("min", a.xi_grid.min);
  a.xi_grid.max = grid.number("max", a.xi_grid.max);
  a.xi_grid.count = static_cast<int>(grid.integer("count", a.xi_grid.count));
  if (!(a.xi_grid.min > 0.0)) grid.fail("min", "must be positive");
  if (!(a.xi_grid.max > a.xi_grid.min) || !std::isfinite(a.xi_grid.max)) grid.fail("max", "must exceed min");
  if (a.xi_grid.count < 0) grid.fail("count", "must be non-negative");
  a.picard_iterations = static_cast<int>(analysis.integer("picard_iterations", a.picard_iterations));
  if (a.picard_iterations < 1) analysis.fail("picard_iterations", "must be positive");
  if (analysis.find("commutator_q")) a.commutator_q = static_cast<int>(analysis.integer("commutator_q", 0));
  a.rho = analysis.number("rho", a.rho);
  a.rho1 = analysis.number("rho1", a.rho1);
  a.p1 = analysis.number("p1", a.p1);
  if (!(a.rho1 >= 1.0)) analysis.fail("rho1", "must be >= 1");
  if (!(a.rho >= a.rho1)) analysis.fail("rho", "must be >= rho1");
  if (!(a.p1 >= 1.0)) analysis.fail("p1", "must be >= 1");
  a.t1_fraction = analysis.number("t1_fraction", a.t1_fraction);
  if (!(a.t1_fraction > 0.0 && a.t1_fraction <= 1.0)) analysis.fail("t1_fraction", "must lie in (0, 1]");
  const Section velocity(analysis.raw("velocity"), analysis.field("velocity"), kProfileFields);
  a.velocity = parse_profile(velocity, a.velocity);
  return config;
}

json to_json(const ExperimentConfig& c) {
  json besov = json::array();
  for (const auto& b : c.analysis.besov) besov.push_back({{"s", b.s}, {"p", number_json(b.p)}, {"r", number_json(b.r)}});
  const AnalysisSettings& a = c.analysis;
  return {
      {"experiment", to_string(c.kind)},
      {"output", c.output},
      {"domain", {{"length", c.solver.domain.length()}, {"points", c.solver.domain.points()}}},
      {"params", {{"alpha", c.solver.params.alpha}, {"nu", c.solver.params.nu}}},
      {"solver",
       {{"t_end", c.solver.t_end},
        {"dt", c.solver.dt ? json(*c.solver.dt) : json(nullptr)},
        {"cfl", c.solver.cfl},
        {"snapshot_stride", c.solver.snapshot_stride},
        {"integrator", to_string(c.solver.integrator)}}},
      {"initial", profile_json(c.initial)},
      {"analysis",
       {{"besov", besov},
        {"xi0", a.xi0},
        {"betas", a.betas},
        {"tol", a.tol},
        {"xi_grid", {{"min", a.xi_grid.min}, {"max", a.xi_grid.max}, {"count", a.xi_grid.count}}},
        {"picard_iterations", a.picard_iterations},
        {"commutator_q", a.commutator_q ? json(*a.commutator_q) : json(nullptr)},
        {"rho", number_json(a.rho)},
        {"rho1", number_json(a.rho1)},
        {"p1", number_json(a.p1)},
        {"t1_fraction", a.t1_fraction},
        {"velocity", profile_json(a.velocity)}}},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigFileError("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigFileError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------- running

namespace {

/// Collects every artifact written into a run directory.
class RunWriter {
 public:
  explicit RunWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  const std::filesystem::path& dir() const { return dir_; }

  std::ofstream open(const std::string& relative) {
    const auto full = dir_ / relative;
    std::filesystem::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::trunc | std::ios::binary);
    if (!out) throw Error("cannot write " + full.string());
    files_.push_back(relative);
    return out;
  }

  void snapshot(const std::string& relative, const Snapshot& snap, const EvolutionParams& params) {
    std::filesystem::create_directories((dir_ / relative).parent_path());
    write_snapshot(dir_ / relative, snap, params);
    files_.push_back(relative);
  }

  void json_file(const std::string& relative, const json& value) {
    auto out = open(relative);
    out << value.dump(2) << '\n';
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

void write_diagnostics(RunWriter& w, const RunRecord& record) {
  auto out = w.open("diagnostics.csv");
  out << "t,sup_norm,grad_sup,l2_norm,mean,blowup_cumulative,dt\n";
  for (const auto& r : record.diagnostics)
    out << csv_row({r.t, r.sup_norm, r.grad_sup, r.l2_norm, r.mean, r.blowup_cumulative, r.dt});
}

void write_snapshots(RunWriter& w, const RunRecord& record) {
  char name[48];
  for (std::size_t i = 0; i < record.snapshots.size(); ++i) {
    std::snprintf(name, sizeof name, "snapshots/snap_%05zu.bin", i);
    w.snapshot(name, record.snapshots[i], record.config.params);
  }
}

std::string status_name(RunStatus s) { return s == RunStatus::completed ? "completed" : "blowup"; }

json besov_json(const BesovSpec& b) { return {{"s", b.s}, {"p", number_json(b.p)}, {"r", number_json(b.r)}}; }

/// Headline numbers shared by every solution-producing experiment.
json run_summary(const RunRecord& record) {
  json j;
  j["status"] = status_name(record.status);
  j["warnings"] = record.warnings;
  if (!record.snapshots.empty()) {
    const Snapshot& last = record.snapshots.back();
    j["t_end"] = last.t;
    j["sup_norm_final"] = sup_norm(last.u);
    j["l2_norm_final"] = lebesgue_norm(last.u, 2.0);
    j["mean_drift"] = std::fabs(last.u.mean() - record.snapshots.front().u.mean());
  }
  if (record.diagnostics.size() >= 2) j["blowup_integral"] = blowup_integral(record).total;
  return j;
}

RunOutcome blowup_outcome(const RunRecord& record) {
  const double t = record.diagnostics.empty() ? 0.0 : record.diagnostics.back().t;
  std::ostringstream msg;
  msg << "numerical blow-up after t = " << t << "; partial artifacts kept";
  return {exit_blowup, msg.str()};
}

RunOutcome run_solve(const ExperimentConfig& c, RunWriter& w, json& report) {
  const GridFunction u0 = make_profile(c.initial, c.solver.domain);
  const RunRecord record = solve_burgers(u0, c.solver);
  write_diagnostics(w, record);
  write_snapshots(w, record);
  report.update(run_summary(record));
  if (record.status == RunStatus::blowup) return blowup_outcome(record);

  const DyadicPartition part(c.solver.domain);
  json smoothing = json::array();
  for (double beta : c.analysis.betas) {
    const double p = c.analysis.besov.empty() ? 2.0 : c.analysis.besov.front().p;
    const auto profile = smoothing_profile(record, beta, BesovSpec{1.0 / p, p, 1.0}, part);
    smoothing.push_back({{"beta", beta}, {"p", number_json(p)}, {"sup", profile.sup}});
  }
  report["smoothing"] = smoothing;
  json besov = json::array();
  for (const auto& spec : c.analysis.besov) {
    const auto r = besov_norm_report(remove_mean(record.snapshots.back().u), spec, part);
    besov.push_back({{"spec", besov_json(spec)}, {"final", r.value}, {"top_shell_share", r.top_shell_share}});
  }
  report["besov_final"] = besov;
  return {};
}

RunOutcome run_picard(const ExperimentConfig& c, RunWriter& w, json& report) {
  const GridFunction u0 = make_profile(c.initial, c.solver.domain);
  const PicardResult result = picard_solve(u0, c.solver, c.analysis.picard_iterations);
  const RunRecord& last = result.iterates.back();
  write_diagnostics(w, last);
  write_snapshots(w, last);
  {
    auto out = w.open("picard.csv");
    out << "n,difference,ratio\n";
    for (std::size_t n = 0; n < result.report.differences.size(); ++n) {
      const double ratio = n == 0 ? std::numeric_limits<double>::quiet_NaN() : result.report.ratios[n - 1];
      out << csv_row({static_cast<double>(n), result.report.differences[n], ratio});
    }
  }
  report.update(run_summary(last));
  const PicardReport& r = result.report;
  report["picard"] = {{"differences", r.differences}, {"ratios", r.ratios}, {"dt", r.dt},
                      {"smallness_proxy", r.smallness_proxy}, {"kappa", r.kappa}, {"extension", r.extension}};
  if (last.status == RunStatus::blowup) return blowup_outcome(last);

  SolverConfig direct_config = c.solver;
  direct_config.dt = r.dt;
  const RunRecord direct = solve_burgers(u0, direct_config);
  if (direct.status == RunStatus::completed)
    report["picard"]["direct_distance"] = sup_norm(direct.snapshots.back().u - last.snapshots.back().u);
  return {};
}

RunOutcome run_lp_analyze(const ExperimentConfig& c, RunWriter& w, json& report) {
  const GridFunction u = remove_mean(make_profile(c.initial, c.solver.domain));
  const DyadicPartition part(c.solver.domain);
  const BlockDecomposition blocks = decompose(u, part);
  {
    auto out = w.open("blocks.csv");
    out << "q,l2,linf\n";
    for (int q = blocks.q_min; q <= blocks.q_max(); ++q) {
      const GridFunction& b = blocks.block(q);
      out << csv_row({static_cast<double>(q), lebesgue_norm(b, 2.0), sup_norm(b)});
    }
  }
  const double scale = std::max(sup_norm(u), 1e-300);
  report["q_min"] = part.q_min();
  report["q_max"] = part.q_max();
  report["reconstruction_error"] = sup_norm(blocks.sum() - u) / scale;
  json besov = json::array();
  for (const auto& spec : c.analysis.besov) {
    const auto r = besov_norm_report(u, spec, part);
    besov.push_back({{"spec", besov_json(spec)}, {"value", r.value}, {"top_shell_share", r.top_shell_share}});
  }
  report["besov"] = besov;
  return {};
}

RunOutcome run_modulus_check(const ExperimentConfig& c, RunWriter& w, json& report) {
  const GridFunction u0 = make_profile(c.initial, c.solver.domain);
  const RunRecord record = solve_burgers(u0, c.solver);
  write_diagnostics(w, record);
  write_snapshots(w, record);
  report.update(run_summary(record));
  if (record.status == RunStatus::blowup) return blowup_outcome(record);

  const Modulus m = Modulus::standard(c.analysis.xi0);
  const double u0_sup = sup_norm(u0);
  if (!(u0_sup > 0.0)) throw ParameterError("initial.amplitude: modulus-check needs non-zero data");
  const double t1 = first_time_after(record, c.analysis.t1_fraction);
  const auto at_t1 = std::find_if(record.snapshots.begin(), record.snapshots.end(),
                                  [&](const Snapshot& s) { return s.t == t1; });
  const double grad_t1 = sup_norm(spatial_derivative(at_t1->u));
  const Extended lambda = lambda_select(u0_sup, grad_t1, m);

  auto out = w.open("modulus.csv");
  out << "t,margin,passed,grad_sup\n";
  bool all_passed = true;
  Extended min_margin = std::numeric_limits<Extended>::infinity();
  double max_grad = 0.0;
  for (const Snapshot& s : record.snapshots) {
    if (s.t < t1) continue;
    const ModulusCheckReport check = modulus_check(s.u, lambda, m);
    const double grad = sup_norm(spatial_derivative(s.u));
    out << csv_row({s.t, static_cast<double>(check.margin), check.passed ? 1.0 : 0.0, grad});
    all_passed = all_passed && check.passed;
    min_margin = std::min(min_margin, check.margin);
    max_grad = std::max(max_grad, grad);
  }
  report["modulus"] = {{"T1", t1},
                       {"grad_sup_T1", grad_t1},
                       {"log_lambda", static_cast<double>(std::log(lambda))},
                       {"log_c0", static_cast<double>(std::log(c0_select(u0_sup, m)))},
                       {"all_passed", all_passed},
                       {"margin", static_cast<double>(min_margin)},
                       {"max_grad_after_T1", max_grad},
                       {"grad_bound_holds", Extended(max_grad) <= lambda}};
  return {};
}

RunOutcome run_commutator(const ExperimentConfig& c, RunWriter& w, json& report) {
  const GridFunction u = remove_mean(make_profile(c.initial, c.solver.domain));
  const GridFunction v = remove_mean(make_profile(c.analysis.velocity, c.solver.domain));
  const DyadicPartition part(c.solver.domain);
  int lo = part.q_min();
  int hi = part.q_max();
  if (c.analysis.commutator_q) {
    if (!part.contains(*c.analysis.commutator_q))
      throw ParameterError("analysis.commutator_q: outside the resolvable range [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    lo = hi = *c.analysis.commutator_q;
  }
  // Residuals are measured against the size of the transport term v d_x u,
  // so blocks where R_q itself is at roundoff level do not inflate them.
  const double scale = std::max(sup_norm(v) * sup_norm(spatial_derivative(u)), 1e-300);
  auto out = w.open("commutator.csv");
  out << "q,r_q_sup,residual\n";
  double worst = 0.0;
  for (int q = lo; q <= hi; ++q) {
    const CommutatorTerms terms = commutator_terms(v, u, q, part);
    const double residual = sup_norm(terms.r_q - terms.parts_sum()) / scale;
    out << csv_row({static_cast<double>(q), sup_norm(terms.r_q), residual});
    worst = std::max(worst, residual);
  }
  const GridFunction uv = product(u, v);
  const GridFunction bony = paraproduct(u, v, part) + paraproduct(v, u, part) + remainder(u, v, part);
  report["max_residual"] = worst;
  report["bony_residual"] = sup_norm(uv - bony) / std::max(sup_norm(uv), 1e-300);
  return {};
}

RunOutcome run_apriori(const ExperimentConfig& c, RunWriter& w, json& report) {
  const GridFunction u0 = remove_mean(make_profile(c.initial, c.solver.domain));
  const GridFunction v = make_profile(c.analysis.velocity, c.solver.domain);
  const RunRecord record = solve_td(TDProblem{u0, constant_field(v), {}}, c.solver);
  write_diagnostics(w, record);
  write_snapshots(w, record);
  report.update(run_summary(record));
  if (record.status == RunStatus::blowup) return blowup_outcome(record);

  const DyadicPartition part(c.solver.domain);
  const std::vector<Snapshot> velocity = {{0.0, v}, {record.snapshots.back().t, v}};
  AprioriOptions options;
  options.rho = c.analysis.rho;
  options.rho1 = c.analysis.rho1;
  options.p1 = c.analysis.p1;
  json entries = json::array();
  for (const auto& spec : c.analysis.besov) {
    const AprioriReport r = apriori_ratio(record, velocity, spec, part, options);
    entries.push_back({{"spec", besov_json(spec)}, {"lhs", r.lhs}, {"rhs_core", r.rhs_core}, {"z_T", r.z_T},
                       {"ratio", number_json(r.ratio)}, {"warnings", r.warnings}});
  }
  report["apriori"] = entries;
  return {};
}

RunOutcome run_negativity(const ExperimentConfig& c, RunWriter& w, json& report) {
  const Modulus m = Modulus::standard(c.analysis.xi0);
  std::vector<Extended> grid;
  for (double xi : c.analysis.xi_grid.points()) grid.push_back(xi);
  const NegativityReport scan = negativity_scan(m, grid, c.analysis.tol);
  auto out = w.open("negativity.csv");
  out << "xi,omega,omega_prime,J,sum\n";
  for (const auto& row : scan.rows)
    out << csv_row({double(row.xi), double(row.omega), double(row.omega_prime), double(row.j), double(row.sum)});
  report["negativity"] = {{"all_negative", scan.all_negative},
                          {"has_data", scan.has_data},
                          {"points", scan.rows.size()},
                          {"max_sum", scan.has_data ? json(double(scan.max_sum)) : json(nullptr)},
                          {"omega_prime_at_zero", double(m.derivative(0))},
                          {"xi0", double(m.xi0())},
                          {"c_xi0", double(m.c_xi0())}};
  return {};
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  RunWriter writer(out_dir);
  RunManifest manifest;
  manifest.config = to_json(config);
  manifest.config["output"] = out_dir.string();
  manifest.version = FBL_VERSION;
  manifest.started = utc_timestamp();

  json report = {{"experiment", to_string(config.kind)}};
  RunOutcome outcome;
  try {
    config.solver.validate();
    switch (config.kind) {
      case ExperimentKind::solve: outcome = run_solve(config, writer, report); break;
      case ExperimentKind::picard: outcome = run_picard(config, writer, report); break;
      case ExperimentKind::lp_analyze: outcome = run_lp_analyze(config, writer, report); break;
      case ExperimentKind::modulus_check: outcome = run_modulus_check(config, writer, report); break;
      case ExperimentKind::commutator_test: outcome = run_commutator(config, writer, report); break;
      case ExperimentKind::apriori_scan: outcome = run_apriori(config, writer, report); break;
      case ExperimentKind::negativity_scan: outcome = run_negativity(config, writer, report); break;
    }
  } catch (const ParameterError& e) {
    outcome = {exit_invalid, e.what()};
  } catch (const ConfigurationError& e) {
    outcome = {exit_invalid, e.what()};
  } catch (const std::exception& e) {
    outcome = {exit_failure, e.what()};
  }
  report["exit_status"] = outcome.exit_code;
  if (!outcome.message.empty()) report["message"] = outcome.message;

  try {
    writer.json_file("report.json", report);
    for (const auto& f : writer.files()) manifest.files.push_back(describe_file(out_dir, f));
    manifest.finished = utc_timestamp();
    manifest.exit_status = outcome.exit_code;
    manifest.message = outcome.message;
    write_manifest(out_dir, manifest);
  } catch (const std::exception& e) {
    return {exit_failure, e.what()};
  }
  return outcome;
}

int worker_limit() {
  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FBL_THREADS")) {
    int value = 0;
    const char* end = env + std::char_traits<char>::length(env);
    if (std::from_chars(env, end, value).ec == std::errc{} && value > 0) return value;
  }
  return static_cast<int>(hardware);
}

RunOutcome run_ensemble(const ExperimentConfig& config, const std::filesystem::path& out_dir, int members,
                        int workers) {
  if (members < 1) return {exit_invalid, "--ensemble: must be positive"};
  std::filesystem::create_directories(out_dir);
  std::vector<RunOutcome> outcomes(static_cast<std::size_t>(members));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < members; i = next++) {
      ExperimentConfig member = config;
      member.initial.seed += static_cast<std::uint64_t>(i);
      member.analysis.velocity.seed += static_cast<std::uint64_t>(i);
      char name[32];
      std::snprintf(name, sizeof name, "member_%03d", i);
      outcomes[static_cast<std::size_t>(i)] = run_experiment(member, out_dir / name);
    }
  };
  {
    std::vector<std::jthread> pool;
    const int count = std::clamp(workers, 1, members);
    for (int t = 0; t < count; ++t) pool.emplace_back(work);
  }

  json listing = json::array();
  RunOutcome worst;
  for (int i = 0; i < members; ++i) {
    const RunOutcome& o = outcomes[static_cast<std::size_t>(i)];
    char name[32];
    std::snprintf(name, sizeof name, "member_%03d", i);
    listing.push_back({{"dir", name},
                       {"seed", config.initial.seed + static_cast<std::uint64_t>(i)},
                       {"exit_status", o.exit_code},
                       {"message", o.message}});
    if (o.exit_code != exit_ok && worst.exit_code == exit_ok) {
      worst = {o.exit_code, std::string(name) + ": " + o.message};
    }
  }
  std::ofstream out(out_dir / "ensemble.json", std::ios::trunc);
  out << json{{"members", listing}}.dump(2) << '\n';
  return worst;
}

}  // namespace fbl
