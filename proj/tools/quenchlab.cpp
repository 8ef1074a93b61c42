// quenchlab command-line driver.
//
//   quenchlab pressure   --config c.json [--beta B] [--seed S]
//   quenchlab quenched   --config c.json [--exact | --samples N] [--seed S]
//   quenchlab verify     [--config c.json] [--checks a,b]
//   quenchlab limit      --config c.json [--format csv|json]
//   quenchlab truncation --config c.json [--format csv|json]
//
// Exit codes: 0 pass, 1 inequality violation, 2 config/precondition error,
// 3 capacity, 4 I/O.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quenchlab/quenchlab.hpp"

#ifndef QUENCHLAB_VERSION
#define QUENCHLAB_VERSION "0.0.0"
#endif

using namespace quenchlab;

namespace {

enum Exit { kPass = 0, kViolation = 1, kConfigError = 2, kCapacityError = 3, kIoError = 4 };

struct Options {
  std::string config_path;
  std::optional<double> beta;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  bool exact = false;
  std::size_t threads = default_threads();
  std::string out;
  std::string checks;
  std::string format = "csv";
  std::string replay = "quenchlab_replay.json";
};

/// Config document with flag overrides folded into "run".
struct Resolved {
  json doc;
  std::string hash;
  const json& run() const { return doc.at("run"); }
};

Resolved resolve(const Options& o, bool config_required) {
  json doc = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    require(in.good(), ErrorKind::io, "cannot read config '" + o.config_path + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::config, "malformed config '" + o.config_path + "': " + e.what());
    }
    require(doc.is_object(), ErrorKind::config, "config must be a JSON object");
  } else {
    require(!config_required, ErrorKind::config, "--config is required");
  }
  if (!doc.contains("run")) doc["run"] = json::object();
  require(doc["run"].is_object(), ErrorKind::config, "config 'run' must be an object");
  auto& run = doc["run"];
  if (o.beta) run["beta"] = *o.beta;
  if (o.seed) run["seed"] = *o.seed;
  if (o.samples) run["samples"] = *o.samples;
  if (o.exact) run["exact"] = true;
  if (!run.contains("seed")) run["seed"] = 0;
  return {doc, hex64(content_hash(doc))};
}

template <class T>
T run_field(const Resolved& r, const char* key, T fallback) {
  return detail::field_or<T>(r.run(), key, fallback, "run");
}

template <class T>
T run_required(const Resolved& r, const char* key) {
  return detail::field<T>(r.run(), key, "run");
}

CouplingFamily model_of(const Resolved& r) { return family_from_json(detail::field<json>(r.doc, "model", "config")); }

Region region_of(const Resolved& r, int dimension) {
  auto region = detail::field<json>(r.doc, "region", "config");
  if (!region.contains("dimension")) region["dimension"] = dimension;
  try {
    return region_from_json(region);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::validation) fail(ErrorKind::config, std::string("region: ") + e.what());
    throw;
  }
}

json provenance(const Resolved& r, const char* command) {
  return {{"command", command},
          {"seed", r.run().at("seed")},
          {"config_hash", r.hash},
          {"tool_version", QUENCHLAB_VERSION}};
}

/// stdout, or the --out file opened before any work starts so that an
/// unwritable path fails fast.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file_.open(path, std::ios::out | std::ios::trunc);
    require(file_.good(), ErrorKind::io, "cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish() {
    stream().flush();
    require(stream().good(), ErrorKind::io, "write failed");
  }

 private:
  std::ofstream file_;
};

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_provenance(const json& p) {
  return "# command=" + p.at("command").get<std::string>() + " seed=" + p.at("seed").dump() +
         " config_hash=" + p.at("config_hash").get<std::string>() +
         " tool_version=" + p.at("tool_version").get<std::string>();
}

int cmd_pressure(const Options& o) {
  const auto r = resolve(o, true);
  Sink sink(o.out);
  const auto family = model_of(r);
  const auto region = region_of(r, family.dimension());
  const double beta = run_required<double>(r, "beta");
  const auto seed = run_required<std::uint64_t>(r, "seed");
  const auto summary = log_partition(instantiate(family, region, seed), beta);
  auto record = provenance(r, "pressure");
  record["beta"] = summary.beta;
  record["log_partition"] = summary.log_partition;
  record["pressure_density"] = summary.pressure_density;
  record["n_sites"] = region.size();
  sink.stream() << record.dump() << '\n';
  sink.finish();
  return kPass;
}

int cmd_quenched(const Options& o) {
  const auto r = resolve(o, true);
  Sink sink(o.out);
  const auto family = model_of(r);
  const auto region = region_of(r, family.dimension());
  const double beta = run_required<double>(r, "beta");
  const auto seed = run_required<std::uint64_t>(r, "seed");
  const bool exact = run_field<bool>(r, "exact", false);
  const auto estimate = exact ? quenched_exact(family, region, beta, o.threads)
                              : quenched_mc(family, region, beta, run_field<std::size_t>(r, "samples", 10000), seed,
                                            o.threads);
  auto record = provenance(r, "quenched");
  record["beta"] = beta;
  record["n_sites"] = region.size();
  record.update(estimate_to_json(estimate));
  record["seed"] = seed;
  const auto bound = bound_value(family, beta, BoundKind::automatic);
  record["bound"] = {{"kind", bound_name(bound.kind)}, {"value", bound.value}};
  sink.stream() << record.dump() << '\n';
  sink.finish();
  return kPass;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_verify(const Options& o) {
  const auto r = resolve(o, false);
  Sink sink(o.out);
  SuiteOptions suite_options;
  suite_options.seed = run_required<std::uint64_t>(r, "seed");
  suite_options.threads = o.threads;
  if (r.run().contains("instances")) suite_options.instances = run_required<std::size_t>(r, "instances");
  if (r.run().contains("samples")) suite_options.samples = run_required<std::size_t>(r, "samples");

  std::vector<std::string> names = split_list(o.checks);
  if (names.empty() && r.run().contains("checks")) names = run_required<std::vector<std::string>>(r, "checks");
  const bool replay_only = names.empty() && r.doc.contains("instances");
  if (names.empty() && !replay_only)
    for (const auto& s : suites()) names.push_back(s.name);

  CheckSet reports;
  for (const auto& name : names) merge_into(reports, find_suite(name).run(suite_options));
  if (r.doc.contains("instances")) {
    const auto& instances = r.doc.at("instances");
    require(instances.is_array(), ErrorKind::config, "'instances' must be an array");
    for (const auto& instance : instances) merge_into(reports, run_instance(instance, o.threads));
  }

  const auto base = provenance(r, "verify");
  json failures = json::array();
  for (const auto& report : reports) {
    auto line = report_to_json(report);
    line.update(base);
    sink.stream() << line.dump() << '\n';
    if (!report.passed && !report.worst_instance.is_null()) failures.push_back(report.worst_instance);
  }
  sink.finish();
  if (all_passed(reports)) return kPass;
  if (!failures.empty()) {
    std::ofstream replay(o.replay);
    require(replay.good(), ErrorKind::io, "cannot write replay file '" + o.replay + "'");
    replay << json{{"instances", failures}}.dump(2) << '\n';
    std::cerr << "violation; worst instances written to " << o.replay << '\n';
  }
  return kViolation;
}

std::vector<int> side_list(const Resolved& r) {
  return detail::field_or<std::vector<int>>(r.run(), "n_list", {2, 4, 6, 8}, "run");
}

BoundKind bound_kind_of(const std::string& name) {
  for (auto k : {BoundKind::ferro, BoundKind::l1, BoundKind::l2sq, BoundKind::combined, BoundKind::lp,
                 BoundKind::automatic})
    if (bound_name(k) == name) return k;
  fail(ErrorKind::config, "unknown bound kind '" + name + "'");
}

int cmd_limit(const Options& o) {
  const auto r = resolve(o, true);
  Sink sink(o.out);
  const auto family = model_of(r);
  const double beta = run_required<double>(r, "beta");
  const auto seed = run_required<std::uint64_t>(r, "seed");
  const bool exact = run_field<bool>(r, "exact", false);
  const auto mode = family.deterministic() ? ConvergenceMode::ferro_exact
                    : exact               ? ConvergenceMode::quenched_exact
                                          : ConvergenceMode::quenched_mc;
  const auto table = convergence_run(family, mode, beta, side_list(r), run_field<std::size_t>(r, "samples", 10000),
                                     seed, o.threads, bound_kind_of(run_field<std::string>(r, "bound", "auto")));
  const auto base = provenance(r, "limit");
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& row : table.rows)
      rows.push_back({{"N", row.n}, {"pressure", row.pressure}, {"std_error", row.std_error}, {"bound", row.bound},
                      {"exact_flag", row.exact}});
    auto record = base;
    record["beta"] = beta;
    record["bound_kind"] = bound_name(table.bound_kind);
    record["claimed_limit_bound"] = table.claimed_limit_bound;
    record["sup_pressure"] = table.sup_pressure;
    record["rows"] = rows;
    record["flags"] = table.flags;
    if (table.bound_warning) record["bound_warning"] = *table.bound_warning;
    sink.stream() << record.dump() << '\n';
  } else {
    auto& out = sink.stream();
    out << csv_provenance(base) << " bound_kind=" << bound_name(table.bound_kind) << '\n';
    out << "N,pressure,std_error,bound,exact_flag\n";
    for (const auto& row : table.rows)
      out << row.n << ',' << number(row.pressure) << ',' << number(row.std_error) << ',' << number(row.bound) << ','
          << (row.exact ? 1 : 0) << '\n';
  }
  sink.finish();
  if (table.bound_warning) std::cerr << "warning: " << *table.bound_warning << '\n';
  for (const auto& flag : table.flags) std::cerr << "flag: " << flag << '\n';
  return kPass;
}

int cmd_truncation(const Options& o) {
  const auto r = resolve(o, true);
  Sink sink(o.out);
  const auto family = model_of(r);
  const auto region = region_of(r, family.dimension());
  const double beta = run_required<double>(r, "beta");
  const auto seed = run_required<std::uint64_t>(r, "seed");
  const auto cutoffs = detail::field_or<std::vector<double>>(r.run(), "r_grid", {1.0, 10.0, 100.0}, "run");
  const auto study =
      truncation_error_check(family, region, beta, cutoffs, run_field<std::size_t>(r, "samples", 10000), seed,
                             o.threads);
  const auto base = provenance(r, "truncation");
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& row : study.rows)
      rows.push_back({{"R", row.cutoff}, {"tail_abs_mean", row.tail_abs_mean}, {"difference", row.difference},
                      {"std_error", row.std_error}, {"bound", row.bound}});
    auto record = base;
    record["beta"] = beta;
    record["rows"] = rows;
    json reports = json::array();
    for (const auto& rep : study.reports) reports.push_back(report_to_json(rep));
    record["checks"] = reports;
    sink.stream() << record.dump() << '\n';
  } else {
    auto& out = sink.stream();
    out << csv_provenance(base) << '\n';
    out << "R,tail_abs_mean,difference,std_error,bound\n";
    for (const auto& row : study.rows)
      out << number(row.cutoff) << ',' << number(row.tail_abs_mean) << ',' << number(row.difference) << ','
          << number(row.std_error) << ',' << number(row.bound) << '\n';
  }
  sink.finish();
  return all_passed(study.reports) ? kPass : kViolation;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::capacity: return kCapacityError;
    case ErrorKind::io: return kIoError;
    default: return kConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and quenched pressures of finite Ising-type models, and checks of their inequalities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QUENCHLAB_VERSION);
  Options o;

  const auto common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON config file");
    sub->add_option("--seed", o.seed, "64-bit seed");
    sub->add_option("--threads", o.threads, "worker threads (default QUENCHLAB_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output path (default stdout)");
  };
  auto* pressure = app.add_subcommand("pressure", "exact pressure of one disorder realization");
  auto* quenched = app.add_subcommand("quenched", "quenched pressure, exact or Monte Carlo");
  auto* verify = app.add_subcommand("verify", "run inequality checks; JSON lines");
  auto* limit = app.add_subcommand("limit", "pressure over growing boxes against the limit bound");
  auto* truncation = app.add_subcommand("truncation", "centered truncation error sweep over cutoffs");
  for (auto* sub : {pressure, quenched, verify, limit, truncation}) common(sub);
  for (auto* sub : {pressure, quenched, limit, truncation}) sub->add_option("--beta", o.beta, "inverse temperature");
  for (auto* sub : {quenched, verify, limit, truncation})
    sub->add_option("--samples", o.samples, "Monte Carlo disorder samples")->check(CLI::PositiveNumber);
  for (auto* sub : {quenched, limit}) sub->add_flag("--exact", o.exact, "enumerate disorder exactly");
  for (auto* sub : {limit, truncation})
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  verify->add_option("--checks", o.checks, "comma-separated check names");
  verify->add_option("--replay", o.replay, "where to write the worst instances on violation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (*pressure) return cmd_pressure(o);
    if (*quenched) return cmd_quenched(o);
    if (*verify) return cmd_verify(o);
    if (*limit) return cmd_limit(o);
    return cmd_truncation(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
