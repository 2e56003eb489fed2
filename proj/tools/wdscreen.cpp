#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "wdscreen.hpp"

namespace fs = std::filesystem;
using namespace wdscreen;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::size_t threads = 0;
  std::string methods;
  std::uint64_t seed = 0;
  std::string study;
  std::size_t replicates = 0;
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t cutoff_override = 0;
  std::string wd_solver;
  std::string wd_preprocess;
  double wd_epsilon = 0.0;
  std::string sc_transform;
  std::string impute;
  std::vector<std::string> profiles;
  std::vector<std::string> platforms;
  std::string clinical;
  std::string tmb_column;
  std::string report;
  std::size_t cases = 0;
  bool progress = false;
};

// Keys of a config file that are not SimConfig fields.
struct FileConfig {
  SimConfig sim;
  MeasureOptions options;
  std::vector<MeasureKind> methods;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> cutoff_override;
  std::vector<std::string> profiles;
  std::vector<std::string> platforms;
  std::optional<std::string> clinical;
  std::optional<std::string> tmb_column;
  std::optional<Impute> impute;
};

std::vector<MeasureKind> parse_method_list(const std::string& s) {
  std::vector<MeasureKind> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_measure(item));
  if (out.empty()) throw ConfigError("empty method list");
  return out;
}

FileConfig load_config(const std::string& path) {
  FileConfig fc;
  if (path.empty()) return fc;
  if (!fs::exists(path)) throw IoError("config file " + path + " does not exist");
  std::ifstream in(path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("cannot parse config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config " + path + " must hold a JSON object");
  try {
    Json sim = Json::object();
    for (const auto& [key, val] : j.items()) {
      if (key == "methods") {
        for (const auto& m : val) fc.methods.push_back(parse_measure(m.get<std::string>()));
      } else if (key == "out") {
        fc.out = val.get<std::string>();
      } else if (key == "threads") {
        fc.threads = val.get<std::size_t>();
      } else if (key == "cutoff_override") {
        fc.cutoff_override = val.get<std::size_t>();
      } else if (key == "options") {
        fc.options = measure_options_from_json(val);
      } else if (key == "profiles") {
        fc.profiles = val.get<std::vector<std::string>>();
      } else if (key == "platforms") {
        fc.platforms = val.get<std::vector<std::string>>();
      } else if (key == "clinical") {
        fc.clinical = val.get<std::string>();
      } else if (key == "tmb_column") {
        fc.tmb_column = val.get<std::string>();
      } else if (key == "impute") {
        fc.impute = parse_impute(val.get<std::string>());
      } else {
        sim[key] = val;
      }
    }
    fc.sim = sim_config_from_json(sim);
  } catch (const Json::exception& e) {
    throw ConfigError("bad value in config " + path + ": " + e.what());
  }
  return fc;
}

void apply_option_flags(const CLI::App& cmd, const Flags& f, MeasureOptions& o) {
  if (cmd.count("--wd-solver")) o.wd_solver = parse_wd_solver(f.wd_solver);
  if (cmd.count("--wd-preprocess")) o.wd_preprocess = parse_wd_preprocess(f.wd_preprocess);
  if (cmd.count("--wd-epsilon")) o.wd_epsilon_factor = f.wd_epsilon;
  if (cmd.count("--sc-transform")) o.sc_transform = parse_sc_transform(f.sc_transform);
}

void write_run_info(const fs::path& dir, const std::string& command, std::size_t threads, double seconds) {
  const Json j{{"command", command}, {"threads", threads}, {"wall_seconds", seconds}};
  std::ofstream out(dir / "run_info.json");
  out << j.dump(2) << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_simulate(const CLI::App& cmd, const Flags& f) {
  const auto t0 = std::chrono::steady_clock::now();
  FileConfig fc = load_config(f.config);
  SimConfig cfg = fc.sim;
  if (cmd.count("--study")) {
    // Switching study resets the study-specific defaults; replicate count
    // and seed carry over from the file.
    const Study s = parse_study(f.study);
    if (s != cfg.study) {
      SimConfig fresh = SimConfig::for_study(s);
      fresh.replicates = cfg.replicates;
      fresh.base_seed = cfg.base_seed;
      cfg = fresh;
    }
  }
  if (cmd.count("--replicates")) cfg.replicates = f.replicates;
  if (cmd.count("--seed")) cfg.base_seed = f.seed;
  if (cmd.count("--n")) cfg.n = f.n;
  if (cmd.count("--p")) cfg.p = f.p;
  MeasureOptions opt = fc.options;
  apply_option_flags(cmd, f, opt);

  std::vector<MeasureKind> methods = fc.methods;
  if (cmd.count("--methods")) methods = parse_method_list(f.methods);
  if (methods.empty())
    for (auto m : kAllMeasures)
      if (!cfg.multivariate() || !univariate_only(m)) methods.push_back(m);

  std::optional<std::size_t> cutoff_override = fc.cutoff_override;
  if (cmd.count("--cutoff-override")) cutoff_override = f.cutoff_override;
  const std::string out = cmd.count("--out") ? f.out : fc.out.value_or("wdscreen_out");
  const std::size_t threads = resolve_threads(cmd.count("--threads") ? f.threads : fc.threads.value_or(0));

  std::function<void(std::size_t)> progress;
  std::size_t done = 0;
  if (f.progress)
    progress = [&](std::size_t) { std::cerr << "\rreplicate " << ++done << "/" << cfg.replicates << std::flush; };
  const BenchmarkReport report = run_benchmark(cfg, methods, opt, threads, cutoff_override, progress);
  if (f.progress) std::cerr << "\n";
  emit_report(report, out);
  write_run_info(out, "simulate", threads, seconds_since(t0));

  std::cout << criteria_csv(report);
  return 0;
}

int cmd_screen(const CLI::App& cmd, const Flags& f) {
  const auto t0 = std::chrono::steady_clock::now();
  FileConfig fc = load_config(f.config);
  std::vector<std::string> profiles = cmd.count("--profile") ? f.profiles : fc.profiles;
  std::vector<std::string> platforms = cmd.count("--platform") ? f.platforms : fc.platforms;
  const std::string clinical = cmd.count("--clinical") ? f.clinical : fc.clinical.value_or("");
  const std::string tmb_column =
      cmd.count("--tmb-column") ? f.tmb_column : fc.tmb_column.value_or("TMB_NONSYNONYMOUS");
  const Impute impute = cmd.count("--impute") ? parse_impute(f.impute) : fc.impute.value_or(Impute::drop);
  if (profiles.empty()) throw ConfigError("screen needs at least one --profile");
  if (clinical.empty()) throw ConfigError("screen needs --clinical");
  for (const auto& p : profiles)
    if (!fs::exists(p)) throw IoError("profile " + p + " does not exist");
  if (!fs::exists(clinical)) throw IoError("clinical file " + clinical + " does not exist");
  if (platforms.empty())
    for (const auto& p : profiles) platforms.push_back(fs::path(p).stem().string());

  MeasureOptions opt = fc.options;
  apply_option_flags(cmd, f, opt);
  std::vector<MeasureKind> methods = fc.methods;
  if (cmd.count("--methods")) methods = parse_method_list(f.methods);
  if (methods.empty()) methods = {MeasureKind::DC_SIS, MeasureKind::PC_Screen, MeasureKind::WD_Screen};
  std::optional<std::size_t> k = fc.cutoff_override;
  if (cmd.count("--cutoff-override")) k = f.cutoff_override;
  const std::string out = cmd.count("--out") ? f.out : fc.out.value_or("wdscreen_out");
  const std::size_t threads = resolve_threads(cmd.count("--threads") ? f.threads : fc.threads.value_or(0));

  std::vector<GeneMatrix> mats;
  for (const auto& p : profiles) mats.push_back(parse_profile(p));
  const ClinicalTable table = parse_clinical(clinical, tmb_column);
  if (table.warnings) std::cerr << "warning: " << table.warnings << " clinical rows without a usable TMB value\n";
  const MultiOmicsDataset ds = align(mats, table, impute, platforms);
  const RealStudyReport r = run_real_study(ds, methods, opt, threads, k);
  emit_real_study(r, ds, out);
  write_run_info(out, "screen", threads, seconds_since(t0));

  std::cout << ds.x.platforms() << " platforms, " << ds.x.subjects() << " samples, " << ds.x.features()
            << " genes; top " << r.k << " per method; intersection:";
  for (const auto& g : r.intersection) std::cout << ' ' << g;
  std::cout << "\n";
  return 0;
}

int cmd_report(const CLI::App& cmd, const Flags& f) {
  if (!fs::exists(f.report)) throw IoError("report " + f.report + " does not exist");
  const BenchmarkReport r = read_report(f.report);
  const fs::path out = cmd.count("--out") ? fs::path(f.out) : fs::path(f.report).parent_path();
  emit_report(r, out.empty() ? fs::path(".") : out);
  std::cout << criteria_csv(r);
  return 0;
}

int cmd_selftest(const Flags& f) {
  const double tol = 1e-9;
  bool ok = true;
  for (const auto& c : run_oracle_suite(f.cases, 10 * f.cases)) {
    const bool pass = c.max_error <= tol;
    ok = ok && pass;
    std::printf("%-10s %s  cases=%zu  max|diff|=%.3g\n", c.name.c_str(), pass ? "ok  " : "FAIL", c.cases,
                c.max_error);
  }
  std::printf("%s\n", ok ? "selftest passed" : "selftest FAILED");
  return ok ? 0 : 1;
}

void add_common(CLI::App* c, Flags& f) {
  c->add_option("--config", f.config, "JSON config file; flags override its fields");
  c->add_option("--out", f.out, "output directory (default wdscreen_out)");
  c->add_option("--threads", f.threads, "worker threads (default: WDSCREEN_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  c->add_option("--methods", f.methods, "comma-separated methods, e.g. DC-SIS,PC-Screen,WD-Screen");
  c->add_option("--cutoff-override", f.cutoff_override, "number of selected features instead of floor(n/ln n)")
      ->check(CLI::PositiveNumber);
  c->add_option("--wd-solver", f.wd_solver, "WD-Screen transport solver")
      ->check(CLI::IsMember({"exact", "sinkhorn", "auto"}));
  c->add_option("--wd-preprocess", f.wd_preprocess, "WD-Screen preprocessing")
      ->check(CLI::IsMember({"standardize", "rank"}));
  c->add_option("--wd-epsilon", f.wd_epsilon, "Sinkhorn epsilon as a multiple of the mean cost")
      ->check(CLI::PositiveNumber);
  c->add_option("--sc-transform", f.sc_transform, "SC-SIS distance transform")
      ->check(CLI::IsMember({"one_minus_exp_median", "one_minus_exp", "identity"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wdscreen: marginal feature screening benchmarks and real-data screening"};
  app.require_subcommand(1, 1);
  Flags f;

  auto* sim = app.add_subcommand("simulate", "run a simulation study and write criteria/model-size/rank tables");
  add_common(sim, f);
  sim->add_option("--study", f.study, "simulation study")->check(CLI::IsMember({"S1", "S2", "S3", "S4"}));
  sim->add_option("--replicates", f.replicates, "number of replicates")->check(CLI::PositiveNumber);
  sim->add_option("--seed", f.seed, "base seed");
  sim->add_option("--n", f.n, "subjects per replicate")->check(CLI::Range(2, 1 << 20));
  sim->add_option("--p", f.p, "features per replicate")->check(CLI::PositiveNumber);
  sim->add_flag("--progress", f.progress, "report finished replicates on stderr");

  auto* scr = app.add_subcommand("screen", "screen genes of aligned genomic profiles against TMB");
  add_common(scr, f);
  scr->add_option("--profile", f.profiles, "profile file (repeat once per platform)");
  scr->add_option("--platform", f.platforms, "platform name (repeat, same order as --profile)");
  scr->add_option("--clinical", f.clinical, "clinical sample file");
  scr->add_option("--tmb-column", f.tmb_column, "TMB column name (default TMB_NONSYNONYMOUS)");
  scr->add_option("--impute", f.impute, "missing-value rule")->check(CLI::IsMember({"drop", "median"}));

  auto* rep = app.add_subcommand("report", "regenerate CSV and SVG outputs from a report.json");
  rep->add_option("report", f.report, "path to report.json")->required();
  rep->add_option("--out", f.out, "output directory (default: the report's directory)");

  auto* self = app.add_subcommand("selftest", "compare every measure with its brute-force oracle");
  f.cases = 20;
  self->add_option("--cases", f.cases, "random instances per measure")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sim->parsed()) return cmd_simulate(*sim, f);
    if (scr->parsed()) return cmd_screen(*scr, f);
    if (rep->parsed()) return cmd_report(*rep, f);
    return cmd_selftest(f);
  } catch (const Error& e) {
    std::cerr << "wdscreen: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "wdscreen: unexpected failure: " << e.what() << "\n";
    return 1;
  }
}
