#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wdscreen/format.hpp"
#include "wdscreen/measures.hpp"
#include "wdscreen/parallel.hpp"
#include "wdscreen/screening.hpp"
#include "wdscreen/simgen.hpp"

namespace wdscreen {

struct FiveNumber {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;

  std::array<double, 5> values() const { return {min, q1, median, q3, max}; }
  bool operator==(const FiveNumber&) const = default;
};

/// Quartiles with linear interpolation between order statistics (position
/// (n - 1) * p in the sorted list).
inline FiveNumber five_number(std::vector<double> xs) {
  if (xs.empty()) return {};
  std::sort(xs.begin(), xs.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= xs.size()) return xs.back();
    return xs[lo] + frac * (xs[lo + 1] - xs[lo]);
  };
  return {xs.front(), q(0.25), q(0.5), q(0.75), xs.back()};
}

struct MethodReport {
  MeasureKind method = MeasureKind::SIS;
  CriteriaTable criteria;
  std::vector<std::size_t> model_sizes;               // per replicate
  std::vector<std::vector<std::size_t>> true_ranks;  // [replicate][true feature]

  FiveNumber model_size_summary() const {
    return five_number(std::vector<double>(model_sizes.begin(), model_sizes.end()));
  }
  std::vector<FiveNumber> rank_summaries() const {
    std::vector<FiveNumber> out;
    const std::size_t m = true_ranks.empty() ? 0 : true_ranks.front().size();
    for (std::size_t f = 0; f < m; ++f) {
      std::vector<double> col;
      for (const auto& r : true_ranks) col.push_back(static_cast<double>(r[f]));
      out.push_back(five_number(col));
    }
    return out;
  }
};

struct BenchmarkReport {
  SimConfig config;
  MeasureOptions options;
  std::size_t cutoff = 0;
  std::vector<std::string> true_labels;
  std::vector<MethodReport> methods;
};

/// Labels of the true features as 1-based column names ("X1", "X12", ...).
inline std::vector<std::string> true_labels(Study s) {
  std::vector<std::string> out;
  for (auto f : detail::true_features(s)) out.push_back("X" + std::to_string(f + 1));
  return out;
}

inline void check_methods(const SimConfig& cfg, const std::vector<MeasureKind>& methods) {
  for (auto m : methods) {
    if (univariate_only(m) && (cfg.d != 1 || cfg.q != 1))
      throw ConfigError("method " + to_string(m) + " cannot handle the multivariate predictors/response of study " +
                        to_string(cfg.study) + " (d = " + std::to_string(cfg.d) + ", q = " + std::to_string(cfg.q) +
                        ")");
  }
}

/// Runs every method on the same replicate data and aggregates the criteria.
/// Replicates are spread over `threads` workers; results are folded in
/// replicate order, so the report does not depend on the thread count.
inline BenchmarkReport run_benchmark(const SimConfig& cfg, const std::vector<MeasureKind>& methods,
                                     const MeasureOptions& opt = {}, std::size_t threads = 1,
                                     std::optional<std::size_t> cutoff_override = std::nullopt,
                                     const std::function<void(std::size_t)>& on_replicate_done = {}) {
  cfg.validate();
  check_methods(cfg, methods);
  if (cutoff_override && *cutoff_override == 0) throw ConfigError("cutoff override must be >= 1");

  BenchmarkReport report;
  report.config = cfg;
  report.options = opt;
  report.cutoff = cutoff_override ? *cutoff_override : cutoff(cfg.n);
  report.true_labels = true_labels(cfg.study);

  // results[replicate][method]
  std::vector<std::vector<ScreeningResult>> results(cfg.replicates, std::vector<ScreeningResult>(methods.size()));
  std::mutex progress;
  parallel_for(cfg.replicates, threads, [&](std::size_t rep) {
    const StudyInstance inst = gen_study(cfg, rep);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const ScoreTable t = score_all(inst.x, inst.y, methods[m], opt, 1);
      results[rep][m] = evaluate(t, inst.truth, cfg.n, report.cutoff);
    }
    if (on_replicate_done) {
      std::lock_guard<std::mutex> lock(progress);
      on_replicate_done(rep);
    }
  });

  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodReport mr;
    mr.method = methods[m];
    std::vector<ScreeningResult> col;
    for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
      auto& r = results[rep][m];
      mr.model_sizes.push_back(r.model_size);
      mr.true_ranks.push_back(r.true_ranks);
      r.ranking.clear();
      r.ranking.shrink_to_fit();
      col.push_back(std::move(r));
    }
    mr.criteria = aggregate(col);
    report.methods.push_back(std::move(mr));
  }
  return report;
}

// --- JSON -------------------------------------------------------------------

inline Json to_json(const SimConfig& c) {
  return Json{{"study", to_string(c.study)},
              {"n", c.n},
              {"p", c.p},
              {"q", c.q},
              {"d", c.d},
              {"ar_coefficient", c.ar_coefficient},
              {"beta_low", c.beta_low},
              {"beta_high", c.beta_high},
              {"power_shape", c.power_shape},
              {"pareto_shape", c.pareto_shape},
              {"pareto_mode", c.pareto_mode},
              {"replicates", c.replicates},
              {"base_seed", c.base_seed},
              {"noise_sd", c.noise_sd},
              {"shared_platform_ids", c.shared_platform_ids}};
}

/// Reads a SimConfig; absent fields take the study's defaults, unknown
/// fields are an error.
inline SimConfig sim_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("simulation config must be a JSON object");
  SimConfig c = SimConfig::for_study(j.contains("study") ? parse_study(j.at("study").get<std::string>()) : Study::S1);
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "study") continue;
      else if (key == "n") c.n = val.get<std::size_t>();
      else if (key == "p") c.p = val.get<std::size_t>();
      else if (key == "q") c.q = val.get<std::size_t>();
      else if (key == "d") c.d = val.get<std::size_t>();
      else if (key == "ar_coefficient") c.ar_coefficient = val.get<double>();
      else if (key == "beta_low") c.beta_low = val.get<double>();
      else if (key == "beta_high") c.beta_high = val.get<double>();
      else if (key == "power_shape") c.power_shape = val.get<double>();
      else if (key == "pareto_shape") c.pareto_shape = val.get<double>();
      else if (key == "pareto_mode") c.pareto_mode = val.get<double>();
      else if (key == "replicates") c.replicates = val.get<std::size_t>();
      else if (key == "base_seed") c.base_seed = val.get<std::uint64_t>();
      else if (key == "noise_sd") c.noise_sd = val.get<double>();
      else if (key == "shared_platform_ids") c.shared_platform_ids = val.get<bool>();
      else throw ConfigError("unknown simulation config field '" + key + "'");
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad simulation config value: ") + e.what());
  }
  return c;
}

inline Json to_json(const MeasureOptions& o) {
  return Json{{"sc_transform", to_string(o.sc_transform)},
              {"wd_solver", to_string(o.wd_solver)},
              {"wd_preprocess", to_string(o.wd_preprocess)},
              {"wd_epsilon_factor", o.wd_epsilon_factor},
              {"wd_tol", o.wd_tol},
              {"wd_max_iter", o.wd_max_iter},
              {"wd_exact_pair_limit", o.wd_exact_pair_limit}};
}

inline MeasureOptions measure_options_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("measure options must be a JSON object");
  MeasureOptions o;
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "sc_transform") o.sc_transform = parse_sc_transform(val.get<std::string>());
      else if (key == "wd_solver") o.wd_solver = parse_wd_solver(val.get<std::string>());
      else if (key == "wd_preprocess") o.wd_preprocess = parse_wd_preprocess(val.get<std::string>());
      else if (key == "wd_epsilon_factor") o.wd_epsilon_factor = val.get<double>();
      else if (key == "wd_tol") o.wd_tol = val.get<double>();
      else if (key == "wd_max_iter") o.wd_max_iter = val.get<int>();
      else if (key == "wd_exact_pair_limit") o.wd_exact_pair_limit = val.get<std::size_t>();
      else throw ConfigError("unknown measure option '" + key + "'");
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad measure option value: ") + e.what());
  }
  return o;
}

inline Json five_number_json(const FiveNumber& f) {
  return Json{{"min", f.min}, {"q1", f.q1}, {"median", f.median}, {"q3", f.q3}, {"max", f.max}};
}

inline Json to_json(const BenchmarkReport& r) {
  Json methods = Json::array();
  for (const auto& m : r.methods) {
    Json summaries = Json::array();
    for (const auto& f : m.rank_summaries()) summaries.push_back(five_number_json(f));
    methods.push_back(Json{{"method", to_string(m.method)},
                           {"P_s", m.criteria.individual},
                           {"P_a", m.criteria.overall},
                           {"replicates", m.criteria.replicates},
                           {"model_size", m.model_sizes},
                           {"true_ranks", m.true_ranks},
                           {"model_size_summary", five_number_json(m.model_size_summary())},
                           {"rank_summaries", summaries}});
  }
  return Json{{"config", to_json(r.config)},
              {"options", to_json(r.options)},
              {"cutoff", r.cutoff},
              {"true_features", r.true_labels},
              {"methods", methods}};
}

/// Rebuilds a report from its JSON form. Summaries are recomputed from the
/// raw lists, and the stored criteria are checked against them.
inline BenchmarkReport report_from_json(const Json& j) {
  try {
    BenchmarkReport r;
    r.config = sim_config_from_json(j.at("config"));
    r.options = measure_options_from_json(j.at("options"));
    r.cutoff = j.at("cutoff").get<std::size_t>();
    r.true_labels = j.at("true_features").get<std::vector<std::string>>();
    for (const auto& m : j.at("methods")) {
      MethodReport mr;
      mr.method = parse_measure(m.at("method").get<std::string>());
      mr.model_sizes = m.at("model_size").get<std::vector<std::size_t>>();
      mr.true_ranks = m.at("true_ranks").get<std::vector<std::vector<std::size_t>>>();
      mr.criteria.individual = m.at("P_s").get<std::vector<double>>();
      mr.criteria.overall = m.at("P_a").get<double>();
      mr.criteria.replicates = m.at("replicates").get<std::size_t>();
      if (mr.model_sizes.size() != mr.criteria.replicates || mr.true_ranks.size() != mr.criteria.replicates)
        throw FormatError("report: method " + to_string(mr.method) + " has inconsistent replicate counts");
      for (const auto& row : mr.true_ranks)
        if (row.size() != r.true_labels.size())
          throw FormatError("report: method " + to_string(mr.method) + " has a rank row of the wrong length");
      r.methods.push_back(std::move(mr));
    }
    return r;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed report.json: ") + e.what());
  }
}

inline BenchmarkReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError("malformed report.json: " + std::string(e.what()));
  }
  return report_from_json(j);
}

// --- emission ---------------------------------------------------------------

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

struct BoxSeries {
  std::string label;
  FiveNumber stats;
};

// Minimal horizontal-axis boxplot: one box per series, whiskers at min/max.
inline std::string boxplot_svg(const std::string& title, const std::string& y_label,
                               const std::vector<BoxSeries>& series) {
  const double width = 80.0 + 70.0 * static_cast<double>(std::max<std::size_t>(series.size(), 1));
  const double height = 360.0, top = 40.0, bottom = 300.0, left = 60.0;
  double hi = 1.0;
  for (const auto& s : series) hi = std::max(hi, s.stats.max);
  auto y = [&](double v) { return bottom - (bottom - top) * (v / hi); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width) << "\" height=\"" << fixed(height)
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<text x=\"" << fixed(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n";
  o << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(left) << "\" y2=\""
    << fixed(bottom) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = hi * t / 4.0;
    o << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(y(v) + 4) << "\" text-anchor=\"end\">" << fixed(v)
      << "</text>\n";
  }
  o << "<text x=\"14\" y=\"" << fixed((top + bottom) / 2) << "\" transform=\"rotate(-90 14 "
    << fixed((top + bottom) / 2) << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i].stats;
    const double cx = left + 40.0 + 70.0 * static_cast<double>(i);
    o << "<line x1=\"" << fixed(cx) << "\" y1=\"" << fixed(y(s.min)) << "\" x2=\"" << fixed(cx) << "\" y2=\""
      << fixed(y(s.max)) << "\" stroke=\"black\"/>\n";
    o << "<rect x=\"" << fixed(cx - 15) << "\" y=\"" << fixed(y(s.q3)) << "\" width=\"30\" height=\""
      << fixed(std::max(y(s.q1) - y(s.q3), 0.5)) << "\" fill=\"#cfe0f3\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << fixed(cx - 15) << "\" y1=\"" << fixed(y(s.median)) << "\" x2=\"" << fixed(cx + 15)
      << "\" y2=\"" << fixed(y(s.median)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << fixed(cx) << "\" y=\"" << fixed(bottom + 16) << "\" text-anchor=\"middle\">"
      << series[i].label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace detail

inline std::string criteria_csv(const BenchmarkReport& r) {
  std::string s = "method";
  for (const auto& l : r.true_labels) s += "," + l;
  s += ",P_a\n";
  for (const auto& m : r.methods) {
    s += to_string(m.method);
    for (double v : m.criteria.individual) s += "," + format_number(v);
    s += "," + format_number(m.criteria.overall) + "\n";
  }
  return s;
}

inline std::string model_size_csv(const BenchmarkReport& r) {
  std::string s = "method,replicate,S\n";
  for (const auto& m : r.methods)
    for (std::size_t rep = 0; rep < m.model_sizes.size(); ++rep)
      s += to_string(m.method) + "," + std::to_string(rep) + "," + std::to_string(m.model_sizes[rep]) + "\n";
  return s;
}

inline std::string ranks_csv(const BenchmarkReport& r) {
  std::string s = "method,replicate,feature,rank\n";
  for (const auto& m : r.methods)
    for (std::size_t rep = 0; rep < m.true_ranks.size(); ++rep)
      for (std::size_t f = 0; f < m.true_ranks[rep].size(); ++f)
        s += to_string(m.method) + "," + std::to_string(rep) + "," + r.true_labels[f] + "," +
             std::to_string(m.true_ranks[rep][f]) + "\n";
  return s;
}

/// Writes criteria.csv, model_size.csv, ranks.csv, report.json and the two
/// boxplot SVGs into `dir` (created if needed).
inline void emit_report(const BenchmarkReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  detail::write_text(dir / "criteria.csv", criteria_csv(r));
  detail::write_text(dir / "model_size.csv", model_size_csv(r));
  detail::write_text(dir / "ranks.csv", ranks_csv(r));
  detail::write_text(dir / "report.json", to_json(r).dump(2) + "\n");

  std::vector<detail::BoxSeries> s_series, rank_series;
  for (const auto& m : r.methods) {
    s_series.push_back({to_string(m.method), m.model_size_summary()});
    const auto rs = m.rank_summaries();
    for (std::size_t f = 0; f < rs.size(); ++f)
      rank_series.push_back({to_string(m.method) + " " + r.true_labels[f], rs[f]});
  }
  const std::string study = to_string(r.config.study);
  detail::write_text(dir / "boxplot_S.svg", detail::boxplot_svg("Minimum model size S, " + study, "S", s_series));
  detail::write_text(dir / "boxplot_ranks.svg",
                     detail::boxplot_svg("Rank of true predictors, " + study, "rank", rank_series));
}

}  // namespace wdscreen
