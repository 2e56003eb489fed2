#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wdscreen/core_data.hpp"
#include "wdscreen/format.hpp"
#include "wdscreen/harness.hpp"
#include "wdscreen/measures.hpp"
#include "wdscreen/screening.hpp"

namespace wdscreen {

/// One genomic profile: genes (rows) by samples (columns), missing cells
/// flagged in `missing` (their value slot holds NaN).
struct GeneMatrix {
  std::vector<std::string> genes;
  std::vector<std::string> samples;
  Matrix values;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> missing;
  // Rows dropped because their Hugo symbol was empty.
  std::size_t unnamed_rows = 0;

  std::size_t missing_count() const { return static_cast<std::size_t>(missing.count()); }
};

struct ClinicalTable {
  std::map<std::string, double> tmb;
  // Rows whose TMB was absent, unparsable, negative or non-finite.
  std::size_t warnings = 0;
};

enum class Impute { drop, median };

inline Impute parse_impute(const std::string& s) {
  if (s == "drop") return Impute::drop;
  if (s == "median") return Impute::median;
  throw ConfigError("unknown impute rule '" + s + "' (expected drop or median)");
}

struct MultiOmicsDataset {
  PredictorArray x;
  ResponseBlock y;
  std::vector<std::string> genes;
  std::vector<std::string> samples;
  std::vector<std::string> platforms;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool is_missing_token(std::string_view s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "null" || s == "[Not Available]" ||
         s == "[Not Applicable]" || s == "[Unknown]";
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// Reads lines, skipping '#' comments and blank lines; returns (line no, text).
inline std::vector<std::pair<std::size_t, std::string>> content_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.emplace_back(no, line);
  }
  return out;
}

}  // namespace detail

/// Parses a cBioPortal-style profile (data_cna.txt, data_mrna_*.txt, ...).
inline GeneMatrix parse_profile(const std::filesystem::path& path) {
  const auto lines = detail::content_lines(path);
  const std::string where = path.string();
  if (lines.empty()) throw FormatError(where + ": no header row (missing Hugo_Symbol column)");

  const auto& [header_no, header_text] = lines.front();
  const auto header = detail::split_tabs(header_text);
  std::ptrdiff_t symbol_col = -1;
  std::vector<std::size_t> sample_cols;
  GeneMatrix g;
  std::set<std::string> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(detail::trim(header[c]));
    if (name == "Hugo_Symbol") {
      symbol_col = static_cast<std::ptrdiff_t>(c);
    } else if (name == "Entrez_Gene_Id") {
      continue;
    } else {
      if (name.empty()) throw FormatError(where + ":" + std::to_string(header_no) + ": empty sample id in header");
      if (!seen.insert(name).second)
        throw FormatError(where + ":" + std::to_string(header_no) + ": duplicate sample column '" + name + "'");
      sample_cols.push_back(c);
      g.samples.push_back(name);
    }
  }
  if (symbol_col < 0)
    throw FormatError(where + ":" + std::to_string(header_no) + ": header has no Hugo_Symbol column");

  std::vector<std::vector<double>> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [no, text] = lines[li];
    const auto cells = detail::split_tabs(text);
    if (cells.size() != header.size())
      throw FormatError(where + ":" + std::to_string(no) + ": row has " + std::to_string(cells.size()) +
                        " fields, header has " + std::to_string(header.size()));
    const std::string symbol(detail::trim(cells[static_cast<std::size_t>(symbol_col)]));
    if (symbol.empty()) {
      ++g.unnamed_rows;
      continue;
    }
    std::vector<double> row(sample_cols.size());
    for (std::size_t s = 0; s < sample_cols.size(); ++s) {
      const auto cell = detail::trim(cells[sample_cols[s]]);
      if (detail::is_missing_token(cell)) {
        row[s] = nan;
      } else if (!detail::parse_double(cell, row[s]) || !std::isfinite(row[s])) {
        throw FormatError(where + ":" + std::to_string(no) + ": cannot parse value '" + std::string(cell) +
                          "' for sample " + g.samples[s]);
      }
    }
    g.genes.push_back(symbol);
    rows.push_back(std::move(row));
  }
  const auto n_genes = static_cast<Eigen::Index>(rows.size());
  const auto n_samples = static_cast<Eigen::Index>(g.samples.size());
  g.values.resize(n_genes, n_samples);
  g.missing.resize(n_genes, n_samples);
  for (Eigen::Index i = 0; i < n_genes; ++i)
    for (Eigen::Index s = 0; s < n_samples; ++s) {
      const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)];
      g.values(i, s) = v;
      g.missing(i, s) = std::isnan(v);
    }
  return g;
}

/// Writes a profile back as tab-separated text with canonical numbers; missing
/// cells become NA.
inline void write_profile(const GeneMatrix& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "Hugo_Symbol";
  for (const auto& s : g.samples) out << '\t' << s;
  out << '\n';
  for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
    out << g.genes[static_cast<std::size_t>(i)];
    for (Eigen::Index s = 0; s < g.values.cols(); ++s)
      out << '\t' << (g.missing(i, s) ? std::string("NA") : format_number(g.values(i, s)));
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

inline ClinicalTable parse_clinical(const std::filesystem::path& path,
                                    const std::string& tmb_column = "TMB_NONSYNONYMOUS") {
  const auto lines = detail::content_lines(path);
  const std::string where = path.string();
  if (lines.empty()) throw FormatError(where + ": no header row");
  const auto& [header_no, header_text] = lines.front();
  const auto header = detail::split_tabs(header_text);
  std::ptrdiff_t id_col = -1, tmb_col = -1;
  std::string available;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(detail::trim(header[c]));
    available += (c ? ", " : "") + name;
    if (name == "SAMPLE_ID") id_col = static_cast<std::ptrdiff_t>(c);
    if (name == tmb_column) tmb_col = static_cast<std::ptrdiff_t>(c);
  }
  if (id_col < 0)
    throw FormatError(where + ":" + std::to_string(header_no) + ": no SAMPLE_ID column (available: " + available +
                      ")");
  if (tmb_col < 0)
    throw FormatError(where + ":" + std::to_string(header_no) + ": no column '" + tmb_column +
                      "' (available: " + available + ")");

  ClinicalTable t;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [no, text] = lines[li];
    const auto cells = detail::split_tabs(text);
    if (cells.size() != header.size())
      throw FormatError(where + ":" + std::to_string(no) + ": row has " + std::to_string(cells.size()) +
                        " fields, header has " + std::to_string(header.size()));
    const std::string id(detail::trim(cells[static_cast<std::size_t>(id_col)]));
    if (id.empty()) throw FormatError(where + ":" + std::to_string(no) + ": empty SAMPLE_ID");
    if (t.tmb.count(id)) throw FormatError(where + ":" + std::to_string(no) + ": duplicate sample id '" + id + "'");
    double v = 0.0;
    const auto cell = detail::trim(cells[static_cast<std::size_t>(tmb_col)]);
    if (detail::is_missing_token(cell) || !detail::parse_double(cell, v) || !std::isfinite(v) || v < 0.0) {
      ++t.warnings;
      continue;
    }
    t.tmb.emplace(id, v);
  }
  return t;
}

/// Builds the aligned predictor array (platform x sample x gene) and TMB
/// response. Genes duplicated within a platform are dropped entirely; genes and
/// samples must be present everywhere; genes with missing values are dropped
/// (or, with Impute::median, filled with the gene's median on that platform).
/// Genes and samples come out in lexicographic order.
inline MultiOmicsDataset align(const std::vector<GeneMatrix>& profiles, const ClinicalTable& clinical,
                               Impute impute = Impute::drop, std::vector<std::string> platform_names = {}) {
  if (profiles.empty()) throw AlignmentError("align needs at least one profile");
  if (platform_names.empty())
    for (std::size_t k = 0; k < profiles.size(); ++k) platform_names.push_back("platform" + std::to_string(k + 1));
  if (platform_names.size() != profiles.size()) throw AlignmentError("one platform name per profile required");

  std::string stages;
  auto note = [&](const std::string& s) { stages += (stages.empty() ? "" : "; ") + s; };

  // Genes: unique within each platform, present in all.
  std::vector<std::unordered_map<std::string, Eigen::Index>> gene_row(profiles.size());
  std::set<std::string> genes;
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    std::unordered_map<std::string, int> count;
    for (const auto& g : profiles[k].genes) ++count[g];
    std::set<std::string> unique;
    for (std::size_t i = 0; i < profiles[k].genes.size(); ++i)
      if (count[profiles[k].genes[i]] == 1) {
        unique.insert(profiles[k].genes[i]);
        gene_row[k][profiles[k].genes[i]] = static_cast<Eigen::Index>(i);
      }
    note(platform_names[k] + ": " + std::to_string(profiles[k].genes.size()) + " rows, " +
         std::to_string(unique.size()) + " unique genes");
    if (k == 0) {
      genes = std::move(unique);
    } else {
      std::set<std::string> keep;
      std::set_intersection(genes.begin(), genes.end(), unique.begin(), unique.end(),
                            std::inserter(keep, keep.end()));
      genes = std::move(keep);
    }
  }
  note(std::to_string(genes.size()) + " genes common to all platforms");

  // Samples: in every platform and with a TMB value.
  std::vector<std::unordered_map<std::string, Eigen::Index>> sample_col(profiles.size());
  std::set<std::string> samples;
  for (const auto& [id, v] : clinical.tmb) samples.insert(id);
  note(std::to_string(samples.size()) + " samples with TMB");
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    std::set<std::string> here;
    for (std::size_t s = 0; s < profiles[k].samples.size(); ++s) {
      here.insert(profiles[k].samples[s]);
      sample_col[k][profiles[k].samples[s]] = static_cast<Eigen::Index>(s);
    }
    std::set<std::string> keep;
    std::set_intersection(samples.begin(), samples.end(), here.begin(), here.end(), std::inserter(keep, keep.end()));
    samples = std::move(keep);
  }
  note(std::to_string(samples.size()) + " samples common to all platforms and clinical");
  if (samples.empty() || genes.empty()) throw AlignmentError("empty alignment (" + stages + ")");

  const std::vector<std::string> sample_list(samples.begin(), samples.end());
  std::vector<std::string> kept;
  std::vector<std::vector<std::vector<double>>> columns;  // [gene][platform][sample]
  for (const auto& gene : genes) {
    std::vector<std::vector<double>> per_platform;
    bool ok = true;
    for (std::size_t k = 0; k < profiles.size() && ok; ++k) {
      const Eigen::Index row = gene_row[k].at(gene);
      std::vector<double> vals;
      std::vector<std::size_t> holes;
      for (std::size_t s = 0; s < sample_list.size(); ++s) {
        const Eigen::Index col = sample_col[k].at(sample_list[s]);
        if (profiles[k].missing(row, col)) {
          holes.push_back(s);
          vals.push_back(0.0);
        } else {
          vals.push_back(profiles[k].values(row, col));
        }
      }
      if (!holes.empty()) {
        if (impute == Impute::drop || holes.size() == vals.size()) {
          ok = false;
          break;
        }
        std::vector<double> present;
        for (std::size_t s = 0, h = 0; s < vals.size(); ++s) {
          if (h < holes.size() && holes[h] == s) {
            ++h;
            continue;
          }
          present.push_back(vals[s]);
        }
        std::sort(present.begin(), present.end());
        const std::size_t mid = present.size() / 2;
        const double med = present.size() % 2 ? present[mid] : 0.5 * (present[mid - 1] + present[mid]);
        for (auto h : holes) vals[h] = med;
      }
      per_platform.push_back(std::move(vals));
    }
    if (!ok) continue;
    kept.push_back(gene);
    columns.push_back(std::move(per_platform));
  }
  note(std::to_string(kept.size()) + " genes without missing values" +
       (impute == Impute::median ? std::string(" after median imputation") : std::string()));
  if (kept.empty()) throw AlignmentError("empty alignment (" + stages + ")");

  MultiOmicsDataset ds{PredictorArray(profiles.size(), sample_list.size(), kept.size()),
                       ResponseBlock(Matrix(static_cast<Eigen::Index>(sample_list.size()), 1)), kept, sample_list,
                       platform_names};
  for (std::size_t j = 0; j < kept.size(); ++j)
    for (std::size_t k = 0; k < profiles.size(); ++k)
      for (std::size_t i = 0; i < sample_list.size(); ++i) ds.x(k, i, j) = columns[j][k][i];
  Matrix y(static_cast<Eigen::Index>(sample_list.size()), 1);
  for (std::size_t i = 0; i < sample_list.size(); ++i) y(static_cast<Eigen::Index>(i), 0) = clinical.tmb.at(sample_list[i]);
  ds.y = ResponseBlock(std::move(y));
  return ds;
}

struct MethodSelection {
  MeasureKind method = MeasureKind::SIS;
  ScoreTable scores;
  std::vector<std::size_t> ranking;
  std::vector<std::string> selected;
};

struct RealStudyReport {
  std::size_t subjects = 0, features = 0, platforms = 0, k = 0;
  std::vector<MethodSelection> methods;
  std::vector<std::string> intersection;
};

/// Scores every gene block against TMB for each method, keeps the top k genes
/// (default k = cutoff(n)) and intersects the selections.
inline RealStudyReport run_real_study(const MultiOmicsDataset& ds, const std::vector<MeasureKind>& methods,
                                      const MeasureOptions& opt = {}, std::size_t threads = 1,
                                      std::optional<std::size_t> k_override = std::nullopt) {
  for (auto m : methods) check_compatible(m, ds.x.platforms(), ds.y.dims());
  RealStudyReport r;
  r.subjects = ds.x.subjects();
  r.features = ds.x.features();
  r.platforms = ds.x.platforms();
  r.k = k_override ? *k_override : cutoff(r.subjects);
  std::vector<std::vector<std::string>> sets;
  for (auto m : methods) {
    MethodSelection sel;
    sel.method = m;
    sel.scores = score_all(ds.x, ds.y, m, opt, threads);
    sel.ranking = rank_features(sel.scores);
    sel.selected = top_k(sel.scores, r.k, ds.genes);
    sets.push_back(sel.selected);
    r.methods.push_back(std::move(sel));
  }
  r.intersection = intersect_selections(sets);
  return r;
}

/// selection_<method>.csv (gene, utility, rank for the top k), intersection.csv
/// and real_study.json.
inline void emit_real_study(const RealStudyReport& r, const MultiOmicsDataset& ds, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  Json methods = Json::array();
  for (const auto& m : r.methods) {
    std::string csv = "gene,utility,rank\n";
    for (std::size_t pos = 0; pos < std::min(r.k, m.ranking.size()); ++pos) {
      const std::size_t j = m.ranking[pos];
      csv += ds.genes[j] + "," + format_number(m.scores.utilities[j]) + "," + std::to_string(pos + 1) + "\n";
    }
    detail::write_text(dir / ("selection_" + to_string(m.method) + ".csv"), csv);
    methods.push_back(Json{{"method", to_string(m.method)}, {"selected", m.selected}});
  }
  std::string inter = "gene\n";
  for (const auto& g : r.intersection) inter += g + "\n";
  detail::write_text(dir / "intersection.csv", inter);
  const Json j{{"subjects", r.subjects},     {"genes", r.features},   {"platforms", ds.platforms},
               {"k", r.k},                   {"methods", methods},    {"intersection", r.intersection}};
  detail::write_text(dir / "real_study.json", j.dump(2) + "\n");
}

}  // namespace wdscreen
