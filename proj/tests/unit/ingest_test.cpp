#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wdscreen/ingest.hpp"

using namespace wdscreen;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = WDSCREEN_FIXTURES;

fs::path fixture(const char* name) { return kFixtures / name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("wdscreen_ingest_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ParseProfile, BasicWithMissingCell) {
  const auto g = parse_profile(fixture("profile_basic.txt"));
  EXPECT_EQ(g.genes, (std::vector<std::string>{"TP53", "EGFR", "KRAS"}));
  EXPECT_EQ(g.samples, (std::vector<std::string>{"S1", "S2"}));
  ASSERT_EQ(g.values.rows(), 3);
  ASSERT_EQ(g.values.cols(), 2);
  EXPECT_EQ(g.missing_count(), 1u);
  EXPECT_TRUE(g.missing(1, 0));
  EXPECT_EQ(g.values(0, 1), -0.25);
}

TEST(ParseProfile, CommentLinesAreSkipped) {
  const auto a = parse_profile(fixture("profile_basic.txt"));
  const auto b = parse_profile(fixture("profile_comments.txt"));
  EXPECT_EQ(a.genes, b.genes);
  EXPECT_EQ(a.samples, b.samples);
  ASSERT_EQ(a.missing.rows(), b.missing.rows());
  ASSERT_EQ(a.missing.cols(), b.missing.cols());
  EXPECT_TRUE((a.missing == b.missing).all());
  EXPECT_EQ(a.values.cwiseEqual(b.values).count() + a.missing_count(), a.values.size());
}

TEST(ParseProfile, FormatErrors) {
  EXPECT_THROW(parse_profile(fixture("profile_dup_samples.txt")), FormatError);
  EXPECT_NE(error_of([] { parse_profile(fixture("profile_ragged.txt")); }).find(":3:"), std::string::npos);
  const auto msg = error_of([] { parse_profile(fixture("profile_no_hugo.txt")); });
  EXPECT_NE(msg.find("Hugo_Symbol"), std::string::npos);
  EXPECT_NE(msg.find(":2:"), std::string::npos);
  EXPECT_THROW(parse_profile(fixture("profile_bad_value.txt")), FormatError);
  EXPECT_THROW(parse_profile(fixture("does_not_exist.txt")), IoError);
}

TEST(ParseProfile, CnaCodesEmptyCellsAndUnnamedRows) {
  const auto g = parse_profile(fixture("profile_cna_codes.txt"));
  EXPECT_EQ(g.genes, (std::vector<std::string>{"TP53", "EGFR", "KRAS"}));
  EXPECT_EQ(g.unnamed_rows, 1u);
  EXPECT_TRUE(g.missing(0, 1));
  EXPECT_EQ(g.values(0, 0), -2.0);
  EXPECT_EQ(g.values(2, 1), 2.0);
}

TEST(ParseProfile, RoundTripIsExact) {
  const fs::path dir = scratch("roundtrip");
  for (const char* name : {"profile_basic.txt", "profile_cna_codes.txt", "planted_mrna.txt"}) {
    const auto g = parse_profile(fixture(name));
    write_profile(g, dir / "a.txt");
    const auto back = parse_profile(dir / "a.txt");
    EXPECT_EQ(back.genes, g.genes);
    EXPECT_EQ(back.samples, g.samples);
    ASSERT_EQ(back.missing.rows(), g.missing.rows());
    ASSERT_EQ(back.missing.cols(), g.missing.cols());
    EXPECT_TRUE((back.missing == g.missing).all());
    for (Eigen::Index i = 0; i < g.values.rows(); ++i)
      for (Eigen::Index s = 0; s < g.values.cols(); ++s)
        if (!g.missing(i, s)) EXPECT_EQ(back.values(i, s), g.values(i, s));
    write_profile(back, dir / "b.txt");
    EXPECT_EQ(slurp(dir / "a.txt"), slurp(dir / "b.txt"));
  }
}

TEST(ParseClinical, Basic) {
  const auto t = parse_clinical(fixture("clinical_basic.txt"));
  EXPECT_EQ(t.tmb.size(), 2u);
  EXPECT_EQ(t.tmb.at("S1"), 3.5);
  EXPECT_EQ(t.warnings, 0u);
}

TEST(ParseClinical, MissingValueIsWarning) {
  const auto t = parse_clinical(fixture("clinical_na.txt"));
  EXPECT_EQ(t.tmb.size(), 1u);
  EXPECT_EQ(t.warnings, 1u);
}

TEST(ParseClinical, MetadataHeaderSkipped) {
  const auto a = parse_clinical(fixture("clinical_basic.txt"));
  const auto b = parse_clinical(fixture("clinical_meta.txt"));
  EXPECT_EQ(a.tmb, b.tmb);
  EXPECT_EQ(a.warnings, b.warnings);
}

TEST(ParseClinical, MissingColumnListsAvailable) {
  const auto msg = error_of([] { parse_clinical(fixture("clinical_no_tmb.txt")); });
  EXPECT_NE(msg.find("TMB_NONSYNONYMOUS"), std::string::npos);
  EXPECT_NE(msg.find("PATIENT_ID, SAMPLE_ID, AGE"), std::string::npos);
  EXPECT_EQ(parse_clinical(fixture("clinical_no_tmb.txt"), "AGE").tmb.at("S2"), 70.0);
}

TEST(Align, IntersectsGenes) {
  const auto a = parse_profile(fixture("profile_basic.txt"));
  const auto b = parse_profile(fixture("profile_second.txt"));
  const auto ds = align({a, b}, parse_clinical(fixture("clinical_basic.txt")));
  // EGFR is not on the second platform; KRAS and TP53 are complete.
  EXPECT_EQ(ds.genes, (std::vector<std::string>{"KRAS", "TP53"}));
  EXPECT_EQ(ds.x.platforms(), 2u);
  EXPECT_EQ(ds.x.features(), 2u);
  EXPECT_EQ(ds.x(1, 0, 1), -1.0);
  EXPECT_EQ(ds.y.values()(1, 0), 0.7);
}

TEST(Align, DuplicatedSymbolDropped) {
  const auto g = parse_profile(fixture("profile_dup_gene.txt"));
  ClinicalTable c;
  c.tmb = {{"S1", 1.0}, {"S2", 2.0}, {"S3", 3.0}};
  const auto ds = align({g}, c);
  EXPECT_EQ(ds.genes, (std::vector<std::string>{"KRAS", "MYC"}));
}

TEST(Align, MissingValuesDroppedOrImputed) {
  const auto g = parse_profile(fixture("profile_cna_codes.txt"));
  ClinicalTable c;
  c.tmb = {{"S1", 1.0}, {"S2", 2.0}, {"S3", 3.0}};
  EXPECT_EQ(align({g}, c).genes, (std::vector<std::string>{"EGFR", "KRAS"}));
  const auto imp = align({g}, c, Impute::median);
  EXPECT_EQ(imp.genes, (std::vector<std::string>{"EGFR", "KRAS", "TP53"}));
  // TP53 holds -2, NA, 1: median of the observed pair is -0.5.
  EXPECT_EQ(imp.x(0, 1, 2), -0.5);
}

TEST(Align, SortsSamplesAndIsIdempotent) {
  const auto cna = parse_profile(fixture("planted_cna.txt"));
  const auto mrna = parse_profile(fixture("planted_mrna.txt"));
  const auto clin = parse_clinical(fixture("planted_clinical.txt"));
  EXPECT_EQ(clin.warnings, 1u);
  const auto ds = align({cna, mrna}, clin, Impute::drop, {"cna", "mrna"});
  EXPECT_TRUE(std::is_sorted(ds.samples.begin(), ds.samples.end()));
  EXPECT_TRUE(std::is_sorted(ds.genes.begin(), ds.genes.end()));
  EXPECT_EQ(ds.samples.size(), 40u);
  EXPECT_EQ(ds.genes.size(), 17u);
  EXPECT_EQ(std::count(ds.genes.begin(), ds.genes.end(), "G03"), 0);
  EXPECT_EQ(std::count(ds.genes.begin(), ds.genes.end(), "G05"), 0);

  // Re-aligning the aligned data changes nothing.
  std::vector<GeneMatrix> again;
  for (std::size_t k = 0; k < 2; ++k) {
    GeneMatrix g;
    g.genes = ds.genes;
    g.samples = ds.samples;
    g.values = ds.x.platform(k).transpose();
    g.missing.setConstant(g.values.rows(), g.values.cols(), false);
    again.push_back(g);
  }
  const auto ds2 = align(again, clin, Impute::drop, {"cna", "mrna"});
  EXPECT_EQ(ds2.genes, ds.genes);
  EXPECT_EQ(ds2.samples, ds.samples);
  EXPECT_EQ(ds2.x, ds.x);
  EXPECT_EQ(ds2.y.values(), ds.y.values());
}

TEST(Align, EmptyIntersectionReportsStages) {
  const auto g = parse_profile(fixture("profile_basic.txt"));
  ClinicalTable c;
  c.tmb = {{"OTHER", 1.0}};
  const auto msg = error_of([&] { align({g}, c); });
  EXPECT_NE(msg.find("0 samples common"), std::string::npos);
  EXPECT_THROW(align({}, c), AlignmentError);
}

TEST(RealStudy, PlantedGeneRanksFirst) {
  const auto ds = align({parse_profile(fixture("planted_cna.txt")), parse_profile(fixture("planted_mrna.txt"))},
                        parse_clinical(fixture("planted_clinical.txt")));
  const std::vector<MeasureKind> m = {MeasureKind::DC_SIS, MeasureKind::PC_Screen, MeasureKind::WD_Screen};
  const auto r = run_real_study(ds, m);
  EXPECT_EQ(r.k, cutoff(40));
  for (const auto& sel : r.methods) {
    EXPECT_EQ(ds.genes[sel.ranking.front()], "PLANTED") << to_string(sel.method);
    EXPECT_EQ(sel.selected.size(), r.k);
  }
  EXPECT_NE(std::find(r.intersection.begin(), r.intersection.end(), "PLANTED"), r.intersection.end());
  EXPECT_THROW(run_real_study(ds, {MeasureKind::SIS}), ConfigError);
}

TEST(RealStudy, SingleMethodIntersectionIsItsTopK) {
  const auto ds = align({parse_profile(fixture("planted_mrna.txt"))}, parse_clinical(fixture("planted_clinical.txt")));
  const auto r = run_real_study(ds, {MeasureKind::SIS}, {}, 1, 5);
  auto top = r.methods[0].selected;
  std::sort(top.begin(), top.end());
  EXPECT_EQ(r.intersection, top);
}

TEST(RealStudy, EmittedFiles) {
  const auto ds = align({parse_profile(fixture("planted_cna.txt")), parse_profile(fixture("planted_mrna.txt"))},
                        parse_clinical(fixture("planted_clinical.txt")));
  const auto r = run_real_study(ds, {MeasureKind::DC_SIS, MeasureKind::BCor_SIS}, {}, 1, 3);
  const fs::path dir = scratch("emit");
  emit_real_study(r, ds, dir);
  const auto sel = slurp(dir / "selection_DC-SIS.csv");
  EXPECT_EQ(sel.rfind("gene,utility,rank\nPLANTED,", 0), 0u);
  EXPECT_EQ(std::count(sel.begin(), sel.end(), '\n'), 4);
  EXPECT_NE(slurp(dir / "intersection.csv").find("PLANTED"), std::string::npos);
  const auto j = Json::parse(slurp(dir / "real_study.json"));
  EXPECT_EQ(j.at("k").get<std::size_t>(), 3u);
  EXPECT_EQ(j.at("platforms").size(), 2u);
}
