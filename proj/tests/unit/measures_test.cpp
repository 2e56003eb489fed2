#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wdscreen/fast_math.hpp"
#include "wdscreen/measures.hpp"
#include "wdscreen/oracles.hpp"
#include "wdscreen/selftest.hpp"

using namespace wdscreen;

namespace {

Matrix gaussian(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  Matrix m(n, d);
  for (auto& v : m.reshaped()) v = z(rng);
  return m;
}

std::vector<double> vec(std::initializer_list<double> v) { return v; }

}  // namespace

TEST(Pearson, Examples) {
  const auto x = vec({1, 2, 3, 4});
  EXPECT_NEAR(pearson_utility(x, vec({3, 5, 7, 9})), 1.0, 1e-15);
  EXPECT_NEAR(pearson_utility(vec({1, 2, 3}), vec({1, 3, 2})), 0.5, 1e-15);
  EXPECT_EQ(pearson_utility(x, vec({2, 2, 2, 2})), 0.0);
  EXPECT_THROW(pearson_utility(x, vec({1, 2})), ArgumentError);
}

TEST(Sirs, Examples) {
  EXPECT_NEAR(sirs_utility(vec({1, 2, 3}), vec({10, 30, 20})), 0.5, 1e-15);
  EXPECT_EQ(sirs_utility(vec({1, 2, 3}), vec({4, 4, 4})), 0.0);
}

TEST(Sirs, RankInvariantInResponse) {
  std::mt19937_64 rng(1);
  const Matrix x = gaussian(30, 1, rng);
  std::vector<double> xv(x.data(), x.data() + 30), y(30), ey(30);
  for (int i = 0; i < 30; ++i) {
    y[i] = xv[i] + 0.3 * x(29 - i, 0);
    ey[i] = std::exp(y[i]);
  }
  const double a = sirs_utility(xv, y);
  EXPECT_EQ(a, sirs_utility(xv, ey));
  const auto r = mid_ranks(y);
  std::vector<double> scaled(r.begin(), r.end());
  for (auto& v : scaled) v /= 30.0;
  EXPECT_NEAR(a, pearson_utility(xv, scaled), 1e-14);
}

TEST(Kendall, Examples) {
  const auto x = vec({-1.5, 0.2, 0.3, 2.0, 4.0});
  std::vector<double> cube;
  for (double v : x) cube.push_back(v * v * v);
  EXPECT_NEAR(kendall_utility(x, cube), 1.0, 1e-15);
  EXPECT_NEAR(kendall_utility(vec({1, 2, 3}), vec({3, 1, 2})), 1.0 / 3, 1e-15);
  EXPECT_EQ(kendall_utility(vec({5, 5, 5}), vec({1, 2, 3})), 0.0);
}

TEST(Dcor, Examples) {
  std::mt19937_64 rng(2);
  const Matrix x = gaussian(12, 2, rng);
  EXPECT_NEAR(dcor_utility(x, x), 1.0, 1e-12);
  EXPECT_EQ(dcor_utility(Matrix::Constant(12, 1, 3.0), x), 0.0);
  const Matrix a = gaussian(5, 1, rng), b = gaussian(5, 1, rng);
  EXPECT_NEAR(dcor_utility(a, b), oracle::dcor(a, b), 1e-12);
}

TEST(DcRosis, Examples) {
  std::mt19937_64 rng(3);
  const Matrix x = gaussian(5, 1, rng), y = gaussian(5, 1, rng);
  const auto xv = detail::column(x), yv = detail::column(y);
  EXPECT_NEAR(dc_rosis_utility(xv, yv), oracle::dcor(x, oracle::to_matrix(oracle::scaled_mid_ranks(yv))), 1e-12);
  std::vector<double> ty;
  for (double v : yv) ty.push_back(std::atan(v) * 7 + 1);
  EXPECT_EQ(dc_rosis_utility(xv, yv), dc_rosis_utility(xv, ty));
  EXPECT_NEAR(dc_rosis_utility(xv, xv), dcor_utility(x, oracle::to_matrix(oracle::scaled_mid_ranks(xv))), 1e-14);
}

TEST(Mrdc, Examples) {
  std::mt19937_64 rng(4);
  const Matrix x = gaussian(6, 1, rng), y = gaussian(6, 1, rng);
  EXPECT_NEAR(mrdc_utility(x, y), oracle::dcor(oracle::ranks_by_enumeration(x), oracle::ranks_by_enumeration(y)),
              1e-12);
  const Matrix tx = x.array().exp(), ty = y.array().cube();
  EXPECT_EQ(mrdc_utility(x, y), mrdc_utility(tx, ty));
  const Matrix b = gaussian(10, 2, rng);
  EXPECT_NEAR(mrdc_utility(b, b), 1.0, 1e-12);
}

TEST(Sc, Examples) {
  std::mt19937_64 rng(5);
  const Matrix x = gaussian(15, 2, rng), y = gaussian(15, 1, rng);
  EXPECT_NEAR(sc_utility(x, y, ScTransform::identity), dcor_utility(x, y), 1e-12);
  EXPECT_NEAR(sc_utility(x, x), 1.0, 1e-12);
  const Matrix a = gaussian(5, 1, rng), b = gaussian(5, 1, rng);
  EXPECT_NEAR(sc_utility(a, b), oracle::dcor(a, b, oracle::Transform::one_minus_exp_median), 1e-12);
  EXPECT_NEAR(sc_utility(a, b, ScTransform::one_minus_exp), oracle::dcor(a, b, oracle::Transform::one_minus_exp),
              1e-12);
}

TEST(Sc, MedianScalingRemovesUnits) {
  std::mt19937_64 rng(23);
  const Matrix x = gaussian(30, 2, rng);
  Matrix y = gaussian(30, 1, rng);
  y.col(0) += x.col(0);
  EXPECT_NEAR(sc_utility(x * 7.0, y * 0.01), sc_utility(x, y), 1e-12);
  EXPECT_GT(std::abs(sc_utility(x * 7.0, y * 0.01, ScTransform::one_minus_exp) -
                     sc_utility(x, y, ScTransform::one_minus_exp)),
            1e-3);
}

TEST(Pc, Examples) {
  std::mt19937_64 rng(6);
  const Matrix x = gaussian(12, 2, rng);
  EXPECT_NEAR(pc_utility(x, x), 1.0, 1e-12);
  const Matrix y = gaussian(12, 2, rng);
  const double t = 0.7;
  Matrix rot(2, 2);
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  EXPECT_NEAR(pc_utility(x, y * rot.transpose()), pc_utility(x, y), 1e-12);
  const Matrix a = gaussian(5, 1, rng), b = gaussian(5, 1, rng);
  EXPECT_NEAR(pc_utility(a, b), oracle::projection_correlation(a, b), 1e-12);
}

TEST(Pc, UnivariateFastPathMatchesGeneralPath) {
  // The 1-D shortcut counts quadrants; a duplicated column routes the same
  // data through the angle kernel.
  std::mt19937_64 rng(16);
  const Matrix x = gaussian(25, 1, rng), y = gaussian(25, 1, rng);
  Matrix x2(25, 2);
  x2 << x, x;
  // arccos is ill-conditioned at the collinear angles this creates.
  EXPECT_NEAR(pc_utility(x, y), pc_utility(x2, y), 1e-9);
}

TEST(Bcor, Examples) {
  std::mt19937_64 rng(7);
  const Matrix x = gaussian(10, 2, rng);
  EXPECT_NEAR(bcor_utility(x, x), 1.0, 1e-12);
  EXPECT_EQ(bcor_utility(Matrix::Constant(10, 1, 1.0), x), 0.0);
  const Matrix a = gaussian(5, 1, rng), b = gaussian(5, 2, rng);
  EXPECT_NEAR(bcor_utility(a, b), oracle::ball_correlation(a, b), 1e-12);
}

TEST(Wd, ConstantPredictorIsZero) {
  std::mt19937_64 rng(8);
  EXPECT_EQ(wd_utility(Matrix::Constant(8, 1, 2.0), gaussian(8, 1, rng)), 0.0);
}

TEST(Wd, TwoPointHandOptimum) {
  // Standardized x = y = (-1/sqrt2, 1/sqrt2). Half of each joint atom stays,
  // the other quarter-masses move a squared distance of 2.
  Matrix x(2, 1);
  x << 0, 1;
  MeasureOptions opt;
  opt.wd_solver = WdSolver::exact;
  EXPECT_NEAR(wd_utility(x, x, opt), 1.0, 1e-12);
  EXPECT_NEAR(detail::wd_reference(x, x), 1.0, 1e-12);
}

TEST(Wd, DependenceBeatsPermutation) {
  int wins = 0;
  for (int s = 0; s < 40; ++s) {
    std::mt19937_64 rng(100 + s);
    const Matrix x = gaussian(50, 1, rng);
    std::vector<Eigen::Index> perm(50);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix px(50, 1);
    for (Eigen::Index i = 0; i < 50; ++i) px(i, 0) = x(perm[static_cast<std::size_t>(i)], 0);
    wins += wd_utility(x, x) > wd_utility(x, px) ? 1 : 0;
  }
  EXPECT_GE(wins, 38);
}

TEST(Wd, SinkhornTracksExact) {
  std::mt19937_64 rng(9);
  const Matrix x = gaussian(20, 2, rng);
  Matrix y = x.col(0).array().square().matrix() + 0.5 * gaussian(20, 1, rng);
  MeasureOptions exact, sk;
  exact.wd_solver = WdSolver::exact;
  sk.wd_solver = WdSolver::sinkhorn;
  sk.wd_epsilon_factor = 0.01;
  const double e = wd_utility(x, y, exact);
  EXPECT_NEAR(wd_utility(x, y, sk), e, 0.05 * e);
}

TEST(Wd, RankPreprocessIsMonotoneInvariant) {
  std::mt19937_64 rng(10);
  const Matrix x = gaussian(15, 1, rng), y = gaussian(15, 1, rng);
  MeasureOptions opt;
  opt.wd_preprocess = WdPreprocess::rank;
  EXPECT_EQ(wd_utility(x, y, opt), wd_utility(x.array().exp().matrix(), y, opt));
}

TEST(Utility, DispatchAndCompatibility) {
  std::mt19937_64 rng(11);
  const Matrix x = gaussian(10, 2, rng), y = gaussian(10, 1, rng);
  EXPECT_THROW(utility(MeasureKind::SIS, x, y), ConfigError);
  EXPECT_THROW(utility(MeasureKind::DC_SIS, x, gaussian(9, 1, rng)), ArgumentError);
  EXPECT_EQ(utility(MeasureKind::DC_SIS, x, y), dcor_utility(x, y));
  EXPECT_EQ(utility(MeasureKind::PC_Screen, x, y), pc_utility(x, y));
  for (auto k : kAllMeasures) EXPECT_EQ(parse_measure(to_string(k)), k);
  EXPECT_EQ(parse_measure("wd_screen"), MeasureKind::WD_Screen);
  EXPECT_THROW(parse_measure("XYZ"), ConfigError);
}

TEST(ScoreAll, SelfDependenceDominates) {
  std::mt19937_64 rng(12);
  const Matrix y = gaussian(30, 1, rng);
  PredictorArray x(1, 30, 3);
  Matrix m = gaussian(30, 3, rng);
  m.col(1) = y;
  x.set_platform(0, m);
  for (auto k : kAllMeasures) {
    const auto t = score_all(x, ResponseBlock(y), k);
    EXPECT_GT(t.utilities[1], t.utilities[0]) << to_string(k);
    EXPECT_GT(t.utilities[1], t.utilities[2]) << to_string(k);
  }
}

TEST(ScoreAll, ConstantFeaturesScoreZero) {
  std::mt19937_64 rng(13);
  const Matrix y = gaussian(20, 1, rng);
  PredictorArray x(1, 20, 2);
  Matrix m = gaussian(20, 2, rng);
  m.col(0).setConstant(4.0);
  x.set_platform(0, m);
  for (auto k : kAllMeasures) EXPECT_EQ(score_all(x, ResponseBlock(y), k).utilities[0], 0.0) << to_string(k);
}

TEST(ScoreAll, ThreadCountDoesNotChangeScores) {
  std::mt19937_64 rng(14);
  PredictorArray x(2, 25, 9);
  x.set_platform(0, gaussian(25, 9, rng));
  x.set_platform(1, gaussian(25, 9, rng));
  const ResponseBlock y(gaussian(25, 2, rng));
  for (auto k : {MeasureKind::DC_SIS, MeasureKind::PC_Screen, MeasureKind::WD_Screen, MeasureKind::BCor_SIS})
    EXPECT_EQ(score_all(x, y, k, {}, 1).utilities, score_all(x, y, k, {}, 4).utilities);
  EXPECT_THROW(score_all(x, ResponseBlock(gaussian(24, 1, rng)), MeasureKind::DC_SIS), ArgumentError);
  EXPECT_THROW(score_all(x, y, MeasureKind::SIRS), ConfigError);
}

TEST(OracleSuite, SmallRun) {
  for (const auto& c : run_oracle_suite(15, 50)) EXPECT_LE(c.max_error, 1e-9) << c.name;
}

TEST(FastAcos, MatchesStd) {
  double worst = 0;
  for (int i = 0; i <= 200000; ++i) {
    const double v = -1.0 + 2.0 * i / 200000.0;
    worst = std::max(worst, std::abs(detail::fast_acos(v) - std::acos(v)));
  }
  EXPECT_LE(worst, 1e-15);
  std::vector<double> buf = {-1.5, -1.0, 0.0, 1.0, 1.5};
  detail::acos_inplace(buf.data(), static_cast<Eigen::Index>(buf.size()));
  EXPECT_DOUBLE_EQ(buf[0], std::acos(-1.0));
  EXPECT_DOUBLE_EQ(buf[2], std::acos(0.0));
  EXPECT_EQ(buf[3], 0.0);
  EXPECT_EQ(buf[4], 0.0);
}
