#include <gtest/gtest.h>

#include <cmath>

#include "wdscreen/core_data.hpp"

using namespace wdscreen;

TEST(PredictorArray, RejectsEmptyExtents) {
  EXPECT_THROW(PredictorArray(0, 3, 3), ArgumentError);
  EXPECT_THROW(PredictorArray(1, 0, 3), ArgumentError);
  EXPECT_THROW(PredictorArray(1, 3, 0), ArgumentError);
}

TEST(PredictorArray, RejectsNonFiniteValues) {
  EXPECT_THROW(PredictorArray(1, 1, 2, {1.0, NAN}), ArgumentError);
  EXPECT_THROW(PredictorArray(1, 1, 2, {1.0, INFINITY}), ArgumentError);
  EXPECT_THROW(PredictorArray(1, 1, 2, {1.0}), ArgumentError);
}

TEST(PredictorArray, PlatformRoundTrip) {
  PredictorArray x(2, 3, 4);
  Matrix m = Matrix::Random(3, 4);
  x.set_platform(1, m);
  EXPECT_EQ(x.platform(1), m);
  EXPECT_TRUE(x.platform(0).isZero());
  EXPECT_THROW(x.platform(2), IndexError);
  EXPECT_THROW(x.set_platform(0, Matrix::Zero(2, 4)), ArgumentError);
}

TEST(FeatureBlock, SinglePlatformIsColumn) {
  PredictorArray x(1, 3, 2, {1, 2, 3, 4, 5, 6});
  const Matrix b = feature_block(x, 0);
  ASSERT_EQ(b.rows(), 3);
  ASSERT_EQ(b.cols(), 1);
  EXPECT_EQ(b(0, 0), 1);
  EXPECT_EQ(b(1, 0), 3);
  EXPECT_EQ(b(2, 0), 5);
}

TEST(FeatureBlock, RowsCollectPlatforms) {
  // Feature 1 holds value k + 1 on platform k for both subjects.
  PredictorArray x(3, 2, 2);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 2; ++i) x(k, i, 1) = static_cast<double>(k + 1);
  const Matrix b = feature_block(x, 1);
  ASSERT_EQ(b.rows(), 2);
  ASSERT_EQ(b.cols(), 3);
  for (Eigen::Index i = 0; i < 2; ++i) EXPECT_EQ(b.row(i), Eigen::RowVector3d(1, 2, 3));
  EXPECT_THROW(feature_block(x, 2), IndexError);
}

TEST(Standardize, UnitSampleSd) {
  Matrix m(3, 1);
  m << 1, 2, 3;
  const Matrix s = standardize(m);
  // mean 2, sd with n - 1 = 1
  EXPECT_NEAR(s(0, 0), -1.0, 1e-15);
  EXPECT_NEAR(s(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(s(2, 0), 1.0, 1e-15);
}

TEST(Standardize, ConstantColumnIsZero) {
  Matrix m = Matrix::Constant(3, 2, 5.0);
  m.col(1) << 1, 2, 4;
  const Matrix s = standardize(m);
  EXPECT_TRUE(s.col(0).isZero());
  EXPECT_FALSE(s.col(1).isZero());
}

TEST(Standardize, Idempotent) {
  const Matrix m = Matrix::Random(20, 3);
  const Matrix once = standardize(m);
  EXPECT_LE((standardize(once) - once).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ResponseBlock, Validates) {
  EXPECT_THROW(ResponseBlock(Matrix(0, 1)), ArgumentError);
  Matrix bad(2, 1);
  bad << 1, NAN;
  EXPECT_THROW(ResponseBlock{bad}, ArgumentError);
}

TEST(SimConfig, StudyDefaults) {
  const auto s1 = SimConfig::for_study(Study::S1);
  EXPECT_EQ(s1.n, 200u);
  EXPECT_EQ(s1.p, 2000u);
  EXPECT_EQ(s1.beta_low, 2.0);
  EXPECT_EQ(s1.beta_high, 5.0);
  const auto s3 = SimConfig::for_study(Study::S3);
  EXPECT_EQ(s3.d, 3u);
  EXPECT_EQ(s3.q, 10u);
  EXPECT_NO_THROW(s3.validate());
}

TEST(SimConfig, ValidateRejectsBadParameters) {
  auto c = SimConfig::for_study(Study::S1);
  c.ar_coefficient = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimConfig::for_study(Study::S1);
  c.p = 12;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimConfig::for_study(Study::S3);
  c.p = 101;
  EXPECT_THROW(c.validate(), ConfigError);
  c = SimConfig::for_study(Study::S2);
  c.beta_low = 3.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Study, ParseRoundTrip) {
  for (auto s : {Study::S1, Study::S2, Study::S3, Study::S4}) EXPECT_EQ(parse_study(to_string(s)), s);
  EXPECT_THROW(parse_study("S5"), ConfigError);
}
