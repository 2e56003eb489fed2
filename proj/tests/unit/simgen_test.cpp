#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "wdscreen/ranks.hpp"
#include "wdscreen/simgen.hpp"

using namespace wdscreen;

namespace {

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

double corr(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd ca = a.array() - a.mean(), cb = b.array() - b.mean();
  return (ca * cb).sum() / std::sqrt(ca.square().sum() * cb.square().sum());
}

Eigen::VectorXd ranked(const Eigen::VectorXd& v) {
  const auto r = mid_ranks(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
  return Eigen::Map<const Eigen::VectorXd>(r.data(), v.size());
}

}  // namespace

TEST(Samplers, PowerMoments) {
  auto rng = make_stream(1, 0, Role::features);
  const auto v = sample_power(5.0, 100000, rng);
  EXPECT_NEAR(mean(v), 5.0 / 6.0, 0.01);
  EXPECT_NEAR(median(v), std::pow(0.5, 0.2), 0.01);
  EXPECT_THROW(sample_power(0.0, 1, rng), ArgumentError);
}

TEST(Samplers, PowerOneIsUniform) {
  auto rng = make_stream(2, 0, Role::features);
  auto v = sample_power(1.0, 20000, rng);
  std::sort(v.begin(), v.end());
  double ks = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    ks = std::max(ks, std::abs(v[i] - static_cast<double>(i + 1) / static_cast<double>(v.size())));
  EXPECT_LT(ks, 0.015);
}

TEST(Samplers, ParetoMomentsAndSupport) {
  auto rng = make_stream(3, 0, Role::features);
  const auto v = sample_pareto(10.0, 1.0, 100000, rng);
  EXPECT_NEAR(mean(v), 10.0 / 9.0, 0.01);
  EXPECT_NEAR(median(v), std::pow(2.0, 0.1), 0.01);
  EXPECT_GE(*std::min_element(v.begin(), v.end()), 1.0);
  EXPECT_THROW(sample_pareto(1.0, 1.0, 1, rng), ArgumentError);
}

TEST(Ar1, Correlations) {
  auto rng = make_stream(4, 0, Role::features);
  const Matrix m = gen_ar1_gaussian(10000, 4, 0.5, rng);
  EXPECT_NEAR(corr(m.col(0), m.col(1)), 0.5, 0.03);
  EXPECT_NEAR(corr(m.col(0), m.col(2)), 0.25, 0.03);
  for (Eigen::Index c = 0; c < 4; ++c) {
    const double var = (m.col(c).array() - m.col(c).mean()).square().mean();
    EXPECT_NEAR(var, 1.0, 0.05);
  }
  EXPECT_THROW(gen_ar1_gaussian(2, 2, 1.0, rng), ArgumentError);
}

TEST(Copula, PowerMarginalAndMonotoneDependence) {
  auto rng = make_stream(5, 0, Role::features);
  const Matrix m = gen_copula_platform(10000, 5, 0.5, Marginal::power(5.0), rng);
  std::vector<double> c(m.col(0).data(), m.col(0).data() + m.rows());
  std::sort(c.begin(), c.end());
  double ks = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    ks = std::max(ks, std::abs(std::pow(c[i], 5.0) - static_cast<double>(i + 1) / static_cast<double>(c.size())));
  EXPECT_LT(ks, 0.02);
  EXPECT_GT(corr(ranked(m.col(0)), ranked(m.col(1))), corr(ranked(m.col(0)), ranked(m.col(4))));
}

TEST(Copula, ParetoSupport) {
  auto rng = make_stream(6, 0, Role::features);
  const Matrix m = gen_copula_platform(2000, 3, 0.5, Marginal::pareto(10.0, 1.0), rng);
  EXPECT_GE(m.minCoeff(), 1.0);
}

TEST(Streams, IndependentOfCreationOrder) {
  auto a = make_stream(7, 3, Role::noise, 1);
  auto b = make_stream(7, 3, Role::betas);
  auto a2 = make_stream(7, 3, Role::noise, 1);
  EXPECT_EQ(a(), a2());
  EXPECT_NE(make_stream(7, 3, Role::noise, 1)(), make_stream(7, 3, Role::noise, 2)());
  EXPECT_NE(make_stream(7, 3, Role::noise)(), make_stream(7, 4, Role::noise)());
  (void)b;
}

TEST(GenStudy, Study1Shape) {
  auto cfg = SimConfig::for_study(Study::S1);
  const auto inst = gen_study(cfg, 0);
  EXPECT_EQ(inst.x.platforms(), 1u);
  EXPECT_EQ(inst.x.subjects(), 200u);
  EXPECT_EQ(inst.x.features(), 2000u);
  EXPECT_EQ(inst.y.subjects(), 200u);
  EXPECT_EQ(inst.y.dims(), 1u);
  EXPECT_EQ(inst.truth.features(), (std::vector<std::size_t>{0, 1, 11, 12}));
  for (double b : inst.betas) {
    EXPECT_GE(b, 2.0);
    EXPECT_LE(b, 5.0);
  }
}

TEST(GenStudy, Study3Shape) {
  auto cfg = SimConfig::for_study(Study::S3);
  const auto inst = gen_study(cfg, 0);
  EXPECT_EQ(inst.x.platforms(), 3u);
  EXPECT_EQ(inst.x.features(), 2000u);
  EXPECT_EQ(inst.y.dims(), 10u);
  EXPECT_EQ(inst.truth.features(), (std::vector<std::size_t>{1, 2, 100, 101}));
  for (const auto& e : inst.truth.entries) {
    ASSERT_EQ(e.platforms.size(), 3u);
    for (auto k : e.platforms) EXPECT_LT(k, 3u);
  }
  EXPECT_EQ(inst.betas.size(), 12u);
  // Platform 0 is Pareto (>= mode), the others live in (0, 1).
  EXPECT_GE(inst.x.platform(0).minCoeff(), 1.0);
  EXPECT_LT(inst.x.platform(1).maxCoeff(), 1.0);
}

TEST(GenStudy, NoiselessResponseIsLinearCombination) {
  auto cfg = SimConfig::for_study(Study::S1);
  cfg.n = 30;
  cfg.p = 20;
  cfg.noise_sd = 0.0;
  const auto inst = gen_study(cfg, 2);
  const std::vector<std::size_t> active = {0, 1, 11, 12};
  for (std::size_t i = 0; i < 30; ++i) {
    double v = 0;
    for (std::size_t t = 0; t < 4; ++t) v += inst.betas[t] * inst.x(0, i, active[t]);
    EXPECT_NEAR(inst.y.values()(static_cast<Eigen::Index>(i), 0), v, 1e-12);
  }
}

TEST(GenStudy, Study4NoiselessInteraction) {
  auto cfg = SimConfig::for_study(Study::S4);
  cfg.n = 20;
  cfg.p = 110;
  cfg.noise_sd = 0.0;
  const auto inst = gen_study(cfg, 1);
  ASSERT_EQ(inst.betas.size(), 6u);
  const auto& e = inst.truth.entries;
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 20; ++i) {
      const double v = inst.betas[2 * k] * inst.x(e[0].platforms[k], i, 1) * inst.x(e[1].platforms[k], i, 2) +
                       inst.betas[2 * k + 1] * inst.x(e[2].platforms[k], i, 100) * inst.x(e[3].platforms[k], i, 101);
      EXPECT_NEAR(inst.y.values()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)), v, 1e-12);
    }
}

TEST(GenStudy, DeterministicPerReplicate) {
  auto cfg = SimConfig::for_study(Study::S2);
  cfg.n = 40;
  cfg.p = 30;
  const auto a = gen_study(cfg, 5), b = gen_study(cfg, 5), c = gen_study(cfg, 6);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y.values(), b.y.values());
  EXPECT_NE(a.x, c.x);
  cfg.base_seed += 1;
  EXPECT_NE(gen_study(cfg, 5).x, a.x);
}

TEST(GenStudy, SharedPlatformIds) {
  auto cfg = SimConfig::for_study(Study::S3);
  cfg.n = 10;
  cfg.p = 102;
  cfg.shared_platform_ids = true;
  for (std::size_t rep = 0; rep < 5; ++rep)
    for (const auto& e : gen_study(cfg, rep).truth.entries) {
      EXPECT_EQ(e.platforms[0], e.platforms[1]);
      EXPECT_EQ(e.platforms[0], e.platforms[2]);
    }
}
