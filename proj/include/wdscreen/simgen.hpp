#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "wdscreen/core_data.hpp"

namespace wdscreen {

// Stream roles, so every random quantity of a replicate has its own stream.
enum class Role : std::uint64_t { features = 1, betas = 2, noise = 3, platform_ids = 4, noise_responses = 5 };

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Engine for (seed, replicate, role, sub) where `sub` separates e.g. the
/// platforms of one replicate. Independent of the order streams are created.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replicate, Role role, std::uint64_t sub = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ replicate);
  h = splitmix64(h ^ static_cast<std::uint64_t>(role));
  h = splitmix64(h ^ sub);
  return std::mt19937_64(h);
}

inline double uniform01(std::mt19937_64& rng) {
  // Strictly inside (0, 1) so quantile maps stay finite.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double v = u(rng);
  while (v <= 0.0) v = u(rng);
  return v;
}

inline double power_quantile(double u, double a) { return std::pow(u, 1.0 / a); }
inline double pareto_quantile(double upper_tail, double shape, double mode) {
  return mode * std::pow(upper_tail, -1.0 / shape);
}

inline std::vector<double> sample_power(double a, std::size_t count, std::mt19937_64& rng) {
  if (!(a > 0.0)) throw ArgumentError("power parameter must be > 0");
  std::vector<double> out(count);
  for (auto& v : out) v = power_quantile(uniform01(rng), a);
  return out;
}

/// m (1 - U)^(-1/a); 1 - U is again uniform so U is used directly.
inline std::vector<double> sample_pareto(double shape, double mode, std::size_t count, std::mt19937_64& rng) {
  if (!(shape > 1.0)) throw ArgumentError("pareto shape must be > 1");
  if (!(mode > 0.0)) throw ArgumentError("pareto mode must be > 0");
  std::vector<double> out(count);
  for (auto& v : out) v = pareto_quantile(uniform01(rng), shape, mode);
  return out;
}

/// Rows i.i.d. N(0, S) with S_ij = rho^|i-j|, via the AR(1) recursion along
/// the columns.
inline Matrix gen_ar1_gaussian(std::size_t n, std::size_t p, double rho, std::mt19937_64& rng) {
  if (!(rho > -1.0 && rho < 1.0)) throw ArgumentError("AR(1) coefficient must lie in (-1, 1)");
  std::normal_distribution<double> z(0.0, 1.0);
  const double scale = std::sqrt(1.0 - rho * rho);
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double prev = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double e = z(rng);
      prev = j == 0 ? e : rho * prev + scale * e;
      m(i, j) = prev;
    }
  }
  return m;
}

/// Gaussian AR(1) copula with the given marginal: z -> F^-1(Phi(z)).
inline Matrix gen_copula_platform(std::size_t n, std::size_t p, double rho, const Marginal& marginal,
                                  std::mt19937_64& rng) {
  Matrix m = gen_ar1_gaussian(n, p, rho, rng);
  if (marginal.kind == Marginal::Kind::gaussian) return m;
  const double root2 = std::sqrt(2.0);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double z = m(i, j);
      if (marginal.kind == Marginal::Kind::power) {
        m(i, j) = power_quantile(0.5 * std::erfc(-z / root2), marginal.shape);
      } else {
        // Upper tail 1 - Phi(z) computed directly keeps precision for large z.
        m(i, j) = pareto_quantile(0.5 * std::erfc(z / root2), marginal.shape, marginal.mode);
      }
    }
  return m;
}

struct StudyInstance {
  PredictorArray x;
  ResponseBlock y;
  TrueSet truth;
  // S1/S2: 4 betas. S3: 4 per active response; S4: 2 per active response.
  std::vector<double> betas;
  std::uint64_t seed = 0;
  std::size_t replicate = 0;
};

namespace detail {

inline std::vector<std::size_t> true_features(Study s) {
  if (s == Study::S1 || s == Study::S2) return {0, 1, 11, 12};
  return {1, 2, 100, 101};
}

inline void put_platform(PredictorArray& x, std::size_t k, const Matrix& m) {
  for (std::size_t i = 0; i < x.subjects(); ++i)
    for (std::size_t j = 0; j < x.features(); ++j)
      x(k, i, j) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

}  // namespace detail

/// One replicate of a study. Deterministic in (cfg.base_seed, replicate).
inline StudyInstance gen_study(const SimConfig& cfg, std::size_t replicate) {
  cfg.validate();
  const std::uint64_t seed = cfg.base_seed;
  const std::size_t n = cfg.n, p = cfg.p;
  const auto active = detail::true_features(cfg.study);
  StudyInstance inst{PredictorArray(cfg.d, n, p), ResponseBlock(Matrix::Zero(static_cast<Eigen::Index>(n),
                                                                              static_cast<Eigen::Index>(cfg.q))),
                     TrueSet{}, {}, seed, replicate};

  auto betas_rng = make_stream(seed, replicate, Role::betas);
  std::uniform_real_distribution<double> beta(cfg.beta_low, cfg.beta_high);
  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cfg.q));

  if (!cfg.multivariate()) {
    auto rng = make_stream(seed, replicate, Role::features);
    Matrix m;
    if (cfg.study == Study::S1) {
      m = gen_ar1_gaussian(n, p, cfg.ar_coefficient, rng);
    } else {
      m.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = power_quantile(uniform01(rng), cfg.power_shape);
    }
    detail::put_platform(inst.x, 0, m);
    for (std::size_t t = 0; t < 4; ++t) inst.betas.push_back(beta(betas_rng));
    auto eps = make_stream(seed, replicate, Role::noise);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      double v = 0.0;
      for (std::size_t t = 0; t < 4; ++t) v += inst.betas[t] * m(i, static_cast<Eigen::Index>(active[t]));
      y(i, 0) = v + cfg.noise_sd * noise(eps);
    }
    for (auto f : active) inst.truth.entries.push_back({f, {}});
    inst.y = ResponseBlock(std::move(y));
    return inst;
  }

  const Marginal margins[3] = {Marginal::pareto(cfg.pareto_shape, cfg.pareto_mode), Marginal::power(cfg.power_shape),
                               Marginal::power(cfg.power_shape)};
  for (std::size_t k = 0; k < 3; ++k) {
    auto rng = make_stream(seed, replicate, Role::features, k);
    detail::put_platform(inst.x, k, gen_copula_platform(n, p, cfg.ar_coefficient, margins[k], rng));
  }

  auto id_rng = make_stream(seed, replicate, Role::platform_ids);
  std::uniform_int_distribution<std::size_t> pick(0, 2);
  std::vector<std::array<std::size_t, 4>> ids(3);
  for (std::size_t k = 0; k < 3; ++k) {
    if (cfg.shared_platform_ids && k > 0) {
      ids[k] = ids[0];
    } else {
      for (auto& v : ids[k]) v = pick(id_rng);
    }
  }
  for (std::size_t t = 0; t < 4; ++t) {
    TrueFeature f{active[t], {}};
    for (std::size_t k = 0; k < 3; ++k) f.platforms.push_back(ids[k][t]);
    inst.truth.entries.push_back(f);
  }

  const bool interaction = cfg.study == Study::S4;
  const PredictorArray& x = inst.x;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t nb = interaction ? 2 : 4;
    std::vector<double> b(nb);
    for (auto& v : b) v = beta(betas_rng);
    inst.betas.insert(inst.betas.end(), b.begin(), b.end());
    auto eps = make_stream(seed, replicate, Role::noise, k);
    const auto& id = ids[k];
    for (std::size_t i = 0; i < n; ++i) {
      double v;
      if (interaction) {
        v = b[0] * x(id[0], i, active[0]) * x(id[1], i, active[1]) +
            b[1] * x(id[2], i, active[2]) * x(id[3], i, active[3]);
      } else {
        v = 0.0;
        for (std::size_t t = 0; t < 4; ++t) v += b[t] * x(id[t], i, active[t]);
      }
      y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v + cfg.noise_sd * noise(eps);
    }
  }
  auto extra = make_stream(seed, replicate, Role::noise_responses);
  for (Eigen::Index c = 3; c < y.cols(); ++c)
    for (Eigen::Index i = 0; i < y.rows(); ++i) y(i, c) = power_quantile(uniform01(extra), cfg.power_shape);
  inst.y = ResponseBlock(std::move(y));
  return inst;
}

}  // namespace wdscreen
