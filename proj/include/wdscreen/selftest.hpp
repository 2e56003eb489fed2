#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wdscreen/measures.hpp"
#include "wdscreen/oracles.hpp"
#include "wdscreen/transport/assignment.hpp"

namespace wdscreen {

struct OracleCheck {
  std::string name;
  std::size_t cases = 0;
  double max_error = 0.0;
};

namespace detail {

// Random block pair for case `s`: n cycles through 2..6, dimensions through
// 1..2, and every fourth case is dependent or carries ties.
inline std::pair<Matrix, Matrix> oracle_case(std::mt19937_64& rng, std::size_t s, std::size_t max_n,
                                             bool univariate) {
  std::normal_distribution<double> z;
  const Eigen::Index n = 2 + static_cast<Eigen::Index>(s % (max_n - 1));
  const Eigen::Index d = univariate ? 1 : 1 + static_cast<Eigen::Index>((s / 5) % 2);
  const Eigen::Index q = univariate ? 1 : 1 + static_cast<Eigen::Index>((s / 10) % 2);
  Matrix x(n, d), y(n, q);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) x(i, c) = z(rng);
    for (Eigen::Index c = 0; c < q; ++c) y(i, c) = z(rng);
  }
  switch (s % 4) {
    case 1:
      y.col(0) = x.col(0).array().square() + 0.1 * y.col(0).array();
      break;
    case 3:
      // Coarse values so univariate columns carry ties.
      if (d == 1) x = (x.array() * 1.5).round();
      if (q == 1) y = (y.array() * 1.5).round();
      break;
    default:
      break;
  }
  return {x, y};
}

// Joint-vs-product transport value by exhaustive search: permutation
// enumeration up to n = 3, beyond that the uniform n^2 x n^2 assignment form.
inline double wd_reference(const Matrix& x, const Matrix& y) {
  const Matrix xs = oracle::standardize_columns(x), ys = oracle::standardize_columns(y);
  const Eigen::Index n = x.rows();
  if (n <= 3) return oracle::joint_product_by_permutations(xs, ys);
  const Matrix c = oracle::joint_product_cost_matrix(xs, ys);
  Matrix expanded(n * n, n * n);
  for (Eigen::Index r = 0; r < n * n; ++r) expanded.row(r) = c.row(r / n);
  return assignment_solve(expanded).cost / static_cast<double>(n * n);
}

inline double oracle_value(MeasureKind kind, const Matrix& x, const Matrix& y) {
  switch (kind) {
    case MeasureKind::SIS:
      return std::abs(oracle::pearson(column(x), column(y)));
    case MeasureKind::SIRS:
      return std::abs(oracle::pearson(column(x), oracle::scaled_mid_ranks(column(y))));
    case MeasureKind::RRCS:
      return std::abs(oracle::kendall_tau_b(column(x), column(y)));
    case MeasureKind::DC_RoSIS:
      return oracle::dcor(x, oracle::to_matrix(oracle::scaled_mid_ranks(column(y))));
    case MeasureKind::DC_SIS:
      return oracle::dcor(x, y);
    case MeasureKind::SC_SIS:
      return oracle::dcor(x, y, oracle::Transform::one_minus_exp_median);
    case MeasureKind::MrDc_SIS:
      if (rows_all_equal(x) || rows_all_equal(y)) return 0.0;
      return oracle::dcor(oracle::ranks_by_enumeration(x), oracle::ranks_by_enumeration(y));
    case MeasureKind::PC_Screen:
      return oracle::projection_correlation(x, y);
    case MeasureKind::BCor_SIS:
      return oracle::ball_correlation(x, y);
    case MeasureKind::WD_Screen:
      return wd_reference(x, y);
  }
  return 0.0;
}

}  // namespace detail

/// Compares every measure with its brute-force oracle on `cases` random
/// small instances (n <= max_n <= 6), and assignment_solve with permutation
/// enumeration on `assignment_cases` matrices of size up to 7.
inline std::vector<OracleCheck> run_oracle_suite(std::size_t cases, std::size_t assignment_cases,
                                                 std::uint64_t seed = 20240601, std::size_t max_n = 6) {
  std::vector<OracleCheck> out;
  MeasureOptions opt;
  opt.wd_solver = WdSolver::exact;
  for (std::size_t k = 0; k < kAllMeasures.size(); ++k) {
    const MeasureKind kind = kAllMeasures[k];
    std::mt19937_64 rng(seed + 7919 * k);
    OracleCheck c{to_string(kind), cases, 0.0};
    for (std::size_t s = 0; s < cases; ++s) {
      const auto [x, y] = detail::oracle_case(rng, s, max_n, univariate_only(kind));
      const double err = std::abs(utility(kind, x, y, opt) - detail::oracle_value(kind, x, y));
      c.max_error = std::max(c.max_error, std::isnan(err) ? INFINITY : err);
    }
    out.push_back(c);
  }

  std::mt19937_64 rng(seed ^ 0xa55a);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_int_distribution<int> small(0, 3);
  OracleCheck a{"assignment", assignment_cases, 0.0};
  for (std::size_t s = 0; s < assignment_cases; ++s) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(s % 7);
    Matrix cost(m, m);
    // Every third matrix uses small integers to force ties.
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) cost(i, j) = s % 3 == 2 ? small(rng) : u(rng);
    a.max_error = std::max(a.max_error, std::abs(assignment_solve(cost).cost - oracle::assignment_min(cost)));
  }
  out.push_back(a);
  return out;
}

}  // namespace wdscreen
