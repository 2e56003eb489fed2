#pragma once

// Slow, direct reference implementations used to cross-check the fast code.
// Everything here follows the textbook definition literally: explicit loops,
// std::acos, permutation enumeration. Only meant for n in the single digits.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "wdscreen/core_data.hpp"
#include "wdscreen/transport/multivariate_rank.hpp"

namespace wdscreen::oracle {

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::abs(sxy) / std::sqrt(sxx * syy);
}

// Mid-rank: #{less} + (#{equal} + 1) / 2.
inline std::vector<double> mid_ranks(const std::vector<double>& y) {
  std::vector<double> r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double less = 0, equal = 0;
    for (double v : y) {
      if (v < y[i]) less += 1;
      if (v == y[i]) equal += 1;
    }
    r[i] = less + (equal + 1.0) / 2.0;
  }
  return r;
}

inline std::vector<double> scaled_mid_ranks(const std::vector<double>& y) {
  auto r = mid_ranks(y);
  for (auto& v : r) v /= static_cast<double>(y.size());
  return r;
}

inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0, discordant = 0, ties_x = 0, ties_y = 0, pairs = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      pairs += 1;
      const double p = (x[i] - x[j]) * (y[i] - y[j]);
      if (x[i] == x[j]) ties_x += 1;
      if (y[i] == y[j]) ties_y += 1;
      if (p > 0) concordant += 1;
      if (p < 0) discordant += 1;
    }
  const double den = std::sqrt((pairs - ties_x) * (pairs - ties_y));
  if (den == 0.0) return 0.0;
  return std::abs(concordant - discordant) / den;
}

inline Matrix to_matrix(const std::vector<double>& v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return m;
}

inline double euclid(const Matrix& m, Eigen::Index a, Eigen::Index b) {
  double s = 0;
  for (Eigen::Index c = 0; c < m.cols(); ++c) s += (m(a, c) - m(b, c)) * (m(a, c) - m(b, c));
  return std::sqrt(s);
}

// Centred product sum (1/n^2) sum_{k,l} A_kl B_kl of two n x n kernels.
inline double centred_product(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  const std::size_t n = a.size();
  auto centre = [n](const std::vector<std::vector<double>>& m) {
    std::vector<double> row(n, 0), col(n, 0);
    double all = 0;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) {
        row[k] += m[k][l] / n;
        col[l] += m[k][l] / n;
        all += m[k][l] / (n * n);
      }
    auto c = m;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) c[k][l] = m[k][l] - row[k] - col[l] + all;
    return c;
  };
  const auto ca = centre(a), cb = centre(b);
  double s = 0;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) s += ca[k][l] * cb[k][l];
  return s / static_cast<double>(n * n);
}

enum class Transform { identity, one_minus_exp, one_minus_exp_median };

inline std::vector<std::vector<double>> distance_kernel(const Matrix& m, Transform g) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  std::vector<double> pairs;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) {
      d[k][l] = euclid(m, static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
      if (k < l) pairs.push_back(d[k][l]);
    }
  double scale = 1.0;
  if (g == Transform::one_minus_exp_median && !pairs.empty()) {
    std::sort(pairs.begin(), pairs.end());
    if (pairs[pairs.size() / 2] > 0.0) scale = pairs[pairs.size() / 2];
  }
  for (auto& row : d)
    for (auto& u : row)
      if (g != Transform::identity) u = 1.0 - std::exp(-u / scale);
  return d;
}

inline double ratio_root(double xy, double xx, double yy) {
  if (xx <= 0.0 || yy <= 0.0) return 0.0;
  return std::sqrt(std::max(xy, 0.0) / std::sqrt(xx * yy));
}

inline double dcor(const Matrix& x, const Matrix& y, Transform g = Transform::identity) {
  const auto a = distance_kernel(x, g), b = distance_kernel(y, g);
  return ratio_root(centred_product(a, b), centred_product(a, a), centred_product(b, b));
}

inline double projection_correlation(const Matrix& x, const Matrix& y) {
  const auto n = static_cast<std::size_t>(x.rows());
  auto angles = [n](const Matrix& m, std::size_t r) {
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l) {
        double dot = 0, nk = 0, nl = 0;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          const double u = m(static_cast<Eigen::Index>(k), c) - m(static_cast<Eigen::Index>(r), c);
          const double v = m(static_cast<Eigen::Index>(l), c) - m(static_cast<Eigen::Index>(r), c);
          dot += u * v;
          nk += u * u;
          nl += v * v;
        }
        if (nk == 0.0 || nl == 0.0) continue;
        // On a line the angle is exactly 0 or pi.
        if (m.cols() == 1) {
          a[k][l] = dot < 0.0 ? std::acos(-1.0) : 0.0;
          continue;
        }
        a[k][l] = std::acos(std::clamp(dot / std::sqrt(nk * nl), -1.0, 1.0));
      }
    return a;
  };
  double xy = 0, xx = 0, yy = 0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto a = angles(x, r), b = angles(y, r);
    xy += centred_product(a, b);
    xx += centred_product(a, a);
    yy += centred_product(b, b);
  }
  return ratio_root(xy, xx, yy);
}

inline double ball_correlation(const Matrix& x, const Matrix& y) {
  const auto n = static_cast<Eigen::Index>(x.rows());
  auto cov = [n](const Matrix& u, const Matrix& v) {
    double s = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        double du = 0, dv = 0, duv = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const bool in_u = euclid(u, k, i) <= euclid(u, j, i);
          const bool in_v = euclid(v, k, i) <= euclid(v, j, i);
          du += in_u;
          dv += in_v;
          duv += in_u && in_v;
        }
        const double nd = static_cast<double>(n);
        const double diff = duv / nd - (du / nd) * (dv / nd);
        s += diff * diff;
      }
    return s / static_cast<double>(n * n);
  };
  return ratio_root(cov(x, y), cov(x, x), cov(y, y));
}

/// Minimum of sum_i cost(i, perm(i)) over all permutations.
inline double assignment_min(const Matrix& cost) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) s += cost(static_cast<Eigen::Index>(i), perm[i]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Optimal argmin permutation (first in lexicographic order among minimisers).
inline std::vector<Eigen::Index> assignment_argmin(const Matrix& cost) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(cost.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Eigen::Index> best_perm = perm;
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) s += cost(static_cast<Eigen::Index>(i), perm[i]);
    if (s < best) {
      best = s;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best_perm;
}

/// Transport LP optimum by enumerating every basis of the m + k - 1
/// independent marginal constraints and keeping the cheapest feasible vertex.
inline double transport_lp_vertices(const Vector& a, const Vector& b, const Matrix& cost) {
  const auto m = a.size(), k = b.size();
  const Eigen::Index vars = m * k, rows = m + k - 1;
  // Constraint matrix without the last column-sum row (it is implied).
  Matrix eq = Matrix::Zero(rows, vars);
  Vector rhs(rows);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) eq(i, i * k + j) = 1.0;
    rhs(i) = a(i);
  }
  for (Eigen::Index j = 0; j + 1 < k; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) eq(m + j, i * k + j) = 1.0;
    rhs(m + j) = b(j);
  }
  std::vector<bool> pick(static_cast<std::size_t>(vars), false);
  std::fill(pick.begin(), pick.begin() + rows, true);
  double best = std::numeric_limits<double>::infinity();
  do {
    Matrix basis(rows, rows);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index v = 0; v < vars; ++v)
      if (pick[static_cast<std::size_t>(v)]) idx.push_back(v);
    for (Eigen::Index c = 0; c < rows; ++c) basis.col(c) = eq.col(idx[static_cast<std::size_t>(c)]);
    Eigen::FullPivLU<Matrix> lu(basis);
    if (lu.rank() < rows) continue;
    const Vector sol = lu.solve(rhs);
    if (sol.minCoeff() < -1e-12) continue;
    double c = 0;
    for (Eigen::Index t = 0; t < rows; ++t) {
      const Eigen::Index v = idx[static_cast<std::size_t>(t)];
      c += sol(t) * cost(v / k, v % k);
    }
    best = std::min(best, c);
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

inline double squared_euclid(const Matrix& m, Eigen::Index a, Eigen::Index b) {
  const double d = euclid(m, a, b);
  return d * d;
}

/// Explicit n x n^2 cost between joint atoms (x_k, y_k) and product atoms (x_i, y_j).
inline Matrix joint_product_cost_matrix(const Matrix& x, const Matrix& y) {
  const Eigen::Index n = x.rows();
  Matrix c(n, n * n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) c(k, i * n + j) = squared_euclid(x, k, i) + squared_euclid(y, k, j);
  return c;
}

/// Joint-vs-product transport cost by permutation enumeration. Splitting each
/// joint atom into n copies of mass 1/n^2 makes both sides uniform on n^2
/// atoms, where an optimal plan is a permutation. Feasible for n <= 3.
inline double joint_product_by_permutations(const Matrix& x, const Matrix& y) {
  const Eigen::Index n = x.rows();
  const Matrix c = joint_product_cost_matrix(x, y);
  Matrix expanded(n * n, n * n);
  for (Eigen::Index r = 0; r < n * n; ++r) expanded.row(r) = c.row(r / n);
  return assignment_min(expanded) / static_cast<double>(n * n);
}

inline Matrix standardize_columns(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  const double n = static_cast<double>(m.rows());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    double mean = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) mean += m(i, c) / n;
    double ss = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) ss += (m(i, c) - mean) * (m(i, c) - mean);
    const double sd = std::sqrt(ss / (n - 1));
    bool constant = true;
    for (Eigen::Index i = 1; i < m.rows(); ++i) constant = constant && m(i, c) == m(0, c);
    for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, c) = constant ? 0.0 : (m(i, c) - mean) / sd;
  }
  return out;
}

/// Multivariate ranks via brute-force matching to the Halton grid.
inline Matrix ranks_by_enumeration(const Matrix& m) {
  const Eigen::Index n = m.rows();
  Matrix out(n, m.cols());
  if (m.cols() == 1) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 1;
      for (Eigen::Index k = 0; k < n; ++k)
        if (m(k, 0) < m(i, 0) || (m(k, 0) == m(i, 0) && k < i)) r += 1;
      out(i, 0) = r / static_cast<double>(n);
    }
    return out;
  }
  const Matrix grid = halton_points(static_cast<std::size_t>(n), static_cast<std::size_t>(m.cols()));
  Matrix cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index g = 0; g < n; ++g) cost(i, g) = (m.row(i) - grid.row(g)).squaredNorm();
  const auto perm = assignment_argmin(cost);
  for (Eigen::Index i = 0; i < n; ++i) out.row(i) = grid.row(perm[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace wdscreen::oracle
