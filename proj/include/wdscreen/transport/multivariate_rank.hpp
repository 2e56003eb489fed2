#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "wdscreen/ranks.hpp"
#include "wdscreen/transport/assignment.hpp"

namespace wdscreen {

inline std::vector<std::uint32_t> first_primes(std::size_t count) {
  std::vector<std::uint32_t> primes;
  for (std::uint32_t c = 2; primes.size() < count; ++c) {
    bool is_prime = true;
    for (auto p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(c);
  }
  return primes;
}

inline double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double result = 0.0;
  double scale = 1.0 / base;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale /= base;
  }
  return result;
}

/// Halton points 1..n in (0,1)^dim using the first `dim` primes as bases.
inline Matrix halton_points(std::size_t n, std::size_t dim) {
  const auto bases = first_primes(dim);
  Matrix h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < dim; ++c)
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = radical_inverse(i + 1, bases[c]);
  return h;
}

/// Optimal-transport ranks of the rows of m.
///
/// One column: rank(x_i)/n, ties broken by row order. Several columns: each row
/// is mapped to the Halton reference point it is matched with by the
/// squared-Euclidean optimal assignment between the data and an n-point Halton
/// set.
inline Matrix multivariate_rank(const Matrix& m) {
  const Eigen::Index n = m.rows();
  if (n == 0) return m;
  if (m.cols() == 1) {
    std::vector<double> col(m.data(), m.data() + n);
    const auto r = ordinal_ranks(col);
    Matrix out(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) out(i, 0) = r[static_cast<std::size_t>(i)] / static_cast<double>(n);
    return out;
  }
  const Matrix grid = halton_points(static_cast<std::size_t>(n), static_cast<std::size_t>(m.cols()));
  const Assignment match = assignment_solve(squared_distances(m, grid));
  Matrix out(n, m.cols());
  for (Eigen::Index i = 0; i < n; ++i) out.row(i) = grid.row(static_cast<Eigen::Index>(match.permutation[static_cast<std::size_t>(i)]));
  return out;
}

}  // namespace wdscreen
