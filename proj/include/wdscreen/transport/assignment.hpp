#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "wdscreen/transport/types.hpp"

namespace wdscreen {

struct Assignment {
  // permutation[i] is the column assigned to row i.
  std::vector<std::size_t> permutation;
  double cost = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (Jonker-Volgenant).
///
/// Phases: column reduction, reduction transfer, two passes of augmenting row
/// reduction, then a Dijkstra-style shortest augmenting path for every row
/// still free. Each phase keeps every assigned column at its row's minimum
/// reduced cost, so the row-reduction passes may stop early (they are capped,
/// since near-ties in floating point can make them cycle) without affecting
/// optimality. O(m^3) worst case; deterministic for a given matrix.
inline Assignment assignment_solve(const Matrix& cost) {
  if (cost.rows() != cost.cols())
    throw ArgumentError("assignment_solve needs a square matrix, got " + std::to_string(cost.rows()) + "x" +
                        std::to_string(cost.cols()));
  if (!cost.allFinite()) throw ArgumentError("assignment_solve: cost matrix must be finite");

  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(cost.rows());
  Assignment out;
  if (m == 0) return out;
  if (m == 1) {
    out.permutation = {0};
    out.cost = cost(0, 0);
    return out;
  }

  // Row-major copy: the scans below run along rows.
  std::vector<double> c(static_cast<std::size_t>(m * m));
  for (std::ptrdiff_t i = 0; i < m; ++i)
    for (std::ptrdiff_t j = 0; j < m; ++j) c[static_cast<std::size_t>(i * m + j)] = cost(i, j);
  auto at = [&](std::ptrdiff_t i, std::ptrdiff_t j) { return c[static_cast<std::size_t>(i * m + j)]; };

  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::ptrdiff_t> col_of_row(static_cast<std::size_t>(m), -1), row_of_col(static_cast<std::size_t>(m), -1);
  std::vector<double> v(static_cast<std::size_t>(m));
  std::vector<int> matches(static_cast<std::size_t>(m), 0);
  auto& rowsol = col_of_row;
  auto& colsol = row_of_col;

  // Column reduction, last column first.
  for (std::ptrdiff_t j = m - 1; j >= 0; --j) {
    std::ptrdiff_t imin = 0;
    double best = at(0, j);
    for (std::ptrdiff_t i = 1; i < m; ++i)
      if (at(i, j) < best) {
        best = at(i, j);
        imin = i;
      }
    v[static_cast<std::size_t>(j)] = best;
    auto& cnt = matches[static_cast<std::size_t>(imin)];
    if (++cnt == 1) {
      rowsol[static_cast<std::size_t>(imin)] = j;
      colsol[static_cast<std::size_t>(j)] = imin;
    } else if (v[static_cast<std::size_t>(j)] < v[static_cast<std::size_t>(rowsol[static_cast<std::size_t>(imin)])]) {
      const std::ptrdiff_t j1 = rowsol[static_cast<std::size_t>(imin)];
      rowsol[static_cast<std::size_t>(imin)] = j;
      colsol[static_cast<std::size_t>(j)] = imin;
      colsol[static_cast<std::size_t>(j1)] = -1;
    } else {
      colsol[static_cast<std::size_t>(j)] = -1;
    }
  }

  // Reduction transfer from rows assigned exactly once; collect free rows.
  std::vector<std::ptrdiff_t> free_rows;
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    const int cnt = matches[static_cast<std::size_t>(i)];
    if (cnt == 0) {
      free_rows.push_back(i);
    } else if (cnt == 1) {
      const std::ptrdiff_t j1 = rowsol[static_cast<std::size_t>(i)];
      double mn = inf;
      for (std::ptrdiff_t j = 0; j < m; ++j)
        if (j != j1) mn = std::min(mn, at(i, j) - v[static_cast<std::size_t>(j)]);
      v[static_cast<std::size_t>(j1)] -= mn;
    }
  }
  // A row matched more than once in column reduction keeps one column; the
  // rows that lost theirs are free (matches == 0 catches those).

  // Augmenting row reduction, two passes.
  const std::ptrdiff_t step_cap = 8 * m;
  for (int pass = 0; pass < 2 && !free_rows.empty(); ++pass) {
    std::vector<std::ptrdiff_t> next;
    std::ptrdiff_t k = 0, steps = 0;
    std::vector<std::ptrdiff_t> stack = free_rows;
    while (k < static_cast<std::ptrdiff_t>(stack.size())) {
      const std::ptrdiff_t i = stack[static_cast<std::size_t>(k++)];
      double umin = at(i, 0) - v[0], usub = inf;
      std::ptrdiff_t j1 = 0, j2 = -1;
      for (std::ptrdiff_t j = 1; j < m; ++j) {
        const double h = at(i, j) - v[static_cast<std::size_t>(j)];
        if (h < usub) {
          if (h >= umin) {
            usub = h;
            j2 = j;
          } else {
            usub = umin;
            umin = h;
            j2 = j1;
            j1 = j;
          }
        }
      }
      std::ptrdiff_t i0 = colsol[static_cast<std::size_t>(j1)];
      const bool strict = umin < usub;
      if (strict) {
        v[static_cast<std::size_t>(j1)] -= usub - umin;
      } else if (i0 >= 0) {
        j1 = j2;
        i0 = colsol[static_cast<std::size_t>(j2)];
      }
      rowsol[static_cast<std::size_t>(i)] = j1;
      colsol[static_cast<std::size_t>(j1)] = i;
      if (i0 >= 0) {
        rowsol[static_cast<std::size_t>(i0)] = -1;
        if (strict && ++steps < step_cap)
          stack[static_cast<std::size_t>(--k)] = i0;
        else
          next.push_back(i0);
      }
    }
    free_rows = std::move(next);
  }

  // Shortest augmenting paths.
  std::vector<double> d(static_cast<std::size_t>(m));
  std::vector<std::ptrdiff_t> pred(static_cast<std::size_t>(m)), collist(static_cast<std::size_t>(m));
  for (const std::ptrdiff_t freerow : free_rows) {
    for (std::ptrdiff_t j = 0; j < m; ++j) {
      d[static_cast<std::size_t>(j)] = at(freerow, j) - v[static_cast<std::size_t>(j)];
      pred[static_cast<std::size_t>(j)] = freerow;
      collist[static_cast<std::size_t>(j)] = j;
    }
    std::ptrdiff_t low = 0, up = 0, last = 0, endofpath = -1;
    double mn = 0.0;
    bool found = false;
    do {
      if (up == low) {
        last = low - 1;
        mn = d[static_cast<std::size_t>(collist[static_cast<std::size_t>(up++)])];
        for (std::ptrdiff_t k = up; k < m; ++k) {
          const std::ptrdiff_t j = collist[static_cast<std::size_t>(k)];
          const double h = d[static_cast<std::size_t>(j)];
          if (h <= mn) {
            if (h < mn) {
              up = low;
              mn = h;
            }
            collist[static_cast<std::size_t>(k)] = collist[static_cast<std::size_t>(up)];
            collist[static_cast<std::size_t>(up++)] = j;
          }
        }
        for (std::ptrdiff_t k = low; k < up; ++k)
          if (colsol[static_cast<std::size_t>(collist[static_cast<std::size_t>(k)])] < 0) {
            endofpath = collist[static_cast<std::size_t>(k)];
            found = true;
            break;
          }
      }
      if (!found) {
        const std::ptrdiff_t j1 = collist[static_cast<std::size_t>(low++)];
        const std::ptrdiff_t i = colsol[static_cast<std::size_t>(j1)];
        const double h = at(i, j1) - v[static_cast<std::size_t>(j1)] - mn;
        for (std::ptrdiff_t k = up; k < m; ++k) {
          const std::ptrdiff_t j = collist[static_cast<std::size_t>(k)];
          const double v2 = at(i, j) - v[static_cast<std::size_t>(j)] - h;
          if (v2 < d[static_cast<std::size_t>(j)]) {
            pred[static_cast<std::size_t>(j)] = i;
            if (v2 == mn) {
              if (colsol[static_cast<std::size_t>(j)] < 0) {
                endofpath = j;
                found = true;
                break;
              }
              collist[static_cast<std::size_t>(k)] = collist[static_cast<std::size_t>(up)];
              collist[static_cast<std::size_t>(up++)] = j;
            }
            d[static_cast<std::size_t>(j)] = v2;
          }
        }
      }
    } while (!found);

    for (std::ptrdiff_t k = 0; k <= last; ++k) {
      const std::ptrdiff_t j1 = collist[static_cast<std::size_t>(k)];
      v[static_cast<std::size_t>(j1)] += d[static_cast<std::size_t>(j1)] - mn;
    }
    std::ptrdiff_t i;
    do {
      i = pred[static_cast<std::size_t>(endofpath)];
      colsol[static_cast<std::size_t>(endofpath)] = i;
      const std::ptrdiff_t j1 = endofpath;
      endofpath = rowsol[static_cast<std::size_t>(i)];
      rowsol[static_cast<std::size_t>(i)] = j1;
    } while (i != freerow);
  }

  out.permutation.resize(static_cast<std::size_t>(m));
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    out.permutation[static_cast<std::size_t>(i)] = static_cast<std::size_t>(rowsol[static_cast<std::size_t>(i)]);
    out.cost += cost(i, rowsol[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace wdscreen
