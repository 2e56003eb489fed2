#pragma once

#include <cmath>
#include <string>

#include "wdscreen/core_data.hpp"

namespace wdscreen {

/// Weighted point cloud: m atoms in `points` (m x dim) with `weights` summing
/// to one.
struct DiscreteMeasure {
  Matrix points;
  Vector weights;

  static DiscreteMeasure uniform(Matrix pts) {
    const auto m = pts.rows();
    DiscreteMeasure mu{std::move(pts), Vector::Constant(m, 1.0 / static_cast<double>(m))};
    return mu;
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights.size()); }
};

struct TransportPlan {
  Matrix coupling;
  double cost = 0.0;
};

constexpr double kWeightSumTolerance = 1e-9;
constexpr double kMarginalTolerance = 1e-6;

inline void check_weights(const Vector& w, const char* which) {
  if (w.size() == 0) throw ArgumentError(std::string(which) + " measure has no atoms");
  if (!w.allFinite()) throw ArgumentError(std::string(which) + " weights must be finite");
  if (w.minCoeff() < 0.0) throw ArgumentError(std::string(which) + " weights must be nonnegative");
  const double s = w.sum();
  if (std::abs(s - 1.0) > kWeightSumTolerance)
    throw ArgumentError(std::string(which) + " weights sum to " + std::to_string(s) + ", not 1");
}

inline void check_measure(const DiscreteMeasure& mu, const char* which) {
  check_weights(mu.weights, which);
  if (mu.points.rows() != mu.weights.size())
    throw ArgumentError(std::string(which) + " measure has mismatched points/weights");
  if (!mu.points.allFinite()) throw ArgumentError(std::string(which) + " coordinates must be finite");
}

inline void check_cost(const Matrix& cost, Eigen::Index rows, Eigen::Index cols) {
  if (cost.rows() != rows || cost.cols() != cols)
    throw ArgumentError("cost matrix is " + std::to_string(cost.rows()) + "x" + std::to_string(cost.cols()) +
                        ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  if (!cost.allFinite()) throw ArgumentError("cost matrix must be finite");
}

/// Pairwise squared Euclidean distances between the rows of a and b.
inline Matrix squared_distances(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ArgumentError("point dimensions differ");
  Matrix d(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return d;
}

/// Total violation (L1) of a coupling's row and column marginals.
inline double marginal_violation(const Matrix& coupling, const Vector& a, const Vector& b) {
  return (coupling.rowwise().sum() - a).cwiseAbs().sum() + (coupling.colwise().sum().transpose() - b).cwiseAbs().sum();
}

}  // namespace wdscreen
