#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wdscreen/transport/types.hpp"

namespace wdscreen {

struct SinkhornOptions {
  double epsilon = 0.1;
  int max_iter = 10000;
  // L1 violation of the row marginals (columns are exact after each sweep).
  double tol = 1e-9;
};

namespace detail {

inline double log_sum_exp(const double* x, Eigen::Index n, Eigen::Index stride) {
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) mx = std::max(mx, x[i * stride]);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s += std::exp(x[i * stride] - mx);
  return mx + std::log(s);
}

}  // namespace detail

/// Entropically regularised transport, iterated on the dual potentials in the
/// log domain so small epsilon does not underflow the Gibbs kernel.
///
/// Throws ConvergenceError carrying the achieved violation if `tol` is not
/// reached in `max_iter` sweeps.
inline TransportPlan sinkhorn(const Vector& a, const Vector& b, const Matrix& cost, const SinkhornOptions& opt) {
  check_weights(a, "source");
  check_weights(b, "target");
  check_cost(cost, a.size(), b.size());
  if (!(opt.epsilon > 0.0)) throw ArgumentError("sinkhorn epsilon must be > 0");

  const Eigen::Index m = a.size();
  const Eigen::Index k = b.size();
  const double eps = opt.epsilon;
  const Vector log_a = a.array().log();
  const Vector log_b = b.array().log();

  Vector f = Vector::Zero(m);
  Vector g = Vector::Zero(k);
  // scratch(i, j) = (f_i + g_j - C_ij) / eps
  Matrix scratch(m, k);
  double violation = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    scratch = (g.transpose().replicate(m, 1) - cost) / eps;
    for (Eigen::Index i = 0; i < m; ++i)
      f(i) = std::isfinite(log_a(i)) ? eps * (log_a(i) - detail::log_sum_exp(scratch.data() + i, k, m))
                                     : -std::numeric_limits<double>::infinity();
    scratch = (f.replicate(1, k) - cost) / eps;
    for (Eigen::Index j = 0; j < k; ++j)
      g(j) = std::isfinite(log_b(j)) ? eps * (log_b(j) - detail::log_sum_exp(scratch.data() + j * m, m, 1))
                                     : -std::numeric_limits<double>::infinity();

    violation = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!std::isfinite(f(i))) continue;
      double row = 0.0;
      for (Eigen::Index j = 0; j < k; ++j)
        if (std::isfinite(g(j))) row += std::exp((f(i) + g(j) - cost(i, j)) / eps);
      violation += std::abs(row - a(i));
    }
    if (violation <= opt.tol) break;
  }
  if (!(violation <= opt.tol))
    throw ConvergenceError("sinkhorn did not reach tol " + std::to_string(opt.tol) + " in " +
                               std::to_string(opt.max_iter) + " iterations (violation " + std::to_string(violation) + ")",
                           violation, it);

  TransportPlan plan;
  plan.coupling.resize(m, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      plan.coupling(i, j) = (std::isfinite(f(i)) && std::isfinite(g(j))) ? std::exp((f(i) + g(j) - cost(i, j)) / eps) : 0.0;
  plan.cost = plan.coupling.cwiseProduct(cost).sum();
  return plan;
}

inline TransportPlan sinkhorn(const DiscreteMeasure& src, const DiscreteMeasure& dst, const Matrix& cost,
                              const SinkhornOptions& opt) {
  check_measure(src, "source");
  check_measure(dst, "target");
  return sinkhorn(src.weights, dst.weights, cost, opt);
}

struct JointProductResult {
  double cost = 0.0;
  double violation = 0.0;
  int iterations = 0;
};

namespace detail {

// One run of the factored iteration. With `relaxed`, both scalings take the
// over-relaxed step x <- x^(1 - w) * r^w at w = 1.5, written as r * sqrt(r / x).
inline JointProductResult joint_product_run(const Matrix& dx, const Matrix& dy, const Matrix& kx, const Matrix& ky,
                                            const SinkhornOptions& opt, bool relaxed) {
  const Eigen::Index n = dx.rows();
  const double src_w = 1.0 / static_cast<double>(n);
  const double dst_w = src_w * src_w;

  Matrix v = Matrix::Constant(n, n, 1.0);
  Vector u = Vector::Constant(n, 1.0);
  Matrix w(n, n), t(n, n), scaled(n, n);
  Vector s(n);
  JointProductResult res;
  res.violation = std::numeric_limits<double>::infinity();

  int it = 0;
  for (;; ++it) {
    // s_k = sum_{i,j} Kx(k,i) Ky(k,j) V(i,j) = sum_i Kx(k,i) (V Ky^T)(i,k)
    w.noalias() = v * ky.transpose();
    s = kx.cwiseProduct(w.transpose()).rowwise().sum();
    if (it > 0) {
      res.violation = (u.cwiseProduct(s).array() - src_w).abs().sum();
      if (!std::isfinite(res.violation))
        throw ConvergenceError("joint/product sinkhorn scalings left the finite range", res.violation, it);
      if (res.violation <= opt.tol) break;
    }
    if (it >= opt.max_iter)
      throw ConvergenceError("joint/product sinkhorn did not reach tol " + std::to_string(opt.tol) + " in " +
                                 std::to_string(opt.max_iter) + " iterations (violation " +
                                 std::to_string(res.violation) + ")",
                             res.violation, it);
    if (relaxed && it > 0) {
      const Eigen::ArrayXd r = src_w / s.array();
      u = (r * (r / u.array()).sqrt()).matrix();
    } else {
      u = (src_w / s.array()).matrix();
    }
    // T = Kx^T diag(u) Ky
    scaled = u.asDiagonal() * kx;
    t.noalias() = scaled.transpose() * ky;
    if (relaxed && it > 0) {
      v.array() = (dst_w / t.array()) * ((dst_w / t.array()) / v.array()).sqrt();
    } else {
      v = (dst_w / t.array()).matrix();
    }
  }
  res.iterations = it;

  // cost = sum_k u_k sum_{i,j} Kx Ky V (dx + dy)
  const Matrix kx_dx = kx.cwiseProduct(dx);
  const Matrix ky_dy = ky.cwiseProduct(dy);
  Matrix w2(n, n);
  w2.noalias() = v * ky_dy.transpose();
  const Vector part = kx_dx.cwiseProduct(w.transpose()).rowwise().sum() + kx.cwiseProduct(w2.transpose()).rowwise().sum();
  res.cost = u.dot(part);
  if (!std::isfinite(res.cost))
    throw ConvergenceError("joint/product sinkhorn produced a non-finite cost", res.violation, it);
  return res;
}

}  // namespace detail

/// Sinkhorn between the joint empirical measure of n pairs (x_k, y_k) and the
/// product of its marginals (n^2 atoms (x_i, y_j)), for the separable cost
/// dx(k, i) + dy(k, j).
///
/// The Gibbs kernel factorises as Kx(k, i) * Ky(k, j), so each half-sweep is a
/// single n x n matrix product and the n x n^2 plan is never materialised. The
/// iteration is over-relaxed first and falls back to plain Sinkhorn if that
/// run fails. Scalings live in the plain (non-log) domain; if they leave the
/// finite range a ConvergenceError is raised.
inline JointProductResult sinkhorn_joint_product(const Matrix& dx, const Matrix& dy, const SinkhornOptions& opt) {
  const Eigen::Index n = dx.rows();
  if (dx.cols() != n || dy.rows() != n || dy.cols() != n) throw ArgumentError("joint/product costs must be n x n");
  if (!(opt.epsilon > 0.0)) throw ArgumentError("sinkhorn epsilon must be > 0");
  const Matrix kx = (-dx / opt.epsilon).array().exp().matrix();
  const Matrix ky = (-dy / opt.epsilon).array().exp().matrix();
  // The relaxed run normally converges in a few dozen sweeps; cap it so a
  // stalled run falls back quickly.
  SinkhornOptions relaxed = opt;
  relaxed.max_iter = std::min(opt.max_iter, 500);
  try {
    return detail::joint_product_run(dx, dy, kx, ky, relaxed, true);
  } catch (const ConvergenceError&) {
    return detail::joint_product_run(dx, dy, kx, ky, opt, false);
  }
}

}  // namespace wdscreen
