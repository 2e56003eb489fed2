#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "wdscreen/core_data.hpp"
#include "wdscreen/fast_math.hpp"
#include "wdscreen/parallel.hpp"
#include "wdscreen/ranks.hpp"
#include "wdscreen/transport.hpp"

namespace wdscreen {

enum class MeasureKind { SIS, SIRS, RRCS, DC_SIS, DC_RoSIS, MrDc_SIS, SC_SIS, PC_Screen, BCor_SIS, WD_Screen };

inline constexpr std::array<MeasureKind, 10> kAllMeasures = {
    MeasureKind::SIS,      MeasureKind::SIRS,     MeasureKind::RRCS,     MeasureKind::DC_SIS,    MeasureKind::DC_RoSIS,
    MeasureKind::MrDc_SIS, MeasureKind::SC_SIS,   MeasureKind::PC_Screen, MeasureKind::BCor_SIS, MeasureKind::WD_Screen};

inline std::string to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::SIS: return "SIS";
    case MeasureKind::SIRS: return "SIRS";
    case MeasureKind::RRCS: return "RRCS";
    case MeasureKind::DC_SIS: return "DC-SIS";
    case MeasureKind::DC_RoSIS: return "DC-RoSIS";
    case MeasureKind::MrDc_SIS: return "MrDc-SIS";
    case MeasureKind::SC_SIS: return "SC-SIS";
    case MeasureKind::PC_Screen: return "PC-Screen";
    case MeasureKind::BCor_SIS: return "BCor-SIS";
    case MeasureKind::WD_Screen: return "WD-Screen";
  }
  return "?";
}

/// Accepts the display names ("DC-SIS") as well as "dc_sis", "DCSIS", ...
inline MeasureKind parse_measure(const std::string& name) {
  auto norm = [](const std::string& s) {
    std::string out;
    for (char c : s)
      if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
  };
  const std::string key = norm(name);
  for (auto k : kAllMeasures)
    if (norm(to_string(k)) == key) return k;
  throw ConfigError("unknown method '" + name + "'");
}

/// SIS, SIRS, RRCS and DC-RoSIS are defined for a scalar predictor and response only.
inline bool univariate_only(MeasureKind k) {
  return k == MeasureKind::SIS || k == MeasureKind::SIRS || k == MeasureKind::RRCS || k == MeasureKind::DC_RoSIS;
}

enum class ScTransform { one_minus_exp, one_minus_exp_median, identity };
enum class WdSolver { automatic, exact, sinkhorn };
enum class WdPreprocess { standardize, rank };

inline std::string to_string(ScTransform t) {
  switch (t) {
    case ScTransform::one_minus_exp: return "one_minus_exp";
    case ScTransform::one_minus_exp_median: return "one_minus_exp_median";
    case ScTransform::identity: return "identity";
  }
  return "?";
}
inline std::string to_string(WdSolver s) {
  switch (s) {
    case WdSolver::automatic: return "auto";
    case WdSolver::exact: return "exact";
    case WdSolver::sinkhorn: return "sinkhorn";
  }
  return "?";
}
inline std::string to_string(WdPreprocess p) { return p == WdPreprocess::rank ? "rank" : "standardize"; }

inline ScTransform parse_sc_transform(const std::string& s) {
  if (s == "one_minus_exp") return ScTransform::one_minus_exp;
  if (s == "one_minus_exp_median") return ScTransform::one_minus_exp_median;
  if (s == "identity") return ScTransform::identity;
  throw ConfigError("unknown SC transform '" + s +
                    "' (expected one_minus_exp, one_minus_exp_median or identity)");
}
inline WdSolver parse_wd_solver(const std::string& s) {
  if (s == "auto") return WdSolver::automatic;
  if (s == "exact") return WdSolver::exact;
  if (s == "sinkhorn") return WdSolver::sinkhorn;
  throw ConfigError("unknown WD solver '" + s + "' (expected auto, exact or sinkhorn)");
}
inline WdPreprocess parse_wd_preprocess(const std::string& s) {
  if (s == "standardize") return WdPreprocess::standardize;
  if (s == "rank") return WdPreprocess::rank;
  throw ConfigError("unknown WD preprocessing '" + s + "' (expected standardize or rank)");
}

struct MeasureOptions {
  // Distances are divided by the block's median pairwise distance before the
  // bounded transform; the unscaled form saturates on wide responses.
  ScTransform sc_transform = ScTransform::one_minus_exp_median;
  WdSolver wd_solver = WdSolver::automatic;
  WdPreprocess wd_preprocess = WdPreprocess::standardize;
  // Sinkhorn epsilon as a multiple of the mean ground cost.
  double wd_epsilon_factor = 0.1;
  double wd_tol = 1e-5;
  int wd_max_iter = 10000;
  // Automatic solver choice: exact while n * n^2 stays within this many pairs
  // (n <= 30; the network simplex costs about 7 ms there and 1 s at n = 100).
  std::size_t wd_exact_pair_limit = 27'000;
};

/// Per-feature utilities produced by one method.
struct ScoreTable {
  std::vector<double> utilities;
  MeasureKind method = MeasureKind::SIS;

  std::size_t size() const noexcept { return utilities.size(); }
};

namespace detail {

inline std::vector<double> column(const Matrix& m, Eigen::Index c = 0) {
  return std::vector<double>(m.col(c).data(), m.col(c).data() + m.rows());
}

inline Matrix as_column(std::span<const double> x) {
  Matrix m(static_cast<Eigen::Index>(x.size()), 1);
  for (std::size_t i = 0; i < x.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = x[i];
  return m;
}

inline Matrix scaled_mid_ranks(const Matrix& y) {
  const auto r = mid_ranks(column(y));
  Matrix out(y.rows(), 1);
  const double n = static_cast<double>(y.rows());
  for (Eigen::Index i = 0; i < y.rows(); ++i) out(i, 0) = r[static_cast<std::size_t>(i)] / n;
  return out;
}

// Row-to-row Euclidean distances, optionally passed through 1 - exp(-u)
// (callers rescale the rows first for the median variant).
inline Matrix pairwise_distances(const Matrix& x, ScTransform g = ScTransform::identity) {
  const Eigen::Index n = x.rows();
  Matrix d(n, n);
  for (Eigen::Index l = 0; l < n; ++l) {
    d(l, l) = 0.0;
    for (Eigen::Index k = l + 1; k < n; ++k) {
      double v = (x.row(k) - x.row(l)).norm();
      if (g != ScTransform::identity) v = -std::expm1(-v);
      d(k, l) = v;
      d(l, k) = v;
    }
  }
  return d;
}

inline Matrix double_center(const Matrix& a) {
  const Vector row = a.rowwise().mean();
  const Vector col = a.colwise().mean().transpose();
  const double all = a.mean();
  Matrix c = a;
  c.colwise() -= row;
  c.rowwise() -= col.transpose();
  c.array() += all;
  return c;
}

// sqrt(cross / sqrt(xx * yy)), or 0 when either self term vanishes.
inline double normalized_root(double cross, double xx, double yy) {
  if (!(xx > 0.0) || !(yy > 0.0)) return 0.0;
  const double r = std::max(cross, 0.0) / std::sqrt(xx * yy);
  return std::sqrt(r);
}

inline double pearson_abs(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return 0.0;
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) return 0.0;
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) return 0.0;
  return std::min(1.0, std::abs(sxy / std::sqrt(sxx * syy)));
}

/// Prepared response side of one measure: built once per response, then
/// applied to every feature block. score() is const and thread-safe.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual double score(const Matrix& xb) const = 0;
};

class PearsonScorer final : public Scorer {
 public:
  explicit PearsonScorer(const Matrix& y) : y_(column(y)) {}
  double score(const Matrix& xb) const override { return pearson_abs(column(xb), y_); }

 private:
  std::vector<double> y_;
};

class KendallScorer final : public Scorer {
 public:
  explicit KendallScorer(const Matrix& y) : y_(column(y)) {}
  double score(const Matrix& xb) const override {
    const auto x = column(xb);
    const std::size_t n = x.size();
    double s = 0.0, tx = 0.0, ty = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = x[i] - x[j];
        const double dy = y_[i] - y_[j];
        if (dx == 0.0) tx += 1.0;
        if (dy == 0.0) ty += 1.0;
        s += static_cast<double>((dx > 0) - (dx < 0)) * static_cast<double>((dy > 0) - (dy < 0));
      }
    const double n0 = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    const double den = (n0 - tx) * (n0 - ty);
    if (!(den > 0.0)) return 0.0;
    return std::min(1.0, std::abs(s) / std::sqrt(den));
  }

 private:
  std::vector<double> y_;
};

// Distance correlation with an optional bounded transform of the distances
// (identity gives plain distance correlation).
class DcorScorer final : public Scorer {
 public:
  DcorScorer(const Matrix& y, ScTransform g) : g_(g) {
    centered_y_ = double_center(pairwise_distances(prepare(y), g_));
    const double n2 = static_cast<double>(y.rows()) * static_cast<double>(y.rows());
    yy_ = centered_y_.squaredNorm() / n2;
  }

  double score(const Matrix& xb) const override {
    const Eigen::Index n = xb.rows();
    const Matrix a = pairwise_distances(prepare(xb), g_);
    // centered_y_ has zero row and column sums, so the cross term needs no
    // centering of a.
    const double cross = a.cwiseProduct(centered_y_).sum();
    const Vector rows = a.rowwise().sum();
    const double total = rows.sum();
    const double nd = static_cast<double>(n);
    const double xx = a.squaredNorm() - 2.0 / nd * rows.squaredNorm() + total * total / (nd * nd);
    return normalized_root(cross / (nd * nd), xx / (nd * nd), yy_);
  }

 private:
  Matrix prepare(const Matrix& m) const {
    if (g_ != ScTransform::one_minus_exp_median) return m;
    std::vector<double> d;
    for (Eigen::Index l = 0; l < m.rows(); ++l)
      for (Eigen::Index k = l + 1; k < m.rows(); ++k) d.push_back((m.row(k) - m.row(l)).norm());
    if (d.empty()) return m;
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    const double med = d[d.size() / 2];
    return med > 0 ? Matrix(m / med) : m;
  }

  ScTransform g_;
  Matrix centered_y_;
  double yy_ = 0.0;
};

class MrdcScorer final : public Scorer {
 public:
  explicit MrdcScorer(const Matrix& y)
      : inner_(multivariate_rank(y), ScTransform::identity), y_constant_(rows_all_equal(y)) {}
  // Ranks of a constant block are an arbitrary grid, so degenerate inputs
  // short-circuit to zero like the other measures.
  double score(const Matrix& xb) const override {
    if (y_constant_ || rows_all_equal(xb)) return 0.0;
    return inner_.score(multivariate_rank(xb));
  }

 private:
  DcorScorer inner_;
  bool y_constant_ = false;
};

// Projection correlation.
//
// For anchor r the angle kernel is a_r(k, l) = arccos of the cosine between
// x_k - x_r and x_l - x_r (0 if either difference vanishes). With both kernels
// double-centred per anchor, cross = sum_r sum_{k,l} A_r B_r / n^3.
class PcScorer final : public Scorer {
 public:
  PcScorer(const Matrix& y, std::size_t x_dims) : y_(y) {
    const Eigen::Index n = y.rows();
    univariate_ = (y.cols() == 1 && x_dims == 1);
    if (univariate_) {
      yy_ = univariate_cross(column(y), column(y));
      return;
    }
    const std::size_t nn = static_cast<std::size_t>(n);
    centered_.assign(nn * nn * nn, 0.0);
    double acc = 0.0;
    Matrix unit, a;
    for (std::size_t r = 0; r < nn; ++r) {
      angle_kernel(y, r, unit, a);
      symmetrize(a);
      Eigen::Map<Matrix> bm(&centered_[r * nn * nn], n, n);
      bm = double_center(a);
      acc += bm.squaredNorm();
    }
    yy_ = acc / std::pow(static_cast<double>(n), 3);
  }

  double score(const Matrix& xb) const override {
    if (univariate_) {
      const auto x = column(xb);
      return normalized_root(univariate_cross(x, column(y_)), univariate_cross(x, x), yy_);
    }
    const Eigen::Index n = xb.rows();
    const double nd = static_cast<double>(n);
    Matrix unit, a;
    Vector rows(n);
    double cross = 0.0, xx = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      angle_kernel(xb, static_cast<std::size_t>(r), unit, a);
      // Only the strict upper triangle of a is filled. The stored B_r is
      // already double-centred, so a needs no centring for the cross term.
      const double* b = &centered_[static_cast<std::size_t>(r * n * n)];
      rows.setZero();
      double cross_r = 0.0, sq_r = 0.0;
      for (Eigen::Index l = 1; l < n; ++l) {
        const auto head = a.col(l).head(l);
        cross_r += head.dot(Eigen::Map<const Vector>(b + l * n, l));
        sq_r += head.squaredNorm();
        rows(l) += head.sum();
        rows.head(l) += head;
      }
      const double tot = rows.sum();
      cross += 2.0 * cross_r;
      xx += 2.0 * sq_r - 2.0 / nd * rows.squaredNorm() + tot * tot / (nd * nd);
    }
    const double n3 = std::pow(static_cast<double>(n), 3);
    return normalized_root(cross / n3, xx / n3, yy_);
  }

 private:
  // a(k, l) = angle between x_k - x_r and x_l - x_r for k < l (strict upper
  // triangle only; the kernel is symmetric with a zero diagonal), via the Gram
  // matrix of the unit differences and a vectorised arccos over column heads.
  static void angle_kernel(const Matrix& x, std::size_t r, Matrix& unit, Matrix& a) {
    const Eigen::Index n = x.rows();
    const auto ri = static_cast<Eigen::Index>(r);
    unit = x.rowwise() - x.row(ri);
    std::vector<Eigen::Index> degenerate;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double norm2 = unit.row(k).squaredNorm();
      if (norm2 == 0.0) {
        degenerate.push_back(k);
      } else if (x.cols() == 1) {
        // Exact +-1: a rounded 1/|diff| would put the cosine a hair off +-1,
        // where arccos amplifies the error to ~1e-8.
        unit(k, 0) = unit(k, 0) > 0.0 ? 1.0 : -1.0;
      } else {
        unit.row(k) /= std::sqrt(norm2);
      }
    }
    a.resize(n, n);
    a.triangularView<Eigen::StrictlyUpper>() = unit * unit.transpose();
    for (Eigen::Index l = 1; l < n; ++l) acos_inplace(&a(0, l), l);
    for (auto k : degenerate) {
      a.col(k).head(k).setZero();
      for (Eigen::Index l = k + 1; l < n; ++l) a(k, l) = 0.0;
    }
  }

  static void symmetrize(Matrix& a) {
    a.diagonal().setZero();
    a.triangularView<Eigen::StrictlyLower>() = a.transpose();
  }

  // Scalar x and y: the angle is pi when x_k, x_l straddle the anchor and 0
  // otherwise, so every anchor reduces to sign-quadrant counts. Returns the
  // (unnormalised by n^3) V-statistic cross term divided by n^3.
  static double univariate_cross(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    constexpr double pi = std::numbers::pi;
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      // counts[sx + 1][sy + 1]
      double counts[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
      for (std::size_t k = 0; k < n; ++k) {
        const int sx = (x[k] > x[r]) - (x[k] < x[r]);
        const int sy = (y[k] > y[r]) - (y[k] < y[r]);
        counts[sx + 1][sy + 1] += 1.0;
      }
      const double xp = counts[2][0] + counts[2][1] + counts[2][2];
      const double xm = counts[0][0] + counts[0][1] + counts[0][2];
      const double yp = counts[0][2] + counts[1][2] + counts[2][2];
      const double ym = counts[0][0] + counts[1][0] + counts[2][0];
      const double t1 = 2.0 * pi * pi * (counts[2][2] * counts[0][0] + counts[2][0] * counts[0][2]);
      // sum_k rowA_k rowB_k with rowA_k = pi * #(opposite side in x)
      const double rr = pi * pi * (counts[2][2] * xm * ym + counts[2][0] * xm * yp + counts[0][2] * xp * ym +
                                   counts[0][0] * xp * yp);
      const double ta = 2.0 * pi * xp * xm;
      const double tb = 2.0 * pi * yp * ym;
      const double nd = static_cast<double>(n);
      total += t1 - 2.0 / nd * rr + ta * tb / (nd * nd);
    }
    return total / std::pow(static_cast<double>(n), 3);
  }

  Matrix y_;
  bool univariate_ = false;
  std::vector<double> centered_;
  double yy_ = 0.0;
};

// Ball correlation via per-centre rank transforms.
//
// For centre i, up_rank(k) = #{k' : |z_k' - z_i| <= |z_k - z_i|}, so the ball
// indicator 1{|z_k - z_i| <= |z_j - z_i|} equals 1{up_rank(k) <= up_rank(j)}.
// The joint indicator count becomes a 2-d dominance count, answered with a
// Fenwick tree in O(n log n) per centre.
class BcorScorer final : public Scorer {
 public:
  explicit BcorScorer(const Matrix& y) : n_(static_cast<std::size_t>(y.rows())) {
    y_ranks_.resize(n_ * n_);
    std::vector<double> dist(n_);
    std::vector<std::uint32_t> r(n_);
    std::vector<std::size_t> order(n_);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      distances_from(y, i, dist);
      up_ranks(dist, order, r);
      std::copy(r.begin(), r.end(), y_ranks_.begin() + static_cast<std::ptrdiff_t>(i * n_));
      for (std::size_t j = 0; j < n_; ++j) {
        const double dj = static_cast<double>(r[j]) / static_cast<double>(n_);
        acc += (dj - dj * dj) * (dj - dj * dj);
      }
    }
    yy_ = acc / (static_cast<double>(n_) * static_cast<double>(n_));
  }

  double score(const Matrix& xb) const override {
    const std::size_t n = n_;
    std::vector<double> dist(n);
    std::vector<std::uint32_t> rx(n), tree(n + 1);
    std::vector<std::size_t> order(n);
    const double nd = static_cast<double>(n);
    double cross = 0.0, xx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      distances_from(xb, i, dist);
      up_ranks(dist, order, rx);
      const std::uint32_t* ry = &y_ranks_[i * n];
      // order is sorted by x-distance from centre i; walk tie groups.
      std::fill(tree.begin(), tree.end(), 0u);
      for (std::size_t g = 0; g < n;) {
        std::size_t h = g;
        while (h < n && rx[order[h]] == rx[order[g]]) {
          for (std::size_t pos = ry[order[h]]; pos <= n; pos += pos & (~pos + 1)) ++tree[pos];
          ++h;
        }
        for (std::size_t t = g; t < h; ++t) {
          const std::size_t j = order[t];
          std::uint32_t cnt = 0;
          for (std::size_t pos = ry[j]; pos > 0; pos -= pos & (~pos + 1)) cnt += tree[pos];
          const double dxy = static_cast<double>(cnt) / nd;
          const double dx = static_cast<double>(rx[j]) / nd;
          const double dy = static_cast<double>(ry[j]) / nd;
          cross += (dxy - dx * dy) * (dxy - dx * dy);
          xx += (dx - dx * dx) * (dx - dx * dx);
        }
        g = h;
      }
    }
    return normalized_root(cross / (nd * nd), xx / (nd * nd), yy_);
  }

 private:
  static void distances_from(const Matrix& z, std::size_t i, std::vector<double>& dist) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index k = 0; k < z.rows(); ++k) dist[static_cast<std::size_t>(k)] = (z.row(k) - z.row(ii)).norm();
  }

  static void up_ranks(const std::vector<double>& dist, std::vector<std::size_t>& order, std::vector<std::uint32_t>& r) {
    const std::size_t n = dist.size();
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    });
    for (std::size_t t = 0; t < n;) {
      std::size_t h = t;
      while (h + 1 < n && dist[order[h + 1]] == dist[order[t]]) ++h;
      for (std::size_t s = t; s <= h; ++s) r[order[s]] = static_cast<std::uint32_t>(h + 1);
      t = h + 1;
    }
  }

  std::size_t n_;
  std::vector<std::uint32_t> y_ranks_;
  double yy_ = 0.0;
};

inline Matrix wd_preprocess(const Matrix& m, WdPreprocess p) {
  return p == WdPreprocess::rank ? multivariate_rank(m) : standardize(m);
}

/// Optimal-transport cost between the joint empirical measure and the product
/// of its marginals, under the squared Euclidean cost on (x, y).
inline double joint_product_cost(const Matrix& dx, const Matrix& dy, const MeasureOptions& opt) {
  const Eigen::Index n = dx.rows();
  const double pairs = std::pow(static_cast<double>(n), 3);
  const bool exact = opt.wd_solver == WdSolver::exact ||
                     (opt.wd_solver == WdSolver::automatic && pairs <= static_cast<double>(opt.wd_exact_pair_limit));
  auto explicit_cost = [&] {
    Matrix c(n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) c.col(i * n + j) = dx.col(i) + dy.col(j);
    return c;
  };
  const Vector a = Vector::Constant(n, 1.0 / static_cast<double>(n));
  const Vector b = Vector::Constant(n * n, 1.0 / static_cast<double>(n * n));
  if (exact) return ot_exact(a, b, explicit_cost()).cost;

  SinkhornOptions so;
  so.epsilon = opt.wd_epsilon_factor * (dx.mean() + dy.mean());
  so.tol = opt.wd_tol;
  so.max_iter = opt.wd_max_iter;
  try {
    return sinkhorn_joint_product(dx, dy, so).cost;
  } catch (const ConvergenceError&) {
    // Log-domain retry on the explicit problem when it fits in memory.
    if (pairs > 2e7) throw;
    return sinkhorn(a, b, explicit_cost(), so).cost;
  }
}

class WdScorer final : public Scorer {
 public:
  WdScorer(const Matrix& y, const MeasureOptions& opt) : opt_(opt) {
    y_constant_ = rows_all_equal(y);
    dy_ = squared_distances(wd_preprocess(y, opt.wd_preprocess), wd_preprocess(y, opt.wd_preprocess));
  }

  double score(const Matrix& xb) const override {
    if (y_constant_ || rows_all_equal(xb)) return 0.0;
    const Matrix xp = wd_preprocess(xb, opt_.wd_preprocess);
    return joint_product_cost(squared_distances(xp, xp), dy_, opt_);
  }

 private:
  MeasureOptions opt_;
  bool y_constant_ = false;
  Matrix dy_;
};

inline std::unique_ptr<Scorer> make_scorer(MeasureKind kind, const Matrix& y, std::size_t x_dims,
                                           const MeasureOptions& opt) {
  switch (kind) {
    case MeasureKind::SIS: return std::make_unique<PearsonScorer>(y);
    case MeasureKind::SIRS: return std::make_unique<PearsonScorer>(scaled_mid_ranks(y));
    case MeasureKind::RRCS: return std::make_unique<KendallScorer>(y);
    case MeasureKind::DC_SIS: return std::make_unique<DcorScorer>(y, ScTransform::identity);
    case MeasureKind::DC_RoSIS: return std::make_unique<DcorScorer>(scaled_mid_ranks(y), ScTransform::identity);
    case MeasureKind::MrDc_SIS: return std::make_unique<MrdcScorer>(y);
    case MeasureKind::SC_SIS: return std::make_unique<DcorScorer>(y, opt.sc_transform);
    case MeasureKind::PC_Screen: return std::make_unique<PcScorer>(y, x_dims);
    case MeasureKind::BCor_SIS: return std::make_unique<BcorScorer>(y);
    case MeasureKind::WD_Screen: return std::make_unique<WdScorer>(y, opt);
  }
  throw ConfigError("unknown method");
}

inline void check_pair(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows())
    throw ArgumentError("predictor has " + std::to_string(x.rows()) + " rows but response has " +
                        std::to_string(y.rows()));
  if (x.rows() < 2) throw ArgumentError("dependence measures need at least 2 subjects");
}

inline void check_scalar(const Matrix& x, const Matrix& y, const char* name) {
  check_pair(x, y);
  if (x.cols() != 1 || y.cols() != 1) throw ArgumentError(std::string(name) + " needs scalar predictor and response");
}

}  // namespace detail

// --- single-pair utilities ------------------------------------------------

/// |Pearson correlation| (SIS); 0 if either vector is constant.
inline double pearson_utility(std::span<const double> x, std::span<const double> y) {
  const Matrix xm = detail::as_column(x), ym = detail::as_column(y);
  detail::check_scalar(xm, ym, "pearson_utility");
  return detail::pearson_abs(x, y);
}

/// |Pearson correlation| between x and the mid-ranks of y scaled by 1/n (SIRS).
inline double sirs_utility(std::span<const double> x, std::span<const double> y) {
  const Matrix xm = detail::as_column(x), ym = detail::as_column(y);
  detail::check_scalar(xm, ym, "sirs_utility");
  return detail::PearsonScorer(detail::scaled_mid_ranks(ym)).score(xm);
}

/// |Kendall tau-b| (RRCS).
inline double kendall_utility(std::span<const double> x, std::span<const double> y) {
  const Matrix xm = detail::as_column(x), ym = detail::as_column(y);
  detail::check_scalar(xm, ym, "kendall_utility");
  return detail::KendallScorer(ym).score(xm);
}

/// Sample (V-statistic) distance correlation (DC-SIS).
inline double dcor_utility(const Matrix& xb, const Matrix& yb) {
  detail::check_pair(xb, yb);
  return detail::DcorScorer(yb, ScTransform::identity).score(xb);
}

/// Distance correlation between x and the scaled mid-ranks of y (DC-RoSIS).
inline double dc_rosis_utility(std::span<const double> x, std::span<const double> y) {
  const Matrix xm = detail::as_column(x), ym = detail::as_column(y);
  detail::check_scalar(xm, ym, "dc_rosis_utility");
  return detail::DcorScorer(detail::scaled_mid_ranks(ym), ScTransform::identity).score(xm);
}

/// Distance correlation of the optimal-transport ranks of both blocks (MrDc-SIS).
inline double mrdc_utility(const Matrix& xb, const Matrix& yb) {
  detail::check_pair(xb, yb);
  return detail::MrdcScorer(yb).score(xb);
}

/// Distance correlation with distances mapped through `g` before centring (SC-SIS).
inline double sc_utility(const Matrix& xb, const Matrix& yb, ScTransform g = ScTransform::one_minus_exp_median) {
  detail::check_pair(xb, yb);
  return detail::DcorScorer(yb, g).score(xb);
}

/// Sample projection correlation (PC-Screen).
inline double pc_utility(const Matrix& xb, const Matrix& yb) {
  detail::check_pair(xb, yb);
  return detail::PcScorer(yb, static_cast<std::size_t>(xb.cols())).score(xb);
}

/// Sample ball correlation (BCor-SIS).
inline double bcor_utility(const Matrix& xb, const Matrix& yb) {
  detail::check_pair(xb, yb);
  return detail::BcorScorer(yb).score(xb);
}

/// Squared 2-Wasserstein distance between the joint empirical measure and the
/// product of the empirical marginals, after preprocessing (WD-Screen).
inline double wd_utility(const Matrix& xb, const Matrix& yb, const MeasureOptions& opt = {}) {
  detail::check_pair(xb, yb);
  return detail::WdScorer(yb, opt).score(xb);
}

inline void check_compatible(MeasureKind kind, std::size_t d, std::size_t q) {
  if (univariate_only(kind) && (d != 1 || q != 1))
    throw ConfigError("method " + to_string(kind) + " cannot handle multivariate predictors or responses (d = " +
                      std::to_string(d) + ", q = " + std::to_string(q) + "; it needs d = q = 1)");
}

inline double utility(MeasureKind kind, const Matrix& xb, const Matrix& yb, const MeasureOptions& opt = {}) {
  detail::check_pair(xb, yb);
  check_compatible(kind, static_cast<std::size_t>(xb.cols()), static_cast<std::size_t>(yb.cols()));
  return detail::make_scorer(kind, yb, static_cast<std::size_t>(xb.cols()), opt)->score(xb);
}

/// Utility of every feature block of x against y. Features are spread over
/// `threads` workers (0 = default); the result depends only on the inputs.
inline ScoreTable score_all(const PredictorArray& x, const ResponseBlock& y, MeasureKind kind,
                            const MeasureOptions& opt = {}, std::size_t threads = 1) {
  if (x.subjects() != y.subjects())
    throw ArgumentError("predictor array has " + std::to_string(x.subjects()) + " subjects but response has " +
                        std::to_string(y.subjects()));
  check_compatible(kind, x.platforms(), y.dims());
  const auto scorer = detail::make_scorer(kind, y.values(), x.platforms(), opt);
  ScoreTable table;
  table.method = kind;
  table.utilities.assign(x.features(), 0.0);
  parallel_for(x.features(), threads, [&](std::size_t j) { table.utilities[j] = scorer->score(feature_block(x, j)); });
  return table;
}

}  // namespace wdscreen
