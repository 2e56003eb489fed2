#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wdscreen/error.hpp"

namespace wdscreen {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// d x n x p predictor array: d platforms, n subjects, p features.
///
/// Storage is platform-major, then subject row, then feature column, so the
/// value for (platform k, subject i, feature j) lives at (k * n + i) * p + j.
/// Indices are zero-based throughout the library.
class PredictorArray {
 public:
  PredictorArray() = default;

  PredictorArray(std::size_t platforms, std::size_t subjects, std::size_t features)
      : d_(platforms), n_(subjects), p_(features), values_(platforms * subjects * features, 0.0) {
    if (d_ == 0 || n_ == 0 || p_ == 0)
      throw ArgumentError("PredictorArray extents must all be >= 1 (got " + extents_string() + ")");
  }

  PredictorArray(std::size_t platforms, std::size_t subjects, std::size_t features,
                 std::vector<double> values)
      : d_(platforms), n_(subjects), p_(features), values_(std::move(values)) {
    if (d_ == 0 || n_ == 0 || p_ == 0)
      throw ArgumentError("PredictorArray extents must all be >= 1 (got " + extents_string() + ")");
    if (values_.size() != d_ * n_ * p_)
      throw ArgumentError("PredictorArray value count does not match " + extents_string());
    for (double v : values_)
      if (!std::isfinite(v)) throw ArgumentError("PredictorArray values must be finite");
  }

  std::size_t platforms() const noexcept { return d_; }
  std::size_t subjects() const noexcept { return n_; }
  std::size_t features() const noexcept { return p_; }

  double operator()(std::size_t k, std::size_t i, std::size_t j) const {
    return values_[(k * n_ + i) * p_ + j];
  }
  double& operator()(std::size_t k, std::size_t i, std::size_t j) {
    return values_[(k * n_ + i) * p_ + j];
  }

  const std::vector<double>& values() const noexcept { return values_; }

  /// Copies platform k into an n x p matrix.
  Matrix platform(std::size_t k) const {
    if (k >= d_) throw IndexError("platform index " + std::to_string(k) + " out of range");
    Matrix out(n_, p_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < p_; ++j) out(i, j) = (*this)(k, i, j);
    return out;
  }

  void set_platform(std::size_t k, const Matrix& m) {
    if (k >= d_) throw IndexError("platform index " + std::to_string(k) + " out of range");
    if (static_cast<std::size_t>(m.rows()) != n_ || static_cast<std::size_t>(m.cols()) != p_)
      throw ArgumentError("platform matrix must be n x p");
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < p_; ++j) (*this)(k, i, j) = m(i, j);
  }

  std::string extents_string() const {
    return std::to_string(d_) + "x" + std::to_string(n_) + "x" + std::to_string(p_);
  }

  bool operator==(const PredictorArray&) const = default;

 private:
  std::size_t d_ = 0;
  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<double> values_;
};

/// n x q response matrix (q = 1 for a scalar response).
class ResponseBlock {
 public:
  ResponseBlock() = default;

  explicit ResponseBlock(Matrix values) : values_(std::move(values)) {
    if (values_.rows() == 0 || values_.cols() == 0)
      throw ArgumentError("ResponseBlock must be at least 1x1");
    if (!values_.allFinite()) throw ArgumentError("ResponseBlock values must be finite");
  }

  std::size_t subjects() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t dims() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const Matrix& values() const noexcept { return values_; }

 private:
  Matrix values_;
};

/// Feature j as an n x d block: row i holds subject i across all platforms.
inline Matrix feature_block(const PredictorArray& x, std::size_t j) {
  if (j >= x.features())
    throw IndexError("feature index " + std::to_string(j) + " out of range for " + x.extents_string());
  const std::size_t n = x.subjects();
  const std::size_t d = x.platforms();
  Matrix block(n, d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t i = 0; i < n; ++i) block(i, k) = x(k, i, j);
  return block;
}

/// Column-wise z-scores with the 1/(n-1) standard deviation. Constant columns
/// map to zeros.
inline Matrix standardize(const Matrix& m) {
  const Eigen::Index n = m.rows();
  Matrix out(n, m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const auto col = m.col(c);
    if (n < 2 || col.minCoeff() == col.maxCoeff()) {
      out.col(c).setZero();
      continue;
    }
    const double mean = col.mean();
    const double ss = (col.array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    out.col(c) = (col.array() - mean) / sd;
  }
  return out;
}

/// True when every row of m equals the first row.
inline bool rows_all_equal(const Matrix& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    if (m.col(c).minCoeff() != m.col(c).maxCoeff()) return false;
  return true;
}

enum class Study { S1, S2, S3, S4 };

inline std::string to_string(Study s) {
  switch (s) {
    case Study::S1: return "S1";
    case Study::S2: return "S2";
    case Study::S3: return "S3";
    case Study::S4: return "S4";
  }
  return "?";
}

inline Study parse_study(const std::string& s) {
  if (s == "S1") return Study::S1;
  if (s == "S2") return Study::S2;
  if (s == "S3") return Study::S3;
  if (s == "S4") return Study::S4;
  throw ConfigError("unknown study '" + s + "' (expected S1, S2, S3 or S4)");
}

struct Marginal {
  enum class Kind { gaussian, power, pareto };
  Kind kind = Kind::gaussian;
  double shape = 1.0;  // power a, or pareto shape
  double mode = 1.0;   // pareto only

  static Marginal gaussian() { return {}; }
  static Marginal power(double a) { return {Kind::power, a, 1.0}; }
  static Marginal pareto(double shape, double mode) { return {Kind::pareto, shape, mode}; }
};

/// Parameters of one simulation study. Defaults reproduce the published
/// designs; see SimConfig::for_study.
struct SimConfig {
  Study study = Study::S1;
  std::size_t n = 200;
  std::size_t p = 2000;
  std::size_t q = 1;
  std::size_t d = 1;
  double ar_coefficient = 0.5;
  double beta_low = 2.0;
  double beta_high = 5.0;
  // Feature marginal for S2 and the two power platforms of S3/S4.
  double power_shape = 5.0;
  // First platform of S3/S4.
  double pareto_shape = 10.0;
  double pareto_mode = 1.0;
  std::size_t replicates = 200;
  std::uint64_t base_seed = 20240601;
  double noise_sd = 1.0;
  // S3/S4: draw one set of platform ids shared by the three active responses
  // instead of redrawing per response coordinate.
  bool shared_platform_ids = false;

  static SimConfig for_study(Study s) {
    SimConfig c;
    c.study = s;
    switch (s) {
      case Study::S1:
        break;
      case Study::S2:
        c.beta_low = 1.0;
        c.beta_high = 2.0;
        break;
      case Study::S3:
      case Study::S4:
        c.d = 3;
        c.q = 10;
        c.beta_low = 1.0;
        c.beta_high = 2.0;
        break;
    }
    return c;
  }

  bool multivariate() const { return study == Study::S3 || study == Study::S4; }

  void validate() const {
    if (!(beta_low < beta_high)) throw ConfigError("beta_low must be < beta_high");
    if (!(power_shape > 0.0)) throw ConfigError("power shape must be > 0");
    if (!(pareto_shape > 1.0)) throw ConfigError("pareto shape must be > 1");
    if (!(pareto_mode > 0.0)) throw ConfigError("pareto mode must be > 0");
    if (!(ar_coefficient > -1.0 && ar_coefficient < 1.0))
      throw ConfigError("ar_coefficient must lie in (-1, 1)");
    if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd must be >= 0");
    if (n < 4) throw ConfigError("n must be >= 4");
    if (multivariate()) {
      if (p < 102) throw ConfigError("study " + to_string(study) + " needs p >= 102 (got " + std::to_string(p) + ")");
      if (d != 3) throw ConfigError("study " + to_string(study) + " uses d = 3 platforms");
      if (q < 3) throw ConfigError("study " + to_string(study) + " needs q >= 3");
    } else {
      if (p < 13) throw ConfigError("study " + to_string(study) + " needs p >= 13 (got " + std::to_string(p) + ")");
      if (d != 1 || q != 1) throw ConfigError("study " + to_string(study) + " uses d = q = 1");
    }
  }
};

/// A true (active) feature. `platforms` records, per active response
/// coordinate, which platform carried the signal (empty for d = 1 studies).
struct TrueFeature {
  std::size_t feature = 0;
  std::vector<std::size_t> platforms;

  bool operator==(const TrueFeature&) const = default;
};

struct TrueSet {
  std::vector<TrueFeature> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }

  std::vector<std::size_t> features() const {
    std::vector<std::size_t> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.feature);
    return out;
  }

  void check_within(const PredictorArray& x) const {
    for (const auto& e : entries) {
      if (e.feature >= x.features()) throw IndexError("true feature index out of range");
      for (auto k : e.platforms)
        if (k >= x.platforms()) throw IndexError("true platform index out of range");
    }
  }
};

}  // namespace wdscreen
