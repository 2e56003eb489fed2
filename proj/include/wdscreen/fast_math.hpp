#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace wdscreen::detail {

namespace acos_coeff {
inline constexpr double pi = 3.14159265358979311600e+00;
inline constexpr double pio2_hi = 1.57079632679489655800e+00;
inline constexpr double pio2_lo = 6.12323399573676603587e-17;
inline constexpr double pS0 = 1.66666666666666657415e-01;
inline constexpr double pS1 = -3.25565818622400915405e-01;
inline constexpr double pS2 = 2.01212532134862925881e-01;
inline constexpr double pS3 = -4.00555345006794114027e-02;
inline constexpr double pS4 = 7.91534994289814532176e-04;
inline constexpr double pS5 = 3.47933107596021167570e-05;
inline constexpr double qS1 = -2.40339491173441421878e+00;
inline constexpr double qS2 = 2.02094576023350569471e+00;
inline constexpr double qS3 = -6.88283971605453293030e-01;
inline constexpr double qS4 = 7.70381505559019352791e-02;
}  // namespace acos_coeff

// arccos from the fdlibm rational approximation of asin; a few ulp on [-1, 1].
inline double fast_acos(double x) {
  using namespace acos_coeff;
  const double a = std::fabs(x);
  const bool small = a < 0.5;
  const double z_near = x * x;
  const double z_far = (1.0 - a) * 0.5;
  const double z = small ? z_near : z_far;
  const double p = z * (pS0 + z * (pS1 + z * (pS2 + z * (pS3 + z * (pS4 + z * pS5)))));
  const double q = 1.0 + z * (qS1 + z * (qS2 + z * (qS3 + z * qS4)));
  const double r = p / q;
  const double s = std::sqrt(z);
  const double near = pio2_hi - (x - (pio2_lo - x * r));
  const double big = 2.0 * (s + s * r);
  const double mirrored = pi - big + 2.0 * pio2_lo;
  const double far = x > 0.0 ? big : mirrored;
  return small ? near : far;
}

// Same formula over a whole buffer, clamped to [-1, 1] first. The loop is
// branch-free after if-conversion; it vectorises when the compiler may treat
// FP selects as non-trapping (-fno-trapping-math -fno-math-errno, set on the
// wdscreen CMake target).
inline void acos_inplace(double* data, Eigen::Index count) {
  for (Eigen::Index t = 0; t < count; ++t) {
    const double hi = data[t] > 1.0 ? 1.0 : data[t];
    data[t] = fast_acos(hi < -1.0 ? -1.0 : hi);
  }
}

}  // namespace wdscreen::detail
