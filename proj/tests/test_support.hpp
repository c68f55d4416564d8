#ifndef SSDF_TESTS_TEST_SUPPORT_HPP_
#define SSDF_TESTS_TEST_SUPPORT_HPP_

#include <cmath>

namespace ssdf::testing {

// Half-width of the normal-approximation binomial confidence interval.
// z = 2.5758 gives 99%.
inline double binomial_half_width(double p, double n, double z = 2.5758293035489) {
  return z * std::sqrt(p * (1.0 - p) / n);
}

inline double relative_error(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace ssdf::testing

#endif  // SSDF_TESTS_TEST_SUPPORT_HPP_
