#ifndef SSDF_OUTLIER_STATS_HPP_
#define SSDF_OUTLIER_STATS_HPP_

// Block outlier test statistics over sorted samples. All functions accept
// any Eigen vector expression and are scalar-generic.

#include <Eigen/Core>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace ssdf {

template <typename Derived>
bool is_sorted_ascending(const Eigen::DenseBase<Derived>& x) {
  for (Eigen::Index i = 1; i < x.size(); ++i)
    if (x(i) < x(i - 1)) return false;
  return true;
}

// Sum of squared deviations about the segment's own mean.
template <typename Derived>
typename Derived::Scalar centered_sum_of_squares(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0) return Scalar(0);
  const Scalar mean = x.sum() / static_cast<Scalar>(x.size());
  return (x.derived().array() - mean).square().sum();
}

namespace detail {

template <typename Derived>
void check_block_args(const Eigen::MatrixBase<Derived>& sorted, Eigen::Index t,
                      const char* what) {
  if (t < 0 || t >= sorted.size())
    throw std::invalid_argument(std::string(what) + ": need 0 <= t < N");
  if (!is_sorted_ascending(sorted))
    throw std::invalid_argument(std::string(what) + ": input not sorted ascending");
}

template <typename Derived>
typename Derived::Scalar block_ratio(const Eigen::MatrixBase<Derived>& sorted,
                                     Eigen::Index start, Eigen::Index kept,
                                     const char* what) {
  using Scalar = typename Derived::Scalar;
  const Scalar total = centered_sum_of_squares(sorted);
  if (!(total > Scalar(0)))
    throw std::domain_error(std::string(what) + ": zero-variance input");
  return centered_sum_of_squares(sorted.segment(start, kept)) / total;
}

}  // namespace detail

// Tietjen-Moore statistic for the t largest values: spread of the N - t
// smallest about their own mean over spread of all N.
template <typename Derived>
typename Derived::Scalar tm_upper_statistic(const Eigen::MatrixBase<Derived>& sorted,
                                            Eigen::Index t) {
  detail::check_block_args(sorted, t, "tm_upper_statistic");
  if (t == 0) return typename Derived::Scalar(1);
  return detail::block_ratio(sorted, 0, sorted.size() - t, "tm_upper_statistic");
}

// Mirror of tm_upper_statistic for the t smallest values.
template <typename Derived>
typename Derived::Scalar tm_lower_statistic(const Eigen::MatrixBase<Derived>& sorted,
                                            Eigen::Index t) {
  detail::check_block_args(sorted, t, "tm_lower_statistic");
  if (t == 0) return typename Derived::Scalar(1);
  return detail::block_ratio(sorted, t, sorted.size() - t, "tm_lower_statistic");
}

// Shapiro-Wilk W. coeffs holds the floor(N/2) antisymmetric weights for the
// largest order statistics, coeffs(0) pairing x(N-1) with x(0).
template <typename Derived, typename CoeffDerived>
typename Derived::Scalar sw_statistic(const Eigen::MatrixBase<Derived>& sorted,
                                      const Eigen::MatrixBase<CoeffDerived>& coeffs) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = sorted.size();
  if (coeffs.size() != n / 2)
    throw std::invalid_argument("sw_statistic: coefficient count must be floor(N/2)");
  if (!is_sorted_ascending(sorted))
    throw std::invalid_argument("sw_statistic: input not sorted ascending");
  const Scalar ss = centered_sum_of_squares(sorted);
  if (!(ss > Scalar(0))) throw std::domain_error("sw_statistic: zero-variance input");
  Scalar b(0);
  for (Eigen::Index j = 0; j < n / 2; ++j)
    b += static_cast<Scalar>(coeffs(j)) * (sorted(n - 1 - j) - sorted(j));
  return std::min(Scalar(1), b * b / ss);
}

}  // namespace ssdf

#endif  // SSDF_OUTLIER_STATS_HPP_
