#include "ssdf/estimators.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace ssdf {

namespace {

// Index (into the gap sequence) of the largest positive successive gap,
// preferring the highest position on ties; -1 when none is positive.
Index largest_gap_position(const Eigen::VectorXd& sorted) {
  Index best = -1;
  double best_gap = 0.0;
  for (Index k = 0; k + 1 < sorted.size(); ++k) {
    const double gap = sorted[k + 1] - sorted[k];
    if (gap > 0.0 && gap >= best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return best;
}

Eigen::VectorXd sorted_copy(const Eigen::VectorXd& data) {
  Eigen::VectorXd s = data;
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<Index> sorted_indices(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// One direction of the modified largest gap over `members` (original
// indices). When `mirror` is set the data is negated so that the lower tail
// becomes the upper one.
void mlg_pass(const Eigen::VectorXd& data, std::vector<Index> members, bool mirror,
              BlockTest test, CriticalValueTable& table, double alpha, Index cap,
              MlgResult& result) {
  const double sign = mirror ? -1.0 : 1.0;
  std::stable_sort(members.begin(), members.end(),
                   [&](Index a, Index b) { return sign * data[a] < sign * data[b]; });

  while (static_cast<Index>(members.size()) >= 4) {
    const Index n = static_cast<Index>(members.size());
    Eigen::VectorXd current(n);
    for (Index i = 0; i < n; ++i) current[i] = sign * data[members[static_cast<std::size_t>(i)]];

    MlgRound round{partition_upper_half(current), {}};
    const Index block = round.partition.right_of_gap.size();
    if (block == 0) break;
    if (static_cast<Index>(result.outliers.size()) + block > cap) break;

    OutlierVerdict& v = round.verdict;
    v.direction = mirror ? Direction::Lower : Direction::Upper;
    v.t = block;
    v.suspected_indices.assign(members.end() - block, members.end());
    std::sort(v.suspected_indices.begin(), v.suspected_indices.end());
    if (test == BlockTest::TM) {
      v.statistic = tm_upper_statistic(current, block);
      v.critical_value = table.value(mirror ? CriticalKind::TmLowerGap : CriticalKind::TmUpperGap,
                                     n, block, alpha);
    } else {
      v.statistic = sw_statistic(current, sw_coefficients(n));
      v.critical_value = table.value(CriticalKind::SwGap, n, block, alpha);
    }
    v.is_outlier_block = v.statistic < v.critical_value;
    const bool rejected = v.is_outlier_block;
    result.rounds.push_back(std::move(round));
    if (!rejected) break;

    const auto& block_indices = result.rounds.back().verdict.suspected_indices;
    result.outliers.insert(result.outliers.end(), block_indices.begin(), block_indices.end());
    members.resize(static_cast<std::size_t>(n - block));
  }
}

std::vector<Index> all_indices(Index n) {
  std::vector<Index> v(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

void require_min_size(const Eigen::VectorXd& data, Index min, const char* what) {
  if (data.size() < min)
    throw std::invalid_argument(std::string(what) + ": need N >= " + std::to_string(min));
}

}  // namespace

CountEstimate kmeans_estimate(const Eigen::VectorXd& data) {
  require_min_size(data, 2, "kmeans_estimate");
  const std::vector<Index> order = argsort(data);
  const Eigen::VectorXd sorted = gather(data, order);
  const Index n = sorted.size();
  if (sorted[n - 1] == sorted[0]) return {};

  // The optimal 1-D two-means partition is a contiguous split of the sorted
  // data, so scanning every split point gives the global optimum.
  Index best_split = 1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (Index k = 1; k < n; ++k) {
    const double cost = centered_sum_of_squares(sorted.head(k)) +
                        centered_sum_of_squares(sorted.tail(n - k));
    if (cost < best_cost) {
      best_cost = cost;
      best_split = k;
    }
  }
  const bool upper_is_smaller = (n - best_split) <= best_split;
  CountEstimate estimate;
  if (upper_is_smaller) {
    estimate.suspected.assign(order.begin() + best_split, order.end());
  } else {
    estimate.suspected.assign(order.begin(), order.begin() + best_split);
  }
  estimate.suspected = sorted_indices(std::move(estimate.suspected));
  estimate.t = static_cast<Index>(estimate.suspected.size());
  return estimate;
}

Index largest_gap_upper(const Eigen::VectorXd& data) {
  require_min_size(data, 2, "largest_gap_upper");
  const Eigen::VectorXd sorted = sorted_copy(data);
  const Index pos = largest_gap_position(sorted);
  return pos < 0 ? 0 : sorted.size() - 1 - pos;
}

Index largest_gap_lower(const Eigen::VectorXd& data) {
  require_min_size(data, 2, "largest_gap_lower");
  return largest_gap_upper(-data);
}

GapPartition partition_upper_half(const Eigen::VectorXd& sorted) {
  if (!is_sorted_ascending(sorted))
    throw std::invalid_argument("partition_upper_half: input not sorted ascending");
  const Index n = sorted.size();
  const Index upper = n / 2;
  const Index lower = n - upper;

  GapPartition p;
  p.sorted_data = sorted;
  p.lower_half = sorted.head(lower);
  p.upper_half = sorted.tail(upper);
  const Index k = largest_gap_position(p.upper_half);
  const Index left = k < 0 ? upper : k + 1;
  p.gap_position = k < 0 ? -1 : lower + k;
  p.left_of_gap = p.upper_half.head(left);
  p.right_of_gap = p.upper_half.tail(upper - left);
  p.retained.resize(lower + left);
  p.retained << p.lower_half, p.left_of_gap;
  return p;
}

std::vector<Index> HalfGapResult::outliers() const {
  std::vector<Index> out;
  if (upper.is_outlier_block)
    out.insert(out.end(), upper.suspected_indices.begin(), upper.suspected_indices.end());
  if (lower.is_outlier_block)
    out.insert(out.end(), lower.suspected_indices.begin(), lower.suspected_indices.end());
  return sorted_indices(std::move(out));
}

HalfGapResult largest_gap_bidirectional(const Eigen::VectorXd& data, BlockTest test,
                                        CriticalValueTable& table, double alpha) {
  require_min_size(data, test == BlockTest::SW ? 6 : 4, "largest_gap_bidirectional");
  const Index n = data.size();
  const std::vector<Index> order = argsort(data);
  const Eigen::VectorXd sorted = gather(data, order);
  const Index upper_size = n / 2;
  const Index lower_size = n - upper_size;
  const Eigen::VectorXd lower_half = sorted.head(lower_size);
  const Eigen::VectorXd upper_half = sorted.tail(upper_size);

  HalfGapResult r;
  r.t_upper = largest_gap_upper(upper_half);
  r.t_lower = largest_gap_lower(lower_half);

  r.upper.direction = Direction::Upper;
  r.upper.t = r.t_upper;
  r.upper.suspected_indices = sorted_indices({order.end() - r.t_upper, order.end()});
  r.lower.direction = Direction::Lower;
  r.lower.t = r.t_lower;
  r.lower.suspected_indices = sorted_indices({order.begin(), order.begin() + r.t_lower});

  if (r.t_upper > 0) {
    if (test == BlockTest::TM) {
      r.upper.statistic = tm_upper_statistic(upper_half, r.t_upper);
      r.upper.critical_value = table.value(CriticalKind::TmUpperHalf, n, r.t_upper, alpha);
    } else {
      r.upper.statistic = sw_statistic(upper_half, sw_coefficients(upper_size));
      r.upper.critical_value = table.value(CriticalKind::SwUpperHalf, n, r.t_upper, alpha);
    }
    r.upper.is_outlier_block = r.upper.statistic < r.upper.critical_value;
  }
  if (r.t_lower > 0) {
    if (test == BlockTest::TM) {
      r.lower.statistic = tm_lower_statistic(lower_half, r.t_lower);
      r.lower.critical_value = table.value(CriticalKind::TmLowerHalf, n, r.t_lower, alpha);
    } else {
      r.lower.statistic = sw_statistic(lower_half, sw_coefficients(lower_size));
      r.lower.critical_value = table.value(CriticalKind::SwLowerHalf, n, r.t_lower, alpha);
    }
    r.lower.is_outlier_block = r.lower.statistic < r.lower.critical_value;
  }
  return r;
}

Index MlgResult::rejection_rounds() const {
  return static_cast<Index>(std::count_if(rounds.begin(), rounds.end(), [](const MlgRound& r) {
    return r.verdict.is_outlier_block;
  }));
}

MlgResult mlg_upper(const Eigen::VectorXd& data, BlockTest test, CriticalValueTable& table,
                    double alpha) {
  require_min_size(data, 4, "mlg_upper");
  MlgResult result;
  mlg_pass(data, all_indices(data.size()), false, test, table, alpha, data.size() / 2, result);
  result.outliers = sorted_indices(std::move(result.outliers));
  return result;
}

MlgResult mlg_lower(const Eigen::VectorXd& data, BlockTest test, CriticalValueTable& table,
                    double alpha) {
  require_min_size(data, 4, "mlg_lower");
  MlgResult result;
  mlg_pass(data, all_indices(data.size()), true, test, table, alpha, data.size() / 2, result);
  result.outliers = sorted_indices(std::move(result.outliers));
  return result;
}

MlgResult mlg_bidirectional(const Eigen::VectorXd& data, BlockTest test,
                            CriticalValueTable& table, double alpha) {
  require_min_size(data, 4, "mlg_bidirectional");
  const Index cap = data.size() / 2;
  MlgResult result;
  std::vector<bool> removed(static_cast<std::size_t>(data.size()), false);
  auto remaining = [&] {
    std::vector<Index> members;
    for (Index i = 0; i < data.size(); ++i)
      if (!removed[static_cast<std::size_t>(i)]) members.push_back(i);
    return members;
  };
  for (;;) {
    const std::size_t before = result.outliers.size();
    for (bool mirror : {false, true}) {
      const std::size_t start = result.outliers.size();
      mlg_pass(data, remaining(), mirror, test, table, alpha, cap, result);
      for (std::size_t i = start; i < result.outliers.size(); ++i)
        removed[static_cast<std::size_t>(result.outliers[i])] = true;
    }
    if (result.outliers.size() == before) break;
  }
  result.outliers = sorted_indices(std::move(result.outliers));
  return result;
}

}  // namespace ssdf
