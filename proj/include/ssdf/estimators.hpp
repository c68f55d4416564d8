#ifndef SSDF_ESTIMATORS_HPP_
#define SSDF_ESTIMATORS_HPP_

#include <Eigen/Core>
#include <vector>

#include "ssdf/critical_table.hpp"
#include "ssdf/outlier_tests.hpp"

namespace ssdf {

// Estimated number of outliers and, where the estimator names them, which.
struct CountEstimate {
  Index t = 0;
  std::vector<Index> suspected;  // ascending sensor indices
};

// Optimal two-cluster split of scalar data. The smaller cluster is the
// suspected set; equal sizes favour the cluster with the larger mean.
// Constant data yields t = 0.
CountEstimate kmeans_estimate(const Eigen::VectorXd& data);

// Number of points beyond the largest successive gap of the data sorted
// ascending (upper) or descending (lower). Among equal maximal gaps the one
// nearest the extreme end wins, giving the smallest count. Constant data
// yields 0.
Index largest_gap_upper(const Eigen::VectorXd& data);
Index largest_gap_lower(const Eigen::VectorXd& data);

// One split of an ascending sample at its median (median kept in the lower
// half) and at the largest gap inside the upper half.
struct GapPartition {
  Eigen::VectorXd sorted_data;
  Eigen::VectorXd lower_half;
  Eigen::VectorXd upper_half;
  Index gap_position = -1;  // index in sorted_data of the last point before the gap
  Eigen::VectorXd left_of_gap;
  Eigen::VectorXd right_of_gap;
  Eigen::VectorXd retained;  // lower_half followed by left_of_gap
};

// right_of_gap is empty when the upper half has fewer than two points or no
// positive gap.
GapPartition partition_upper_half(const Eigen::VectorXd& sorted);

// Largest-gap estimate per half, each half tested on its own.
struct HalfGapResult {
  Index t_upper = 0;
  Index t_lower = 0;
  OutlierVerdict upper;
  OutlierVerdict lower;

  std::vector<Index> outliers() const;
};

HalfGapResult largest_gap_bidirectional(const Eigen::VectorXd& data, BlockTest test,
                                        CriticalValueTable& table, double alpha = 0.05);

struct MlgRound {
  GapPartition partition;
  OutlierVerdict verdict;  // indices refer to the original data
};

struct MlgResult {
  std::vector<Index> outliers;  // ascending
  std::vector<MlgRound> rounds;  // every tested block, the last one accepted or capped

  Index rejection_rounds() const;
};

// Modified largest gap: repeatedly strip the block beyond the largest gap of
// the upper half while the block test rejects it. The total never exceeds
// floor(N/2); a block that would exceed it ends the recursion.
MlgResult mlg_upper(const Eigen::VectorXd& data, BlockTest test, CriticalValueTable& table,
                    double alpha = 0.05);
MlgResult mlg_lower(const Eigen::VectorXd& data, BlockTest test, CriticalValueTable& table,
                    double alpha = 0.05);
// Alternates upper and lower passes on the remaining data until neither
// strips anything.
MlgResult mlg_bidirectional(const Eigen::VectorXd& data, BlockTest test,
                            CriticalValueTable& table, double alpha = 0.05);

}  // namespace ssdf

#endif  // SSDF_ESTIMATORS_HPP_
