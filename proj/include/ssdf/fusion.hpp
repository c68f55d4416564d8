#ifndef SSDF_FUSION_HPP_
#define SSDF_FUSION_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "ssdf/signal_model.hpp"

namespace ssdf {

using Index = Eigen::Index;

struct FusionInput {
  std::vector<Hypothesis> local_decisions;  // one per retained sensor
  std::vector<Index> retained_indices;
};

// H1 iff strictly more than half of the retained decisions are H1.
Hypothesis majority_fuse(const FusionInput& input);
Hypothesis majority_fuse(const std::vector<Hypothesis>& local_decisions);

// P(Binomial(n, p) > n/2): fused H1 probability for n independent sensors
// each deciding H1 with probability p.
double majority_probability(Index n, double p);

// Local probability p such that majority_probability(n, p) == target.
double local_rate_for_majority(Index n, double target);

// Counts for one scenario point. Every field is an integer tally so partial
// results merge exactly in any order.
struct TrialMetrics {
  std::int64_t trials = 0;
  std::int64_t h0_rounds = 0;
  std::int64_t h0_declared_h1 = 0;
  std::int64_t h1_rounds = 0;
  std::int64_t h1_declared_h1 = 0;
  std::int64_t malicious_slots = 0;
  std::int64_t malicious_excluded = 0;
  std::int64_t honest_slots = 0;
  std::int64_t honest_excluded = 0;
  std::int64_t estimated_t_sum = 0;

  std::int64_t rounds() const { return h0_rounds + h1_rounds; }

  // Undefined (nullopt) when the denominator is zero.
  std::optional<double> q_fa() const;
  std::optional<double> q_d() const;
  std::optional<double> mu_detection_rate() const;
  std::optional<double> honest_exclusion_rate() const;
  std::optional<double> mean_estimated_t() const;

  TrialMetrics& merge(const TrialMetrics& other);
  void reset() { *this = TrialMetrics{}; }
};

// Outcome of one sensing round as seen by the fusion centre.
struct RoundOutcome {
  Hypothesis decision;
  Hypothesis truth;
  std::vector<Index> excluded;   // ascending
  std::vector<Index> malicious;  // ascending
  Index n_sensors;
  Index estimated_t;
};

void accumulate(TrialMetrics& metrics, const RoundOutcome& round);

template <typename Range>
TrialMetrics accumulate_metrics(const Range& rounds) {
  TrialMetrics m;
  for (const auto& r : rounds) accumulate(m, r);
  return m;
}

}  // namespace ssdf

#endif  // SSDF_FUSION_HPP_
