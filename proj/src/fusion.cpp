#include "ssdf/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssdf {

namespace {

std::optional<double> ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Hypothesis majority_fuse(const std::vector<Hypothesis>& local_decisions) {
  if (local_decisions.empty()) throw std::invalid_argument("majority_fuse: no retained sensors");
  const auto yes = std::count(local_decisions.begin(), local_decisions.end(), Hypothesis::H1);
  return 2 * static_cast<std::size_t>(yes) > local_decisions.size() ? Hypothesis::H1
                                                                    : Hypothesis::H0;
}

Hypothesis majority_fuse(const FusionInput& input) {
  if (input.local_decisions.size() != input.retained_indices.size())
    throw std::invalid_argument("majority_fuse: decisions and retained indices differ in size");
  for (Index i : input.retained_indices)
    if (i < 0) throw std::invalid_argument("majority_fuse: negative sensor index");
  return majority_fuse(input.local_decisions);
}

double majority_probability(Index n, double p) {
  if (n < 1) throw std::invalid_argument("majority_probability: n < 1");
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double total = 0.0;
  for (Index k = n / 2 + 1; k <= n; ++k) {
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                            std::lgamma(n - k + 1.0) + k * std::log(p) +
                            (n - k) * std::log1p(-p);
    total += std::exp(log_term);
  }
  return std::min(1.0, total);
}

double local_rate_for_majority(Index n, double target) {
  if (!(target > 0.0 && target < 1.0))
    throw std::domain_error("local_rate_for_majority: target outside (0,1)");
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (majority_probability(n, mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<double> TrialMetrics::q_fa() const { return ratio(h0_declared_h1, h0_rounds); }
std::optional<double> TrialMetrics::q_d() const { return ratio(h1_declared_h1, h1_rounds); }
std::optional<double> TrialMetrics::mu_detection_rate() const {
  return ratio(malicious_excluded, malicious_slots);
}
std::optional<double> TrialMetrics::honest_exclusion_rate() const {
  return ratio(honest_excluded, honest_slots);
}
std::optional<double> TrialMetrics::mean_estimated_t() const {
  return ratio(estimated_t_sum, rounds());
}

TrialMetrics& TrialMetrics::merge(const TrialMetrics& o) {
  trials += o.trials;
  h0_rounds += o.h0_rounds;
  h0_declared_h1 += o.h0_declared_h1;
  h1_rounds += o.h1_rounds;
  h1_declared_h1 += o.h1_declared_h1;
  malicious_slots += o.malicious_slots;
  malicious_excluded += o.malicious_excluded;
  honest_slots += o.honest_slots;
  honest_excluded += o.honest_excluded;
  estimated_t_sum += o.estimated_t_sum;
  return *this;
}

void accumulate(TrialMetrics& m, const RoundOutcome& r) {
  const bool h1 = r.decision == Hypothesis::H1;
  if (r.truth == Hypothesis::H0) {
    ++m.h0_rounds;
    m.h0_declared_h1 += h1;
  } else {
    ++m.h1_rounds;
    m.h1_declared_h1 += h1;
  }
  std::vector<Index> caught;
  std::set_intersection(r.excluded.begin(), r.excluded.end(), r.malicious.begin(),
                        r.malicious.end(), std::back_inserter(caught));
  const auto n_malicious = static_cast<std::int64_t>(r.malicious.size());
  const auto n_caught = static_cast<std::int64_t>(caught.size());
  m.malicious_slots += n_malicious;
  m.malicious_excluded += n_caught;
  m.honest_slots += r.n_sensors - n_malicious;
  m.honest_excluded += static_cast<std::int64_t>(r.excluded.size()) - n_caught;
  m.estimated_t_sum += r.estimated_t;
}

}  // namespace ssdf
