#ifndef SSDF_SIGNAL_MODEL_HPP_
#define SSDF_SIGNAL_MODEL_HPP_

#include <Eigen/Core>
#include <cstdint>

#include "ssdf/random.hpp"

namespace ssdf {

enum class Hypothesis { H0, H1 };

// Energy-detector channel: AWGN of power noise_variance, primary signal of
// power snr * noise_variance, averaged over samples_per_round samples.
class ChannelParams {
 public:
  ChannelParams(double noise_variance, double snr, std::int64_t samples_per_round);

  double noise_variance() const { return noise_variance_; }
  double snr() const { return snr_; }
  std::int64_t samples_per_round() const { return samples_per_round_; }

  // Per-sample received power under the given hypothesis.
  double received_power(Hypothesis h) const {
    return h == Hypothesis::H1 ? noise_variance_ * (1.0 + snr_) : noise_variance_;
  }

  // The closed-form detection formulas rely on the Gaussian approximation of
  // the energy statistic, which needs more than 10 samples.
  bool supports_gaussian_approximation() const { return samples_per_round_ > 10; }

 private:
  double noise_variance_;
  double snr_;
  std::int64_t samples_per_round_;
};

// How simulate_energy draws the statistic.
//   SampleSum: literal average of M complex Gaussian samples.
//   Gamma:     exact law of that average, sigma^2 * Gamma(M, 1) / M.
//   Gaussian:  central-limit approximation N(sigma^2, sigma^4 / M).
enum class EnergyModel { SampleSum, Gamma, Gaussian };

struct EnergyReport {
  Eigen::VectorXd energies;
  Hypothesis truth = Hypothesis::H0;
  std::int64_t round_id = 0;

  Eigen::Index size() const { return energies.size(); }
};

double db_to_linear(double db);
double linear_to_db(double linear);

// Standard Gaussian tail Q(x) = P(Z > x) and its inverse.
double gaussian_q(double x);
double gaussian_q_inverse(double p);

double simulate_energy(const ChannelParams& params, Hypothesis truth, Rng& rng,
                       EnergyModel model = EnergyModel::Gamma);

// One sensing round of n_sensors i.i.d. honest energies.
EnergyReport simulate_report(const ChannelParams& params, Hypothesis truth,
                             Eigen::Index n_sensors, Rng& rng,
                             EnergyModel model = EnergyModel::Gamma,
                             std::int64_t round_id = 0);

double analytic_pfa(double threshold, const ChannelParams& params);
double analytic_pd(double threshold, const ChannelParams& params);

// Inverses of analytic_pfa / analytic_pd in the threshold.
double threshold_for_pfa(double target, const ChannelParams& params);
double threshold_for_pd(double target, const ChannelParams& params);

// H1 iff energy > threshold; equality resolves to H0.
Hypothesis local_decision(double energy, double threshold);

}  // namespace ssdf

#endif  // SSDF_SIGNAL_MODEL_HPP_
