#include "ssdf/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ssdf {

namespace {

void require_gaussian_regime(const ChannelParams& params, const char* what) {
  if (!params.supports_gaussian_approximation()) {
    throw std::domain_error(std::string(what) +
                            ": closed form needs samples_per_round > 10");
  }
}

// Acklam's rational approximation to the standard normal quantile, relative
// error below 1.15e-9 over (0, 1). Refined by Halley steps in gaussian_q_inverse.
double acklam_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

ChannelParams::ChannelParams(double noise_variance, double snr,
                             std::int64_t samples_per_round)
    : noise_variance_(noise_variance), snr_(snr), samples_per_round_(samples_per_round) {
  if (!(noise_variance > 0.0)) throw std::invalid_argument("noise_variance must be > 0");
  if (!(snr >= 0.0)) throw std::invalid_argument("snr must be >= 0");
  if (samples_per_round < 1) throw std::invalid_argument("samples_per_round must be >= 1");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double gaussian_q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("gaussian_q_inverse: p outside (0,1)");
  // Q(x) = p  <=>  Phi(-x) = p.
  double x = -acklam_quantile(p);
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  for (int iter = 0; iter < 3; ++iter) {
    const double density = inv_sqrt_2pi * std::exp(-0.5 * x * x);
    const double u = (gaussian_q(x) - p) / density;
    x += u / (1.0 - 0.5 * x * u);
  }
  return x;
}

double simulate_energy(const ChannelParams& params, Hypothesis truth, Rng& rng,
                       EnergyModel model) {
  const double power = params.received_power(truth);
  const auto m = params.samples_per_round();
  switch (model) {
    case EnergyModel::SampleSum: {
      // CN(0, power): independent real and imaginary parts of variance power/2.
      std::normal_distribution<double> component(0.0, std::sqrt(power / 2.0));
      double sum = 0.0;
      for (std::int64_t i = 0; i < m; ++i) {
        const double re = component(rng);
        const double im = component(rng);
        sum += re * re + im * im;
      }
      return sum / static_cast<double>(m);
    }
    case EnergyModel::Gamma: {
      std::gamma_distribution<double> gamma(static_cast<double>(m), 1.0);
      return power * gamma(rng) / static_cast<double>(m);
    }
    case EnergyModel::Gaussian: {
      require_gaussian_regime(params, "simulate_energy");
      std::normal_distribution<double> normal(
          power, power / std::sqrt(static_cast<double>(m)));
      return normal(rng);
    }
  }
  throw std::logic_error("unknown energy model");
}

EnergyReport simulate_report(const ChannelParams& params, Hypothesis truth,
                             Eigen::Index n_sensors, Rng& rng, EnergyModel model,
                             std::int64_t round_id) {
  if (n_sensors < 1) throw std::invalid_argument("simulate_report: need at least one sensor");
  EnergyReport report;
  report.energies.resize(n_sensors);
  for (Eigen::Index i = 0; i < n_sensors; ++i)
    report.energies[i] = simulate_energy(params, truth, rng, model);
  report.truth = truth;
  report.round_id = round_id;
  return report;
}

double analytic_pfa(double threshold, const ChannelParams& params) {
  require_gaussian_regime(params, "analytic_pfa");
  const double root_m = std::sqrt(static_cast<double>(params.samples_per_round()));
  return gaussian_q((threshold / params.noise_variance() - 1.0) * root_m);
}

double analytic_pd(double threshold, const ChannelParams& params) {
  require_gaussian_regime(params, "analytic_pd");
  const double root_m = std::sqrt(static_cast<double>(params.samples_per_round()));
  const double a = params.snr();
  return gaussian_q((threshold / params.noise_variance() - a - 1.0) * root_m / (a + 1.0));
}

double threshold_for_pfa(double target, const ChannelParams& params) {
  require_gaussian_regime(params, "threshold_for_pfa");
  if (!(target > 0.0 && target < 1.0))
    throw std::domain_error("threshold_for_pfa: target outside (0,1)");
  const double root_m = std::sqrt(static_cast<double>(params.samples_per_round()));
  return params.noise_variance() * (1.0 + gaussian_q_inverse(target) / root_m);
}

double threshold_for_pd(double target, const ChannelParams& params) {
  require_gaussian_regime(params, "threshold_for_pd");
  if (!(target > 0.0 && target < 1.0))
    throw std::domain_error("threshold_for_pd: target outside (0,1)");
  const double root_m = std::sqrt(static_cast<double>(params.samples_per_round()));
  const double scale = 1.0 + params.snr();
  return params.noise_variance() * scale * (1.0 + gaussian_q_inverse(target) / root_m);
}

Hypothesis local_decision(double energy, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("local_decision: threshold must be > 0");
  return energy > threshold ? Hypothesis::H1 : Hypothesis::H0;
}

}  // namespace ssdf
