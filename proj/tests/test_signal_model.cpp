#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <vector>

#include "ssdf/signal_model.hpp"
#include "test_support.hpp"

using namespace ssdf;
using ssdf::testing::binomial_half_width;

namespace {

// Independent tail function for cross-checking gaussian_q.
double boost_q(double x) {
  return boost::math::cdf(boost::math::complement(boost::math::normal(), x));
}

struct Moments {
  double mean;
  double variance;
};

Moments sample_moments(const ChannelParams& p, Hypothesis h, EnergyModel model, int draws,
                       std::uint64_t seed) {
  Rng rng(seed);
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double e = simulate_energy(p, h, rng, model);
    sum += e;
    sq += e * e;
  }
  const double mean = sum / draws;
  return {mean, (sq - draws * mean * mean) / (draws - 1)};
}

}  // namespace

TEST_CASE("channel parameters are validated") {
  CHECK_THROWS_AS(ChannelParams(0.0, 0.1, 100), std::invalid_argument);
  CHECK_THROWS_AS(ChannelParams(1.0, -0.1, 100), std::invalid_argument);
  CHECK_THROWS_AS(ChannelParams(1.0, 0.1, 0), std::invalid_argument);
  const ChannelParams small(1.0, 0.1, 10);
  CHECK_FALSE(small.supports_gaussian_approximation());
  CHECK_THROWS_AS(analytic_pfa(1.0, small), std::domain_error);
  CHECK_THROWS_AS(analytic_pd(1.0, small), std::domain_error);
  Rng rng(1);
  CHECK(simulate_energy(small, Hypothesis::H0, rng, EnergyModel::SampleSum) > 0.0);
}

TEST_CASE("simulate_energy mean matches received power") {
  const ChannelParams h0(1.0, 0.0, 10000);
  const ChannelParams h1(1.0, 0.01, 10000);
  for (EnergyModel model : {EnergyModel::Gamma, EnergyModel::Gaussian}) {
    CAPTURE(static_cast<int>(model));
    CHECK(sample_moments(h0, Hypothesis::H0, model, 10000, 3).mean == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sample_moments(h1, Hypothesis::H1, model, 10000, 4).mean == doctest::Approx(1.01).epsilon(0.01));
  }
  // The literal sample sum is costly at M = 10000; fewer draws still pin the mean to 1%.
  CHECK(sample_moments(h0, Hypothesis::H0, EnergyModel::SampleSum, 500, 5).mean ==
        doctest::Approx(1.0).epsilon(0.01));
  CHECK(sample_moments(h1, Hypothesis::H1, EnergyModel::SampleSum, 500, 6).mean ==
        doctest::Approx(1.01).epsilon(0.01));
}

TEST_CASE("simulate_energy is deterministic for a seed") {
  const ChannelParams p(1.0, 0.01, 10000);
  for (EnergyModel model : {EnergyModel::SampleSum, EnergyModel::Gamma, EnergyModel::Gaussian}) {
    Rng a(99), b(99);
    CHECK(simulate_energy(p, Hypothesis::H1, a, model) == simulate_energy(p, Hypothesis::H1, b, model));
  }
}

TEST_CASE("H0 energy moments: mean within 3 SE, variance within 10% of sigma^4/M") {
  const std::int64_t m = 10000;
  const ChannelParams p(1.0, 0.0, m);
  const double expected_var = 1.0 / m;
  struct Case {
    EnergyModel model;
    int draws;
  };
  for (Case c : {Case{EnergyModel::Gamma, 20000}, Case{EnergyModel::Gaussian, 20000},
                 Case{EnergyModel::SampleSum, 5000}}) {
    CAPTURE(static_cast<int>(c.model));
    const Moments mo = sample_moments(p, Hypothesis::H0, c.model, c.draws, 11);
    CHECK(std::abs(mo.mean - 1.0) < 3.0 * std::sqrt(expected_var / c.draws));
    CHECK(std::abs(mo.variance / expected_var - 1.0) < 0.10);
  }
}

TEST_CASE("empirical false-alarm rate matches threshold_for_pfa") {
  const ChannelParams p(1.0, 0.0, 10000);
  struct Case {
    EnergyModel model;
    int trials;
  };
  for (Case c : {Case{EnergyModel::Gamma, 100000}, Case{EnergyModel::Gaussian, 100000},
                 Case{EnergyModel::SampleSum, 20000}}) {
    const std::vector<double> targets = {0.01, 0.1, 0.5};
    std::vector<double> lambdas;
    for (double target : targets) lambdas.push_back(threshold_for_pfa(target, p));
    std::vector<int> alarms(targets.size(), 0);
    Rng rng(2024);
    for (int i = 0; i < c.trials; ++i) {
      const double e = simulate_energy(p, Hypothesis::H0, rng, c.model);
      for (std::size_t k = 0; k < targets.size(); ++k)
        alarms[k] += local_decision(e, lambdas[k]) == Hypothesis::H1;
    }
    for (std::size_t k = 0; k < targets.size(); ++k) {
      CAPTURE(static_cast<int>(c.model));
      CAPTURE(targets[k]);
      const double rate = static_cast<double>(alarms[k]) / c.trials;
      CHECK(std::abs(rate - targets[k]) <= binomial_half_width(targets[k], c.trials));
    }
  }
}

TEST_CASE("gaussian_q agrees with an independent implementation") {
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    CAPTURE(x);
    CHECK(ssdf::testing::relative_error(gaussian_q(x), boost_q(x)) < 1e-12);
  }
  CHECK(gaussian_q(0.0) == 0.5);
}

TEST_CASE("gaussian_q_inverse round-trips to 1e-12") {
  for (double p : {1e-12, 1e-6, 0.001, 0.01, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575, 0.99, 0.999999}) {
    CAPTURE(p);
    const double x = gaussian_q_inverse(p);
    CHECK(std::abs(gaussian_q(x) - p) <= 1e-12 * std::max(p, 1e-3));
    const double reference = boost::math::quantile(boost::math::complement(boost::math::normal(), p));
    CHECK(std::abs(x - reference) < 1e-10);
  }
  CHECK_THROWS_AS(gaussian_q_inverse(0.0), std::domain_error);
  CHECK_THROWS_AS(gaussian_q_inverse(1.0), std::domain_error);
}

TEST_CASE("analytic_pfa examples") {
  const ChannelParams p(1.0, 0.01, 10000);
  CHECK(analytic_pfa(1.0, p) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(analytic_pfa(1e6, p) == 0.0);
  CHECK(analytic_pfa(1.02, p) == doctest::Approx(boost_q(2.0)).epsilon(1e-10));
  CHECK(analytic_pfa(1.02, p) == doctest::Approx(0.022750131948179).epsilon(1e-9));
}

TEST_CASE("analytic_pd examples") {
  const ChannelParams p(1.0, 0.01, 10000);
  CHECK(analytic_pd(1.01, p) == doctest::Approx(0.5).epsilon(1e-12));

  const ChannelParams zero_snr(1.0, 0.0, 10000);
  for (double lambda : {0.97, 0.99, 1.0, 1.013, 1.05})
    CHECK(analytic_pd(lambda, zero_snr) == analytic_pfa(lambda, zero_snr));

  // P_D = 0.99 threshold from an independent quantile.
  const double z99 = boost::math::quantile(boost::math::complement(boost::math::normal(), 0.99));
  const double lambda = 1.01 * (1.0 + z99 / 100.0);
  CHECK(analytic_pd(lambda, p) == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(threshold_for_pd(0.99, p) == doctest::Approx(lambda).epsilon(1e-12));
}

TEST_CASE("threshold_for_pfa inverts analytic_pfa") {
  const ChannelParams p(1.0, 0.01, 10000);
  CHECK(threshold_for_pfa(0.5, p) == doctest::Approx(1.0).epsilon(1e-15));
  for (double target : {0.01, 0.1, 0.9})
    CHECK(std::abs(analytic_pfa(threshold_for_pfa(target, p), p) - target) < 1e-12);
  CHECK(threshold_for_pfa(0.022750131948179, p) == doctest::Approx(1.02).epsilon(1e-10));
  CHECK_THROWS_AS(threshold_for_pfa(0.0, p), std::domain_error);
  CHECK_THROWS_AS(threshold_for_pfa(1.5, p), std::domain_error);
}

TEST_CASE("analytic curves: pfa strictly decreasing, pd >= pfa for snr > 0") {
  const ChannelParams p(1.0, 0.01, 10000);
  double previous = 1.0;
  for (double lambda = 0.96; lambda < 1.06; lambda += 0.001) {
    const double pfa = analytic_pfa(lambda, p);
    CHECK(pfa < previous);
    CHECK(analytic_pd(lambda, p) >= pfa);
    previous = pfa;
  }
}

TEST_CASE("local_decision uses a strict threshold") {
  CHECK(local_decision(2.0, 1.0) == Hypothesis::H1);
  CHECK(local_decision(1.0, 1.0) == Hypothesis::H0);
  CHECK(local_decision(0.5, 1.0) == Hypothesis::H0);
  CHECK_THROWS_AS(local_decision(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("simulate_report shape") {
  const ChannelParams p(1.0, 0.01, 10000);
  Rng rng(8);
  const EnergyReport r = simulate_report(p, Hypothesis::H1, 20, rng, EnergyModel::Gamma, 17);
  CHECK(r.size() == 20);
  CHECK(r.truth == Hypothesis::H1);
  CHECK(r.round_id == 17);
  CHECK((r.energies.array() > 0.0).all());
}
