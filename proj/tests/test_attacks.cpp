#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ssdf/attacks.hpp"
#include "test_support.hpp"

using namespace ssdf;

namespace {

EnergyReport flat_report(Index n, double value = 1.0) {
  EnergyReport r;
  r.energies = Eigen::VectorXd::Constant(n, value);
  return r;
}

AttackProfile profile_with(AttackKind kind, std::vector<Index> indices) {
  AttackProfile p;
  p.kind = kind;
  p.malicious_indices = std::move(indices);
  return p;
}

}  // namespace

TEST_CASE("AlwaysYes raises by the dB offset") {
  Rng rng(1);
  const auto out = apply_attack(flat_report(20), profile_with(AttackKind::AlwaysYes, {3}), rng);
  CHECK(out.energies[3] == doctest::Approx(std::pow(10.0, 0.05)));
  CHECK(out.energies[3] == doctest::Approx(1.1220184543).epsilon(1e-10));
  CHECK(out.energies[0] == 1.0);
}

TEST_CASE("AlwaysNo lowers by the dB offset") {
  Rng rng(1);
  const auto out = apply_attack(flat_report(20), profile_with(AttackKind::AlwaysNo, {0, 5}), rng);
  CHECK(out.energies[0] == doctest::Approx(std::pow(10.0, -0.05)));
  CHECK(out.energies[5] == doctest::Approx(std::pow(10.0, -0.05)));
}

TEST_CASE("no attackers leaves the report untouched") {
  Rng rng(1);
  EnergyReport r = flat_report(20);
  r.energies[4] = 3.5;
  for (AttackKind kind : {AttackKind::None, AttackKind::AlwaysYes, AttackKind::Random}) {
    const auto out = apply_attack(r, profile_with(kind, {}), rng);
    CHECK(out.energies == r.energies);
  }
}

TEST_CASE("cooperative masking splits extreme and mild attackers") {
  Rng rng(1);
  const auto profile = profile_with(AttackKind::CooperativeMasking, {2, 7, 11, 19});
  const auto out = apply_attack(flat_report(20), profile, rng);
  // 10^(6.5/10) and 10^(0.5/10), evaluated independently of db_to_linear.
  const double extreme = std::exp(0.65 * std::log(10.0));
  const double mild = std::exp(0.05 * std::log(10.0));
  CHECK(extreme == doctest::Approx(4.4668359215));
  CHECK(out.energies[2] == doctest::Approx(extreme));
  CHECK(out.energies[7] == doctest::Approx(extreme));
  CHECK(out.energies[11] == doctest::Approx(mild));
  CHECK(out.energies[19] == doctest::Approx(mild));
  CHECK(profile.extreme_count() == 2);

  auto odd = profile_with(AttackKind::CooperativeMasking, {0, 1, 2});
  CHECK(odd.extreme_count() == 2);
  const auto out_odd = apply_attack(flat_report(20), odd, rng);
  CHECK(out_odd.energies[1] == doctest::Approx(extreme));
  CHECK(out_odd.energies[2] == doctest::Approx(mild));
}

TEST_CASE("random attack moves each attacker up or down") {
  Rng rng(5);
  const auto profile = profile_with(AttackKind::Random, {0, 1, 2, 3});
  int ups = 0, total = 0;
  for (int round = 0; round < 2000; ++round) {
    const auto out = apply_attack(flat_report(20), profile, rng);
    for (Index i = 0; i < 4; ++i) {
      const double e = out.energies[i];
      const bool up = std::abs(e - std::pow(10.0, 0.05)) < 1e-12;
      const bool down = std::abs(e - std::pow(10.0, -0.05)) < 1e-12;
      CHECK((up || down));
      ups += up;
      ++total;
    }
  }
  CHECK(std::abs(ups / double(total) - 0.5) < ssdf::testing::binomial_half_width(0.5, total));
}

TEST_CASE("honest entries are preserved exactly") {
  Rng rng(3);
  for (AttackKind kind : {AttackKind::AlwaysYes, AttackKind::AlwaysNo, AttackKind::Random,
                          AttackKind::Statistical, AttackKind::CooperativeMasking}) {
    const AttackProfile profile = make_attack_profile(kind, 20, 4, rng, 0.5, 6.5, 0.5);
    EnergyReport r;
    r.energies = Eigen::VectorXd::LinSpaced(20, 0.9, 1.1);
    const auto out = apply_attack(r, profile, rng);
    const auto mask = malicious_mask(profile, 20);
    for (Index i = 0; i < 20; ++i)
      if (!mask[static_cast<std::size_t>(i)]) CHECK(out.energies[i] == r.energies[i]);
  }
}

TEST_CASE("statistical attack deviates at the attack probability") {
  Rng rng(17);
  for (double p : {0.2, 0.5, 0.9}) {
    const auto profile = [&] {
      auto prof = profile_with(AttackKind::Statistical, {6});
      prof.attack_probability = p;
      return prof;
    }();
    const int rounds = 20000;
    int deviated = 0;
    for (int i = 0; i < rounds; ++i)
      deviated += apply_attack(flat_report(20), profile, rng).energies[6] != 1.0;
    CAPTURE(p);
    CHECK(std::abs(deviated / double(rounds) - p) <= ssdf::testing::binomial_half_width(p, rounds));
  }
}

TEST_CASE("dB offsets compose multiplicatively") {
  Rng rng(1);
  EnergyReport r = flat_report(5);
  r.energies << 0.3, 1.7, 2.2, 9.1, 1e-3;
  const auto up = apply_attack(r, profile_with(AttackKind::AlwaysYes, {0, 1}), rng);
  const auto back = apply_attack(up, profile_with(AttackKind::AlwaysNo, {0, 1}), rng);
  for (Index i = 0; i < 5; ++i) CHECK(ssdf::testing::relative_error(back.energies[i], r.energies[i]) < 1e-12);
}

TEST_CASE("attack profiles are validated") {
  Rng rng(1);
  CHECK_THROWS_AS(make_attack_profile(AttackKind::AlwaysYes, 20, 10, rng), std::invalid_argument);
  CHECK_NOTHROW(make_attack_profile(AttackKind::AlwaysYes, 20, 9, rng));
  CHECK_THROWS_AS(apply_attack(flat_report(4), profile_with(AttackKind::AlwaysYes, {7}), rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_attack(flat_report(20), profile_with(AttackKind::AlwaysYes, {1, 1}), rng),
                  std::invalid_argument);
  auto bad_p = profile_with(AttackKind::Statistical, {1});
  bad_p.attack_probability = 1.5;
  CHECK_THROWS_AS(bad_p.validate(20), std::invalid_argument);
}

TEST_CASE("make_attack_profile draws distinct indices deterministically") {
  Rng a(42), b(42);
  const auto pa = make_attack_profile(AttackKind::Random, 20, 4, a);
  const auto pb = make_attack_profile(AttackKind::Random, 20, 4, b);
  CHECK(pa.malicious_indices == pb.malicious_indices);
  auto sorted = pa.malicious_indices;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(pa.malicious_count() == 4);
}
