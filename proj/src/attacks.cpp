#include "ssdf/attacks.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace ssdf {

void AttackProfile::validate(Index n_sensors) const {
  const Index l = malicious_count();
  if (kind == AttackKind::None && l != 0)
    throw std::invalid_argument("attack profile: kind None with malicious sensors");
  if (!(l < n_sensors - l))
    throw std::invalid_argument("attack profile: malicious sensors must be a strict minority");
  std::vector<Index> sorted = malicious_indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("attack profile: duplicate malicious index");
  if (!sorted.empty() && (sorted.front() < 0 || sorted.back() >= n_sensors))
    throw std::invalid_argument("attack profile: malicious index out of range");
  if (!(attack_probability >= 0.0 && attack_probability <= 1.0))
    throw std::invalid_argument("attack profile: attack_probability outside [0,1]");
}

AttackProfile make_attack_profile(AttackKind kind, Index n_sensors, Index malicious_count,
                                  Rng& rng, double offset_db, double extreme_offset_db,
                                  double attack_probability) {
  AttackProfile profile;
  profile.kind = kind;
  profile.offset_db = offset_db;
  profile.extreme_offset_db = extreme_offset_db;
  profile.attack_probability = attack_probability;
  if (kind != AttackKind::None && malicious_count > 0) {
    if (malicious_count > n_sensors)
      throw std::invalid_argument("make_attack_profile: more attackers than sensors");
    std::vector<Index> all(static_cast<std::size_t>(n_sensors));
    std::iota(all.begin(), all.end(), Index{0});
    // Partial Fisher-Yates with an explicit uniform draw keeps the selection
    // independent of the standard library's shuffle implementation.
    for (Index i = 0; i < malicious_count; ++i) {
      std::uniform_int_distribution<Index> pick(i, n_sensors - 1);
      std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
    }
    profile.malicious_indices.assign(all.begin(), all.begin() + malicious_count);
  }
  profile.validate(n_sensors);
  return profile;
}

EnergyReport apply_attack(const EnergyReport& honest, const AttackProfile& profile, Rng& rng) {
  profile.validate(honest.size());
  EnergyReport out = honest;
  const double up = db_to_linear(profile.offset_db);
  const double down = db_to_linear(-profile.offset_db);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution attacks(profile.attack_probability);

  for (Index k = 0; k < profile.malicious_count(); ++k) {
    double& e = out.energies[profile.malicious_indices[static_cast<std::size_t>(k)]];
    switch (profile.kind) {
      case AttackKind::None:
        break;
      case AttackKind::AlwaysYes:
        e *= up;
        break;
      case AttackKind::AlwaysNo:
        e *= down;
        break;
      case AttackKind::Random:
        e *= coin(rng) ? up : down;
        break;
      case AttackKind::Statistical: {
        // Both draws are always taken so the stream advances identically
        // whether or not this sensor attacks.
        const bool active = attacks(rng);
        const bool raise = coin(rng);
        if (active) e *= raise ? up : down;
        break;
      }
      case AttackKind::CooperativeMasking:
        e *= profile.is_extreme(k) ? db_to_linear(profile.extreme_offset_db) : up;
        break;
    }
  }
  return out;
}

std::vector<bool> malicious_mask(const AttackProfile& profile, Index n_sensors) {
  std::vector<bool> mask(static_cast<std::size_t>(n_sensors), false);
  for (Index i : profile.malicious_indices) mask.at(static_cast<std::size_t>(i)) = true;
  return mask;
}

}  // namespace ssdf
