#ifndef SSDF_ATTACKS_HPP_
#define SSDF_ATTACKS_HPP_

#include <Eigen/Core>
#include <vector>

#include "ssdf/random.hpp"
#include "ssdf/signal_model.hpp"

namespace ssdf {

using Index = Eigen::Index;

enum class AttackKind { None, AlwaysYes, AlwaysNo, Random, Statistical, CooperativeMasking };

// Which sensors are malicious and how they falsify their energies. Offsets
// are in dB and act multiplicatively on the sensed (linear) energy.
struct AttackProfile {
  AttackKind kind = AttackKind::None;
  std::vector<Index> malicious_indices;
  double offset_db = 0.5;
  double extreme_offset_db = 6.5;
  double attack_probability = 1.0;

  Index malicious_count() const { return static_cast<Index>(malicious_indices.size()); }

  // Cooperative masking: the first ceil(L/2) malicious indices are the
  // extreme subset, the remaining floor(L/2) the mild subset.
  Index extreme_count() const { return (malicious_count() + 1) / 2; }
  bool is_extreme(Index position_in_profile) const { return position_in_profile < extreme_count(); }

  // Throws std::invalid_argument unless the profile is usable with
  // n_sensors reports: indices distinct and in range, L < N - L,
  // probability within [0, 1].
  void validate(Index n_sensors) const;
};

// Draws L distinct malicious indices uniformly out of n_sensors.
AttackProfile make_attack_profile(AttackKind kind, Index n_sensors, Index malicious_count,
                                  Rng& rng, double offset_db = 0.5,
                                  double extreme_offset_db = 6.5,
                                  double attack_probability = 1.0);

EnergyReport apply_attack(const EnergyReport& honest, const AttackProfile& profile, Rng& rng);

// Boolean mask of length n_sensors marking the malicious sensors.
std::vector<bool> malicious_mask(const AttackProfile& profile, Index n_sensors);

}  // namespace ssdf

#endif  // SSDF_ATTACKS_HPP_
