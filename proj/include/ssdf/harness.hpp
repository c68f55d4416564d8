#ifndef SSDF_HARNESS_HPP_
#define SSDF_HARNESS_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ssdf/attacks.hpp"
#include "ssdf/critical_table.hpp"
#include "ssdf/fusion.hpp"
#include "ssdf/outlier_tests.hpp"
#include "ssdf/signal_model.hpp"

namespace ssdf {

enum class DefenseTest { TM, SW, BoxPlot, MAD, None };
enum class Estimator { KMeans, LargestGap, MLG, Known };

// FixedQd picks, for every retained-sensor count, the local threshold that
// gives fused detection probability target_qd, and sweeps snr_db.
// Roc holds snr_db[0] and sweeps the local threshold over `thresholds`.
enum class OperatingPoint { FixedQd, Roc };

struct ScenarioConfig {
  Index n_sensors = 20;
  Index malicious_count = 4;
  std::int64_t samples_per_round = 10000;
  std::vector<double> snr_db = {-20.0};
  double noise_variance = 1.0;

  AttackKind attack = AttackKind::AlwaysYes;
  double offset_db = 0.5;
  double extreme_offset_db = 6.5;
  double attack_probability = 0.5;

  DefenseTest test = DefenseTest::TM;
  Direction direction = Direction::Upper;
  Estimator estimator = Estimator::KMeans;
  double alpha = 0.05;
  double box_fence = 1.5;
  double mad_cutoff = 3.0;

  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  OperatingPoint operating_point = OperatingPoint::FixedQd;
  double target_qd = 0.99;
  std::vector<double> thresholds;

  EnergyModel energy_model = EnergyModel::Gamma;
  std::int64_t table_replications = 100000;
  std::uint64_t table_seed = CriticalValueTable::Options{}.seed;

  // Malicious count actually used (zero when there is no attack).
  Index effective_malicious_count() const {
    return attack == AttackKind::None ? 0 : malicious_count;
  }
  // Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

// Parses the key = value scenario format. Keys mirror ScenarioConfig field
// names; '#' starts a comment; lists are comma separated.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::filesystem::path& path);

struct DefenseOutcome {
  std::vector<Index> excluded;  // ascending
  Index estimated_t = 0;
};

// Estimates the outlier count, runs the configured test and returns the
// sensors to drop. known_t feeds Estimator::Known.
DefenseOutcome apply_defense(const ScenarioConfig& config, const Eigen::VectorXd& energies,
                             Index known_t, CriticalValueTable& table);

struct SweepPoint {
  double sweep_value = 0.0;
  TrialMetrics metrics;
};

// Runs one operating point. Trial i of point p draws from the stream
// derived from (seed, p, i), so the result does not depend on `threads`.
TrialMetrics run_point(const ScenarioConfig& config, std::size_t point_index,
                       CriticalValueTable& table, unsigned threads = 1);

std::size_t sweep_size(const ScenarioConfig& config);
double sweep_value(const ScenarioConfig& config, std::size_t point_index);

// Every sweep point of the scenario, in order.
std::vector<SweepPoint> run_scenario(const ScenarioConfig& config, CriticalValueTable& table,
                                     unsigned threads = 1);

inline constexpr const char* kCsvHeader =
    "sweep_var,q_fa,q_d,mu_detection_rate,honest_exclusion_rate,mean_estimated_t,trials,seed";

void write_csv(std::ostream& out, const std::vector<SweepPoint>& points, std::uint64_t seed);
void emit_csv(const std::vector<SweepPoint>& points, std::uint64_t seed,
              const std::filesystem::path& path);

struct CsvRow {
  double sweep_var = 0.0;
  std::optional<double> q_fa, q_d, mu_detection_rate, honest_exclusion_rate, mean_estimated_t;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
};

std::vector<CsvRow> parse_csv(std::istream& in);

}  // namespace ssdf

#endif  // SSDF_HARNESS_HPP_
