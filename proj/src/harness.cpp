#include "ssdf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ssdf/estimators.hpp"
#include "ssdf/random.hpp"

namespace ssdf {

namespace {

constexpr std::int64_t kTrialsPerChunk = 64;
constexpr std::uint64_t kProfileStream = 0xa77acc;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: '" + key + "' expects a number, got '" + value + "'");
  }
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& value) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + value + "'");
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(key, item));
  }
  return out;
}

template <typename Enum>
Enum to_enum(const std::string& key, const std::string& value,
             const std::map<std::string, Enum>& names) {
  auto it = names.find(value);
  if (it == names.end())
    throw std::invalid_argument("config: unknown value '" + value + "' for '" + key + "'");
  return it->second;
}

ChannelParams channel_for(const ScenarioConfig& c, double snr_db) {
  return ChannelParams(c.noise_variance, db_to_linear(snr_db), c.samples_per_round);
}

std::vector<Index> capped(std::vector<Index> excluded, Index n) {
  // Never drop every sensor; fusion needs at least one.
  if (static_cast<Index>(excluded.size()) >= n) excluded.clear();
  return excluded;
}

Index estimate_count(const ScenarioConfig& c, const Eigen::VectorXd& energies, Index known_t) {
  const bool residual = c.direction == Direction::Bidirectional;
  switch (c.estimator) {
    case Estimator::Known:
      return known_t;
    case Estimator::KMeans:
      return kmeans_estimate(residual ? absolute_residuals(energies) : energies).t;
    case Estimator::LargestGap:
      if (c.direction == Direction::Lower) return largest_gap_lower(energies);
      return largest_gap_upper(residual ? absolute_residuals(energies) : energies);
    case Estimator::MLG:
      break;
  }
  throw std::logic_error("estimate_count: MLG has no standalone count");
}

void append(std::ostream& out, const std::optional<double>& v) {
  if (!v) {
    out << "NA";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", *v);
  out << buf;
}

std::optional<double> parse_optional(const std::string& field) {
  if (field == "NA") return std::nullopt;
  return std::stod(field);
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n_sensors < 2) throw std::invalid_argument("config: n_sensors must be >= 2");
  const Index l = effective_malicious_count();
  if (l < 0 || !(l < n_sensors - l))
    throw std::invalid_argument("config: malicious_count must be below the honest count");
  if (attack != AttackKind::None && l == 0)
    throw std::invalid_argument("config: attack requires malicious_count >= 1");
  if (samples_per_round <= 10)
    throw std::invalid_argument("config: samples_per_round must exceed 10");
  if (!(noise_variance > 0.0)) throw std::invalid_argument("config: noise_variance must be > 0");
  if (snr_db.empty()) throw std::invalid_argument("config: snr_db needs at least one value");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha outside (0,1)");
  if (!(attack_probability >= 0.0 && attack_probability <= 1.0))
    throw std::invalid_argument("config: attack_probability outside [0,1]");
  if (operating_point == OperatingPoint::FixedQd && !(target_qd > 0.0 && target_qd < 1.0))
    throw std::invalid_argument("config: target_qd outside (0,1)");
  if (operating_point == OperatingPoint::Roc) {
    if (thresholds.empty()) throw std::invalid_argument("config: roc needs thresholds");
    for (double t : thresholds)
      if (!(t > 0.0)) throw std::invalid_argument("config: thresholds must be > 0");
  }
  if ((test == DefenseTest::TM || test == DefenseTest::SW) && n_sensors < 4)
    throw std::invalid_argument("config: block tests need n_sensors >= 4");
  if (test == DefenseTest::SW && n_sensors > 50)
    throw std::invalid_argument("config: SW supports at most 50 sensors");
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig c;
  const std::map<std::string, AttackKind> attacks = {
      {"none", AttackKind::None},
      {"always_yes", AttackKind::AlwaysYes},
      {"always_no", AttackKind::AlwaysNo},
      {"random", AttackKind::Random},
      {"statistical", AttackKind::Statistical},
      {"cooperative_masking", AttackKind::CooperativeMasking}};
  const std::map<std::string, DefenseTest> tests = {{"tm", DefenseTest::TM},
                                                    {"sw", DefenseTest::SW},
                                                    {"box_plot", DefenseTest::BoxPlot},
                                                    {"mad", DefenseTest::MAD},
                                                    {"none", DefenseTest::None}};
  const std::map<std::string, Direction> directions = {
      {"upper", Direction::Upper},
      {"lower", Direction::Lower},
      {"bidirectional", Direction::Bidirectional}};
  const std::map<std::string, Estimator> estimators = {{"kmeans", Estimator::KMeans},
                                                       {"largest_gap", Estimator::LargestGap},
                                                       {"mlg", Estimator::MLG},
                                                       {"known", Estimator::Known}};
  const std::map<std::string, OperatingPoint> points = {{"fixed_qd", OperatingPoint::FixedQd},
                                                        {"roc", OperatingPoint::Roc}};
  const std::map<std::string, EnergyModel> models = {{"sample_sum", EnergyModel::SampleSum},
                                                     {"gamma", EnergyModel::Gamma},
                                                     {"gaussian", EnergyModel::Gaussian}};

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"n_sensors", [&](auto& k, auto& v) { c.n_sensors = to_integer<Index>(k, v); }},
      {"malicious_count", [&](auto& k, auto& v) { c.malicious_count = to_integer<Index>(k, v); }},
      {"samples_per_round",
       [&](auto& k, auto& v) { c.samples_per_round = to_integer<std::int64_t>(k, v); }},
      {"snr_db", [&](auto& k, auto& v) { c.snr_db = to_list(k, v); }},
      {"noise_variance", [&](auto& k, auto& v) { c.noise_variance = to_double(k, v); }},
      {"attack", [&](auto& k, auto& v) { c.attack = to_enum(k, v, attacks); }},
      {"offset_db", [&](auto& k, auto& v) { c.offset_db = to_double(k, v); }},
      {"extreme_offset_db", [&](auto& k, auto& v) { c.extreme_offset_db = to_double(k, v); }},
      {"attack_probability", [&](auto& k, auto& v) { c.attack_probability = to_double(k, v); }},
      {"test", [&](auto& k, auto& v) { c.test = to_enum(k, v, tests); }},
      {"direction", [&](auto& k, auto& v) { c.direction = to_enum(k, v, directions); }},
      {"estimator", [&](auto& k, auto& v) { c.estimator = to_enum(k, v, estimators); }},
      {"alpha", [&](auto& k, auto& v) { c.alpha = to_double(k, v); }},
      {"box_fence", [&](auto& k, auto& v) { c.box_fence = to_double(k, v); }},
      {"mad_cutoff", [&](auto& k, auto& v) { c.mad_cutoff = to_double(k, v); }},
      {"trials", [&](auto& k, auto& v) { c.trials = to_integer<std::int64_t>(k, v); }},
      {"seed", [&](auto& k, auto& v) { c.seed = to_integer<std::uint64_t>(k, v); }},
      {"operating_point", [&](auto& k, auto& v) { c.operating_point = to_enum(k, v, points); }},
      {"target_qd", [&](auto& k, auto& v) { c.target_qd = to_double(k, v); }},
      {"thresholds", [&](auto& k, auto& v) { c.thresholds = to_list(k, v); }},
      {"energy_model", [&](auto& k, auto& v) { c.energy_model = to_enum(k, v, models); }},
      {"table_replications",
       [&](auto& k, auto& v) { c.table_replications = to_integer<std::int64_t>(k, v); }},
      {"table_seed", [&](auto& k, auto& v) { c.table_seed = to_integer<std::uint64_t>(k, v); }},
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) + " lacks '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument("config: unknown key '" + key + "'");
    it->second(key, value);
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config: " + path.string());
  return parse_config(in);
}

DefenseOutcome apply_defense(const ScenarioConfig& c, const Eigen::VectorXd& energies,
                             Index known_t, CriticalValueTable& table) {
  const Index n = energies.size();
  DefenseOutcome out;
  switch (c.test) {
    case DefenseTest::None:
      return out;
    case DefenseTest::BoxPlot:
      out.excluded = capped(box_plot_screen(energies, c.box_fence), n);
      out.estimated_t = static_cast<Index>(out.excluded.size());
      return out;
    case DefenseTest::MAD:
      try {
        out.excluded = capped(mad_screen(energies, c.mad_cutoff), n);
      } catch (const std::domain_error&) {
        out.excluded.clear();
      }
      out.estimated_t = static_cast<Index>(out.excluded.size());
      return out;
    case DefenseTest::TM:
    case DefenseTest::SW:
      break;
  }

  const BlockTest test = c.test == DefenseTest::TM ? BlockTest::TM : BlockTest::SW;
  if (c.estimator == Estimator::MLG) {
    MlgResult r = c.direction == Direction::Upper   ? mlg_upper(energies, test, table, c.alpha)
                  : c.direction == Direction::Lower ? mlg_lower(energies, test, table, c.alpha)
                                                    : mlg_bidirectional(energies, test, table, c.alpha);
    out.excluded = capped(std::move(r.outliers), n);
    out.estimated_t = static_cast<Index>(out.excluded.size());
    return out;
  }
  if (c.estimator == Estimator::LargestGap && c.direction == Direction::Bidirectional) {
    const HalfGapResult r = largest_gap_bidirectional(energies, test, table, c.alpha);
    out.excluded = capped(r.outliers(), n);
    out.estimated_t = r.t_upper + r.t_lower;
    return out;
  }

  Index t = estimate_count(c, energies, known_t);
  // An estimate claiming a malicious majority contradicts the model; treat
  // it as no evidence rather than excluding most sensors.
  if (t > n / 2) t = 0;
  out.estimated_t = t;
  const OutlierVerdict v = block_test(test, energies, t, c.direction, table, c.alpha);
  if (v.is_outlier_block) out.excluded = capped(v.suspected_indices, n);
  return out;
}

std::size_t sweep_size(const ScenarioConfig& c) {
  return c.operating_point == OperatingPoint::FixedQd ? c.snr_db.size() : c.thresholds.size();
}

double sweep_value(const ScenarioConfig& c, std::size_t point_index) {
  return c.operating_point == OperatingPoint::FixedQd ? c.snr_db.at(point_index)
                                                      : c.thresholds.at(point_index);
}

TrialMetrics run_point(const ScenarioConfig& c, std::size_t point_index, CriticalValueTable& table,
                       unsigned threads) {
  c.validate();
  const double snr_db =
      c.operating_point == OperatingPoint::FixedQd ? c.snr_db.at(point_index) : c.snr_db.front();
  const ChannelParams channel = channel_for(c, snr_db);
  const Index n = c.n_sensors;

  // thresholds[k]: local threshold used when k sensors are retained.
  std::vector<double> thresholds(static_cast<std::size_t>(n + 1), 0.0);
  for (Index k = 1; k <= n; ++k) {
    thresholds[static_cast<std::size_t>(k)] =
        c.operating_point == OperatingPoint::Roc
            ? c.thresholds.at(point_index)
            : threshold_for_pd(local_rate_for_majority(k, c.target_qd), channel);
  }

  Rng profile_rng = make_stream(c.seed, {kProfileStream});
  const AttackProfile profile =
      make_attack_profile(c.attack, n, c.effective_malicious_count(), profile_rng, c.offset_db,
                          c.extreme_offset_db, c.attack_probability);
  std::vector<Index> malicious = profile.malicious_indices;
  std::sort(malicious.begin(), malicious.end());

  auto run_trial = [&](std::int64_t trial, TrialMetrics& metrics) {
    Rng rng = make_stream(c.seed, {static_cast<std::uint64_t>(point_index) + 1,
                                   static_cast<std::uint64_t>(trial)});
    for (Hypothesis truth : {Hypothesis::H0, Hypothesis::H1}) {
      const EnergyReport honest =
          simulate_report(channel, truth, n, rng, c.energy_model, 2 * trial + (truth == Hypothesis::H1));
      const EnergyReport reported = apply_attack(honest, profile, rng);
      const DefenseOutcome defense =
          apply_defense(c, reported.energies, profile.malicious_count(), table);

      std::vector<bool> drop(static_cast<std::size_t>(n), false);
      for (Index i : defense.excluded) drop[static_cast<std::size_t>(i)] = true;
      FusionInput input;
      for (Index i = 0; i < n; ++i) {
        if (drop[static_cast<std::size_t>(i)]) continue;
        input.retained_indices.push_back(i);
      }
      const double lambda = thresholds[input.retained_indices.size()];
      for (Index i : input.retained_indices)
        input.local_decisions.push_back(local_decision(reported.energies[i], lambda));

      accumulate(metrics, RoundOutcome{majority_fuse(input), truth, defense.excluded, malicious,
                                       n, defense.estimated_t});
    }
    ++metrics.trials;
  };

  const std::int64_t chunks = (c.trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
  std::vector<TrialMetrics> partial(static_cast<std::size_t>(chunks));
  std::atomic<std::int64_t> next{0};
  std::vector<std::exception_ptr> errors(std::max(1u, threads));
  auto worker = [&](unsigned id) {
    try {
      for (std::int64_t chunk = next++; chunk < chunks; chunk = next++) {
        const std::int64_t begin = chunk * kTrialsPerChunk;
        const std::int64_t end = std::min(c.trials, begin + kTrialsPerChunk);
        for (std::int64_t trial = begin; trial < end; ++trial)
          run_trial(trial, partial[static_cast<std::size_t>(chunk)]);
      }
    } catch (...) {
      errors[id] = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < std::max(1u, threads); ++i) pool.emplace_back(worker, i);
    worker(0);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  TrialMetrics total;
  for (const auto& p : partial) total.merge(p);
  return total;
}

std::vector<SweepPoint> run_scenario(const ScenarioConfig& c, CriticalValueTable& table,
                                     unsigned threads) {
  c.validate();
  std::vector<SweepPoint> points;
  for (std::size_t p = 0; p < sweep_size(c); ++p)
    points.push_back({sweep_value(c, p), run_point(c, p, table, threads)});
  return points;
}

void write_csv(std::ostream& out, const std::vector<SweepPoint>& points, std::uint64_t seed) {
  out << kCsvHeader << '\n';
  for (const auto& p : points) {
    append(out, p.sweep_value);
    out << ',';
    append(out, p.metrics.q_fa());
    out << ',';
    append(out, p.metrics.q_d());
    out << ',';
    append(out, p.metrics.mu_detection_rate());
    out << ',';
    append(out, p.metrics.honest_exclusion_rate());
    out << ',';
    append(out, p.metrics.mean_estimated_t());
    out << ',' << p.metrics.trials << ',' << seed << '\n';
  }
}

void emit_csv(const std::vector<SweepPoint>& points, std::uint64_t seed,
              const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write CSV: " + path.string());
  write_csv(out, points, seed);
  if (!out) throw std::runtime_error("error writing CSV: " + path.string());
}

std::vector<CsvRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader)
    throw std::runtime_error("CSV: missing or unexpected header");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(trim(cell));
    if (f.size() != 8) throw std::runtime_error("CSV: expected 8 columns");
    CsvRow r;
    r.sweep_var = std::stod(f[0]);
    r.q_fa = parse_optional(f[1]);
    r.q_d = parse_optional(f[2]);
    r.mu_detection_rate = parse_optional(f[3]);
    r.honest_exclusion_rate = parse_optional(f[4]);
    r.mean_estimated_t = parse_optional(f[5]);
    r.trials = std::stoll(f[6]);
    r.seed = std::stoull(f[7]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace ssdf
