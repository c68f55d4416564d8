#include "ssdf/critical_table.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ssdf/estimators.hpp"
#include "ssdf/outlier_tests.hpp"
#include "ssdf/random.hpp"

namespace ssdf {

namespace {

constexpr int kCacheVersion = 1;

struct KindName {
  CriticalKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {CriticalKind::TmUpper, "tm_upper"},         {CriticalKind::TmLower, "tm_lower"},
    {CriticalKind::TmResidual, "tm_residual"},   {CriticalKind::Sw, "sw"},
    {CriticalKind::TmUpperHalf, "tm_upper_half"}, {CriticalKind::TmLowerHalf, "tm_lower_half"},
    {CriticalKind::SwUpperHalf, "sw_upper_half"}, {CriticalKind::SwLowerHalf, "sw_lower_half"},
    {CriticalKind::TmUpperGap, "tm_upper_gap"},   {CriticalKind::TmLowerGap, "tm_lower_gap"},
    {CriticalKind::SwGap, "sw_gap"},
};

bool is_conditional(CriticalKind kind) {
  return kind == CriticalKind::TmUpperGap || kind == CriticalKind::TmLowerGap ||
         kind == CriticalKind::SwGap;
}

CriticalKind unconditional_kind(CriticalKind kind) {
  switch (kind) {
    case CriticalKind::TmUpperGap:
      return CriticalKind::TmUpper;
    case CriticalKind::TmLowerGap:
      return CriticalKind::TmLower;
    case CriticalKind::SwGap:
      return CriticalKind::Sw;
    default:
      return kind;
  }
}

Index normalized_t(CriticalKind kind, Index t) { return depends_on_block_size(kind) ? t : 0; }

}  // namespace

std::string_view to_string(CriticalKind kind) {
  for (const auto& entry : kKindNames)
    if (entry.kind == kind) return entry.name;
  throw std::logic_error("unknown critical kind");
}

CriticalKind critical_kind_from_string(std::string_view name) {
  for (const auto& entry : kKindNames)
    if (entry.name == name) return entry.kind;
  throw std::invalid_argument("unknown critical-value test kind: " + std::string(name));
}

bool depends_on_block_size(CriticalKind kind) {
  // SwGap depends on t through its selection event.
  return !(kind == CriticalKind::Sw || kind == CriticalKind::SwUpperHalf ||
           kind == CriticalKind::SwLowerHalf);
}

Index statistic_sample_size(CriticalKind kind, Index n) {
  switch (kind) {
    case CriticalKind::TmUpperHalf:
    case CriticalKind::SwUpperHalf:
      return n / 2;
    case CriticalKind::TmLowerHalf:
    case CriticalKind::SwLowerHalf:
      return n - n / 2;
    default:
      return n;
  }
}

std::optional<double> null_statistic(CriticalKind kind, const Eigen::VectorXd& sorted,
                                     Index t) {
  const Index n = sorted.size();
  const Index upper = n / 2;
  const Index lower = n - upper;
  switch (kind) {
    case CriticalKind::TmUpper:
      return tm_upper_statistic(sorted, t);
    case CriticalKind::TmLower:
      return tm_lower_statistic(sorted, t);
    case CriticalKind::TmResidual: {
      Eigen::VectorXd r = absolute_residuals(sorted);
      std::sort(r.begin(), r.end());
      return tm_upper_statistic(r, t);
    }
    case CriticalKind::Sw:
      return sw_statistic(sorted, sw_coefficients(n));
    case CriticalKind::TmUpperHalf:
      return tm_upper_statistic(sorted.tail(upper), t);
    case CriticalKind::TmLowerHalf:
      return tm_lower_statistic(sorted.head(lower), t);
    case CriticalKind::SwUpperHalf:
      return sw_statistic(sorted.tail(upper), sw_coefficients(upper));
    case CriticalKind::SwLowerHalf:
      return sw_statistic(sorted.head(lower), sw_coefficients(lower));
    case CriticalKind::TmUpperGap:
    case CriticalKind::TmLowerGap:
    case CriticalKind::SwGap: {
      // The lower-tail variant is the upper one applied to the negated sample.
      const Eigen::VectorXd oriented =
          kind == CriticalKind::TmLowerGap ? Eigen::VectorXd(-sorted.reverse()) : sorted;
      if (partition_upper_half(oriented).right_of_gap.size() != t) return std::nullopt;
      if (kind == CriticalKind::SwGap) return sw_statistic(oriented, sw_coefficients(n));
      return tm_upper_statistic(oriented, t);
    }
  }
  throw std::logic_error("unknown critical kind");
}

double simulate_critical_value(CriticalKind kind, Index n, Index t, double alpha,
                               std::int64_t replications, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("critical value: alpha outside (0,1)");
  const Index m = statistic_sample_size(kind, n);
  if (t < 0 || t >= m) throw std::invalid_argument("critical value: need 0 <= t < sample size");
  auto below = static_cast<std::int64_t>(std::llround(alpha * static_cast<double>(replications)));
  if (below < 1 || below >= replications)
    throw std::invalid_argument("critical value: too few replications for alpha");

  t = normalized_t(kind, t);
  Rng rng = make_stream(seed, {static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(n),
                               static_cast<std::uint64_t>(t), std::bit_cast<std::uint64_t>(alpha)});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(replications));
  Eigen::VectorXd sample(n);
  for (std::int64_t r = 0; r < replications; ++r) {
    for (Index i = 0; i < n; ++i) sample[i] = normal(rng);
    std::sort(sample.begin(), sample.end());
    if (auto s = null_statistic(kind, sample, t)) stats.push_back(*s);
  }
  if (is_conditional(kind)) {
    const auto kept = static_cast<std::int64_t>(stats.size());
    if (kept < kMinConditionalDraws)
      return simulate_critical_value(unconditional_kind(kind), n, t, alpha, replications, seed);
    below = std::llround(alpha * static_cast<double>(kept));
    if (below < 1) below = 1;
  }
  // Midpoint between the `below`-th and next order statistic: exactly
  // `below` simulated values fall strictly under it (barring ties).
  const auto kth = stats.begin() + below;
  std::nth_element(stats.begin(), kth, stats.end());
  const double upper = *kth;
  const double lower = *std::max_element(stats.begin(), kth);
  return 0.5 * (lower + upper);
}

CriticalValueTable::CriticalValueTable(CriticalValueTable&& other) noexcept
    : options_(other.options_), entries_(std::move(other.entries_)) {}

CriticalValueTable::Key CriticalValueTable::make_key(CriticalKind kind, Index n, Index t,
                                                     double alpha) {
  return {static_cast<int>(kind), n, normalized_t(kind, t), alpha};
}

std::optional<double> CriticalValueTable::find(CriticalKind kind, Index n, Index t,
                                               double alpha) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(make_key(kind, n, t, alpha));
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

double CriticalValueTable::value(CriticalKind kind, Index n, Index t, double alpha) {
  const Key key = make_key(kind, n, t, alpha);
  std::promise<double> promise;
  {
    std::unique_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second.value;
    if (auto it = pending_.find(key); it != pending_.end()) {
      auto future = it->second;
      lock.unlock();
      return future.get();
    }
    if (!options_.build_on_miss) {
      std::ostringstream msg;
      msg << "critical value missing: " << to_string(kind) << " N=" << n << " t=" << t
          << " alpha=" << alpha;
      throw std::out_of_range(msg.str());
    }
    pending_.emplace(key, promise.get_future().share());
  }

  try {
    const double v = simulate_critical_value(kind, n, t, alpha, options_.replications, options_.seed);
    {
      std::lock_guard lock(mutex_);
      entries_[key] = CriticalEntry{kind, n, std::get<2>(key), alpha, v,
                                    options_.replications, options_.seed};
      pending_.erase(key);
    }
    promise.set_value(v);
    return v;
  } catch (...) {
    {
      std::lock_guard lock(mutex_);
      pending_.erase(key);
    }
    promise.set_exception(std::current_exception());
    throw;
  }
}

void CriticalValueTable::insert(const CriticalEntry& entry) {
  if (!(entry.value > 0.0 && entry.value < 1.0) && !(entry.value == 0.0))
    throw std::invalid_argument("critical value outside [0,1)");
  CriticalEntry stored = entry;
  stored.t = normalized_t(entry.kind, entry.t);
  std::lock_guard lock(mutex_);
  entries_[make_key(entry.kind, entry.n, entry.t, entry.alpha)] = stored;
}

void CriticalValueTable::build(CriticalKind kind, Index n, Index t_min, Index t_max,
                               double alpha, unsigned threads) {
  if (!depends_on_block_size(kind)) t_min = t_max = 0;
  if (t_max < t_min) return;
  threads = std::max(1u, threads);
  std::atomic<Index> next{t_min};
  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](unsigned id) {
    try {
      for (Index t = next++; t <= t_max; t = next++) {
        if (find(kind, n, t, alpha)) continue;
        const double v = simulate_critical_value(kind, n, t, alpha, options_.replications,
                                                 options_.seed);
        insert({kind, n, t, alpha, v, options_.replications, options_.seed});
      }
    } catch (...) {
      errors[id] = std::current_exception();
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker, i);
  worker(0);
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (is_conditional(kind)) return;
  double previous = 1.0;
  for (Index t = t_min; t <= t_max; ++t) {
    const double v = *find(kind, n, t, alpha);
    if (v > previous) {
      std::ostringstream msg;
      msg << "critical values for " << to_string(kind) << " N=" << n
          << " are not monotone in t at t=" << t;
      throw std::runtime_error(msg.str());
    }
    previous = v;
  }
}

std::vector<CriticalEntry> CriticalValueTable::entries() const {
  std::lock_guard lock(mutex_);
  std::vector<CriticalEntry> out;
  out.reserve(entries_.size());
  for (const auto& [key, entry] : entries_) out.push_back(entry);
  return out;
}

std::size_t CriticalValueTable::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void CriticalValueTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write critical-value cache: " + path.string());
  out << "# ssdf critical-value cache\n";
  out << "version " << kCacheVersion << "\n";
  out << "# test n t alpha value replications seed\n";
  char buf[128];
  for (const auto& e : entries()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g", e.alpha, e.value);
    out << to_string(e.kind) << ' ' << e.n << ' ' << e.t << ' ' << buf << ' '
        << e.replications << ' ' << e.seed << '\n';
  }
  if (!out) throw std::runtime_error("error writing critical-value cache: " + path.string());
}

void CriticalValueTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read critical-value cache: " + path.string());
  std::string line;
  bool have_version = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    if (!have_version) {
      std::string word;
      int version = 0;
      if (!(fields >> word >> version) || word != "version")
        throw std::runtime_error("critical-value cache: missing version line");
      if (version != kCacheVersion)
        throw std::runtime_error("critical-value cache: unsupported version " +
                                 std::to_string(version));
      have_version = true;
      continue;
    }
    std::string name;
    CriticalEntry e{};
    if (!(fields >> name >> e.n >> e.t >> e.alpha >> e.value >> e.replications >> e.seed))
      throw std::runtime_error("critical-value cache: malformed record at line " +
                               std::to_string(line_no));
    e.kind = critical_kind_from_string(name);
    insert(e);
  }
  if (!have_version) throw std::runtime_error("critical-value cache: missing version line");
}

CriticalValueTable build_critical_table(CriticalKind kind, Index n, Index t_min, Index t_max,
                                        double alpha, std::int64_t replications,
                                        std::uint64_t seed) {
  CriticalValueTable table({replications, seed, true});
  table.build(kind, n, t_min, t_max, alpha);
  return table;
}

}  // namespace ssdf
