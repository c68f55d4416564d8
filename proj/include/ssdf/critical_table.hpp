#ifndef SSDF_CRITICAL_TABLE_HPP_
#define SSDF_CRITICAL_TABLE_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace ssdf {

using Index = Eigen::Index;

// Null distributions a block test can be calibrated against. The *Half
// kinds apply the statistic to one half of a sorted N-sample (median in the
// lower half), as used when each half is tested separately. The *Gap kinds
// are conditional on the block beyond the largest gap of the upper (lower)
// half having exactly t points, which is how the modified largest gap
// chooses the block it tests.
enum class CriticalKind {
  TmUpper,
  TmLower,
  TmResidual,
  Sw,
  TmUpperHalf,
  TmLowerHalf,
  SwUpperHalf,
  SwLowerHalf,
  TmUpperGap,
  TmLowerGap,
  SwGap,
};

std::string_view to_string(CriticalKind kind);
CriticalKind critical_kind_from_string(std::string_view name);

// SW critical values do not depend on the block size.
bool depends_on_block_size(CriticalKind kind);

// Size of the sample the statistic actually sees for a kind at total size n.
Index statistic_sample_size(CriticalKind kind, Index n);

// Value of the statistic on one ascending-sorted null sample of size n, or
// nullopt when a conditional kind's selection event did not occur.
std::optional<double> null_statistic(CriticalKind kind, const Eigen::VectorXd& sorted_sample,
                                     Index t);

// Conditional kinds keep only the draws where the selection event occurs.
// Below this many kept draws the unconditional kind's value is used instead.
inline constexpr std::int64_t kMinConditionalDraws = 1000;

struct CriticalEntry {
  CriticalKind kind;
  Index n;
  Index t;
  double alpha;
  double value;
  std::int64_t replications;
  std::uint64_t seed;
};

// Empirical alpha-quantile of a statistic under an i.i.d. standard normal
// null, estimated from `replications` draws. Reject when statistic < value.
double simulate_critical_value(CriticalKind kind, Index n, Index t, double alpha,
                               std::int64_t replications, std::uint64_t seed);

// Monte Carlo critical values keyed by (kind, N, t, alpha). Lookups build
// missing cells on demand; each cell's random stream is derived from the
// table seed and the key, so contents never depend on build order. Safe to
// share between threads.
class CriticalValueTable {
 public:
  struct Options {
    std::int64_t replications = 100000;
    std::uint64_t seed = 0x55df'c0de'2024ULL;
    bool build_on_miss = true;
  };

  CriticalValueTable() = default;
  explicit CriticalValueTable(Options options) : options_(options) {}

  CriticalValueTable(const CriticalValueTable&) = delete;
  CriticalValueTable& operator=(const CriticalValueTable&) = delete;
  // Not safe while another thread is using `other`.
  CriticalValueTable(CriticalValueTable&& other) noexcept;

  const Options& options() const { return options_; }

  // Throws std::out_of_range on a miss when build_on_miss is false.
  double value(CriticalKind kind, Index n, Index t, double alpha);
  std::optional<double> find(CriticalKind kind, Index n, Index t, double alpha) const;

  void insert(const CriticalEntry& entry);

  // Fills every (n, t) cell for t in [t_min, t_max], using up to `threads`
  // workers. Throws std::runtime_error if the values of an unconditional
  // kind are not monotone non-increasing in t.
  void build(CriticalKind kind, Index n, Index t_min, Index t_max, double alpha,
             unsigned threads = 1);

  std::vector<CriticalEntry> entries() const;
  std::size_t size() const;

  void save(const std::filesystem::path& path) const;
  // Merges records from a cache file. Throws on malformed input or an
  // unsupported version.
  void load(const std::filesystem::path& path);

 private:
  using Key = std::tuple<int, Index, Index, double>;
  static Key make_key(CriticalKind kind, Index n, Index t, double alpha);

  Options options_;
  mutable std::mutex mutex_;
  std::map<Key, CriticalEntry> entries_;
  std::map<Key, std::shared_future<double>> pending_;
};

// Builds a fresh table for one kind over a block-size range.
CriticalValueTable build_critical_table(CriticalKind kind, Index n, Index t_min, Index t_max,
                                        double alpha, std::int64_t replications,
                                        std::uint64_t seed);

}  // namespace ssdf

#endif  // SSDF_CRITICAL_TABLE_HPP_
